use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric failure: {error}\n  state: {state}")]
    Numeric { error: torbil::Error, state: String },
    #[error("identity check failed: {0}")]
    Identity(String),
    #[error("output error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) | Self::Io(_) => 1,
            Self::Numeric { .. } => 2,
            Self::Identity(_) => 3,
        }
    }

    pub fn numeric(error: torbil::Error, state: impl std::fmt::Debug) -> Self {
        Self::Numeric { error, state: format!("{state:?}") }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Io(e.to_string())
    }
}
