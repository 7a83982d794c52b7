mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{DirectionConfig, Format, RunConfig};
use error::CliError;

/// Billiards in revolved toroidal domains.
///
/// Every flag can also be set through the environment variable shown in its
/// help text. Flags beat environment variables, which beat the config file.
#[derive(Debug, Parser)]
#[command(name = "torbil", version)]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true, env = "TORBIL_CONFIG")]
    config: Option<PathBuf>,
    #[arg(long, global = true, env = "TORBIL_SEED")]
    seed: Option<u64>,
    /// Worker threads for Monte Carlo runs.
    #[arg(long, global = true, env = "TORBIL_WORKERS")]
    workers: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, global = true, env = "TORBIL_OUT")]
    out: Option<PathBuf>,
    #[arg(long, global = true, env = "TORBIL_FORMAT", value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run billiard cycles from one state and emit the bounce records.
    Simulate(SimulateArgs),
    /// Grazing class atlas over (τ, tangent direction) at fixed φ.
    ClassifyBoundary(ClassifyArgs),
    /// Inflection angle and angular momentum along the inner arc.
    InflectionMap(InflectionArgs),
    /// Monte Carlo estimate of the bad direction set at a base point.
    Badset(BadsetArgs),
    /// Finite-difference determinant of ∂X/∂v.
    Jacobian(JacobianArgs),
    /// Recurrence residuals along a near-tangent trajectory.
    RecurrenceCheck(RecurrenceArgs),
    /// Differential identities of the annulus chart.
    CoordsCheck(CoordsArgs),
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, env = "TORBIL_SIMULATE_X", value_delimiter = ',', allow_hyphen_values = true)]
    x: Option<Vec<f64>>,
    #[arg(long, env = "TORBIL_SIMULATE_V", value_delimiter = ',', allow_hyphen_values = true)]
    v: Option<Vec<f64>>,
    #[arg(long, env = "TORBIL_SIMULATE_T", allow_hyphen_values = true)]
    t: Option<f64>,
    #[arg(long, env = "TORBIL_SIMULATE_DIRECTION", value_enum)]
    direction: Option<DirectionConfig>,
    #[arg(long, env = "TORBIL_SIMULATE_LENGTH")]
    length: Option<f64>,
    #[arg(long, env = "TORBIL_SIMULATE_TIME")]
    time: Option<f64>,
    #[arg(long, env = "TORBIL_MAX_BOUNCES")]
    max_bounces: Option<usize>,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[arg(long, env = "TORBIL_CLASSIFY_PHI", allow_hyphen_values = true)]
    phi: Option<f64>,
    #[arg(long, env = "TORBIL_CLASSIFY_N_TAU")]
    n_tau: Option<usize>,
    #[arg(long, env = "TORBIL_CLASSIFY_N_DIR")]
    n_dir: Option<usize>,
}

#[derive(Debug, Args)]
struct InflectionArgs {
    #[arg(long, env = "TORBIL_INFLECTION_PHI", allow_hyphen_values = true)]
    phi: Option<f64>,
    #[arg(long, env = "TORBIL_INFLECTION_N_TAU")]
    n_tau: Option<usize>,
}

#[derive(Debug, Args)]
struct BadsetArgs {
    #[arg(long, env = "TORBIL_BADSET_X", value_delimiter = ',', allow_hyphen_values = true)]
    x: Option<Vec<f64>>,
    #[arg(long, env = "TORBIL_BADSET_PHI", allow_hyphen_values = true)]
    phi: Option<f64>,
    /// Grazing thresholds, one output row each.
    #[arg(long, env = "TORBIL_BADSET_EPS", value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    #[arg(long, env = "TORBIL_BADSET_LENGTH")]
    length: Option<f64>,
    #[arg(long, env = "TORBIL_BADSET_SAMPLES")]
    samples: Option<usize>,
    /// Uniform speed band `lo,hi`.
    #[arg(long, env = "TORBIL_BADSET_SPEED_BAND", value_delimiter = ',')]
    speed_band: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
struct JacobianArgs {
    /// `x1,x2,x3,v1,v2,v3,t`.
    #[arg(long, env = "TORBIL_JACOBIAN_STATE", value_delimiter = ',', allow_hyphen_values = true)]
    state: Option<Vec<f64>>,
    #[arg(long, env = "TORBIL_JACOBIAN_S", allow_hyphen_values = true)]
    s: Option<f64>,
    #[arg(long, env = "TORBIL_JACOBIAN_H")]
    h: Option<f64>,
}

#[derive(Debug, Args)]
struct RecurrenceArgs {
    #[arg(long, env = "TORBIL_RECURRENCE_TAU")]
    tau: Option<f64>,
    #[arg(long, env = "TORBIL_RECURRENCE_ALPHA")]
    alpha: Option<f64>,
    #[arg(long, env = "TORBIL_RECURRENCE_BETA", allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, env = "TORBIL_RECURRENCE_LENGTH")]
    length: Option<f64>,
    #[arg(long, env = "TORBIL_RECURRENCE_INNER_ONLY")]
    inner_only: Option<bool>,
}

#[derive(Debug, Args)]
struct CoordsArgs {
    #[arg(long, env = "TORBIL_CHART_HEIGHT")]
    height: Option<f64>,
    #[arg(long, env = "TORBIL_CHART_R_INNER")]
    r_inner: Option<f64>,
    #[arg(long, env = "TORBIL_CHART_R_OUTER")]
    r_outer: Option<f64>,
    #[arg(long, env = "TORBIL_CHART_STEP")]
    step: Option<f64>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn fixed<const N: usize>(flag: &str, v: &Option<Vec<f64>>) -> Result<Option<[f64; N]>, CliError> {
    v.as_deref()
        .map(|v| v.try_into().map_err(|_| CliError::Config(format!("--{flag} takes {N} comma-separated numbers, got {}", v.len()))))
        .transpose()
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    set(&mut cfg.seed, cli.seed);
    set(&mut cfg.workers, cli.workers);
    if cli.out.is_some() {
        cfg.output.path = cli.out.clone();
    }
    set(&mut cfg.output.format, cli.format);
    match &cli.command {
        Command::Simulate(a) => {
            let s = &mut cfg.simulate;
            set(&mut s.x, fixed("x", &a.x)?);
            set(&mut s.v, fixed("v", &a.v)?);
            set(&mut s.t, a.t);
            set(&mut s.direction, a.direction);
            set(&mut s.length, a.length);
            if a.time.is_some() {
                s.time = a.time;
            }
            set(&mut cfg.caps.max_bounces, a.max_bounces);
        }
        Command::ClassifyBoundary(a) => {
            set(&mut cfg.classify.phi, a.phi);
            set(&mut cfg.classify.n_tau, a.n_tau);
            set(&mut cfg.classify.n_dir, a.n_dir);
        }
        Command::InflectionMap(a) => {
            set(&mut cfg.inflection_map.phi, a.phi);
            set(&mut cfg.inflection_map.n_tau, a.n_tau);
        }
        Command::Badset(a) => {
            let b = &mut cfg.badset;
            set(&mut b.x, fixed("x", &a.x)?);
            set(&mut b.phi, a.phi);
            set(&mut b.eps, a.eps.clone());
            set(&mut b.length, a.length);
            set(&mut b.samples, a.samples);
            if let Some(sb) = fixed::<2>("speed-band", &a.speed_band)? {
                b.speed_band = Some(sb);
            }
        }
        Command::Jacobian(a) => {
            let j = &mut cfg.jacobian;
            if let Some(st) = fixed::<7>("state", &a.state)? {
                j.x = [st[0], st[1], st[2]];
                j.v = [st[3], st[4], st[5]];
                j.t = st[6];
            }
            set(&mut j.s, a.s);
            set(&mut j.h, a.h);
        }
        Command::RecurrenceCheck(a) => {
            let r = &mut cfg.recurrence;
            set(&mut r.tau, a.tau);
            set(&mut r.alpha, a.alpha);
            set(&mut r.beta, a.beta);
            set(&mut r.length, a.length);
            set(&mut r.inner_only, a.inner_only);
        }
        Command::CoordsCheck(a) => {
            let c = &mut cfg.chart;
            set(&mut c.height, a.height);
            set(&mut c.r_inner, a.r_inner);
            set(&mut c.r_outer, a.r_outer);
            set(&mut c.step, a.step);
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = resolve(&cli)?;
    match cli.command {
        Command::Simulate(_) => commands::simulate(&cfg),
        Command::ClassifyBoundary(_) => commands::classify_boundary(&cfg),
        Command::InflectionMap(_) => commands::inflection_map(&cfg),
        Command::Badset(_) => commands::badset(&cfg),
        Command::Jacobian(_) => commands::jacobian(&cfg),
        Command::RecurrenceCheck(_) => commands::recurrence_check(&cfg),
        Command::CoordsCheck(_) => commands::coords_check(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("torbil: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
