use thiserror::Error;

/// Failures reported by the geometry, engine and analysis layers.
///
/// Scalars are carried as `f64` so the error type does not depend on the
/// scalar parameter of the failing computation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invariant violated: {what} (at parameter {at}, defect {defect:e})")]
    InvariantViolation { what: &'static str, at: f64, defect: f64 },

    #[error("profile curve does not match the required marker sign pattern: {0}")]
    NonConformingCurve(String),

    #[error("raw curve is not strictly convex near tau = {tau}")]
    NonConvex { tau: f64 },

    #[error("Newton iteration failed to converge after {iterations} steps (residual {residual:e})")]
    NewtonFailed { iterations: usize, residual: f64 },

    #[error("ray touches the boundary tangentially at distance {s} without crossing")]
    GrazingAmbiguous { s: f64 },

    #[error("inflection directions undefined at tau = {tau}: {reason}")]
    UndefinedInflection { tau: f64, reason: &'static str },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("time {s} outside covered range [{lo}, {hi}]")]
    OutOfRange { s: f64, lo: f64, hi: f64 },

    #[error("trajectory stopped before the requested event ({0})")]
    Stopped(String),

    #[error("bounce count changes under perturbation (base {base}, perturbed {perturbed})")]
    NonSmoothPoint { base: usize, perturbed: usize },

    #[error("degenerate specular basis: velocity parallel to the azimuthal tangent")]
    DegenerateBasis,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
