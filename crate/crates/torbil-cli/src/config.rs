//! Run configuration read from TOML.
//!
//! Every table is optional and every key has a default, so an empty file is a
//! valid configuration describing the circle torus `R = 2`, `r = 1`.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use torbil::analysis::RingSpec;
use torbil::profile::{reparametrize_arclength, FourierCurve, ProfileCurve};
use torbil::{Caps, Domain};

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    /// Worker threads for Monte Carlo work; `0` lets the pool decide.
    pub workers: usize,
    pub curve: CurveConfig,
    pub tolerances: Tolerances,
    pub caps: CapsConfig,
    pub output: OutputConfig,
    pub simulate: SimulateConfig,
    pub classify: ClassifyConfig,
    pub inflection_map: InflectionMapConfig,
    pub badset: BadsetConfig,
    pub jacobian: JacobianConfig,
    pub recurrence: RecurrenceConfig,
    pub chart: ChartConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveConfig {
    Circle {
        center: f64,
        radius: f64,
    },
    Ellipse {
        center: f64,
        semi_rho: f64,
        semi_z: f64,
    },
    /// `ρ(t) = rho0 + Σ aₖ cos kt + bₖ sin kt`, `z(t) = z0 + Σ cₖ cos kt + dₖ sin kt`.
    Custom {
        rho0: f64,
        z0: f64,
        rho_coeffs: Vec<[f64; 2]>,
        z_coeffs: Vec<[f64; 2]>,
    },
}

impl Default for CurveConfig {
    fn default() -> Self {
        Self::Circle { center: 2.0, radius: 1.0 }
    }
}

impl CurveConfig {
    pub fn build(&self) -> Result<Domain, CliError> {
        let profile = match self {
            Self::Circle { center, radius } => ProfileCurve::circle(*center, *radius),
            Self::Ellipse { center, semi_rho, semi_z } => ProfileCurve::ellipse(*center, *semi_rho, *semi_z),
            Self::Custom { rho0, z0, rho_coeffs, z_coeffs } => {
                let pairs = |v: &[[f64; 2]]| v.iter().map(|c| (c[0], c[1])).collect();
                reparametrize_arclength(Arc::new(FourierCurve {
                    rho0: *rho0,
                    z0: *z0,
                    rho_coeffs: pairs(rho_coeffs),
                    z_coeffs: pairs(z_coeffs),
                }))
            }
        }
        .map_err(|e| CliError::Config(format!("curve: {e}")))?;
        Domain::new(profile).map_err(|e| CliError::Config(format!("domain: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// `|n·v̂|` below which a bounce goes to the grazing classifier.
    pub graze_threshold: f64,
    /// Exclusion half-width around the zeros of `h`.
    pub z_h_band: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { graze_threshold: torbil::engine::GRAZE_THRESHOLD, z_h_band: torbil::grazing::Z_H_BAND }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CapsConfig {
    pub max_bounces: usize,
    /// Upper bound on any requested path length.
    pub max_length: f64,
}

impl Default for CapsConfig {
    fn default() -> Self {
        Self { max_bounces: torbil::engine::MAX_BOUNCES, max_length: 1e6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    /// JSON Lines for event streams, CSV for tables.
    Auto,
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: Format,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { path: None, format: Format::Auto }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum DirectionConfig {
    Forward,
    Backward,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub x: [f64; 3],
    pub v: [f64; 3],
    pub t: f64,
    /// Unwrapped azimuth label of `x`; defaults to its principal value.
    pub phi: Option<f64>,
    pub direction: DirectionConfig,
    /// Path length budget. Ignored when `time` is set.
    pub length: f64,
    pub time: Option<f64>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        let s3 = 3f64.sqrt();
        Self {
            x: [3.0, 0.0, 0.0],
            v: [-s3 / 2.0, 0.5, 0.0],
            t: 0.0,
            phi: None,
            direction: DirectionConfig::Forward,
            length: 9.0 * s3 * (1.0 + 1e-12),
            time: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifyConfig {
    pub phi: f64,
    pub n_tau: usize,
    pub n_dir: usize,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self { phi: 0.0, n_tau: 64, n_dir: 36 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InflectionMapConfig {
    pub phi: f64,
    pub n_tau: usize,
}

impl Default for InflectionMapConfig {
    fn default() -> Self {
        Self { phi: 0.0, n_tau: 128 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BadsetConfig {
    pub x: [f64; 3],
    pub phi: f64,
    /// One output row per grazing threshold.
    pub eps: Vec<f64>,
    pub length: f64,
    pub samples: usize,
    pub speed_band: Option<[f64; 2]>,
    pub rings: Vec<RingSpec<f64>>,
}

impl Default for BadsetConfig {
    fn default() -> Self {
        Self { x: [2.0, 0.0, 0.0], phi: 0.0, eps: vec![0.02, 0.01, 0.005], length: 10.0, samples: 10_000, speed_band: None, rings: vec![] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JacobianConfig {
    pub x: [f64; 3],
    pub v: [f64; 3],
    pub t: f64,
    pub s: f64,
    pub h: f64,
}

impl Default for JacobianConfig {
    fn default() -> Self {
        Self { x: [2.0, 0.0, 0.0], v: [0.1, 0.2, 0.1], t: 0.0, s: -2.0, h: 1e-5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RecurrenceConfig {
    pub tau: f64,
    pub phi: f64,
    /// Inward tilt from the tangent plane.
    pub alpha: f64,
    /// Angle of the tangent direction from the meridian toward `φ̂`.
    pub beta: f64,
    pub length: f64,
    pub gate: f64,
    pub inner_only: bool,
    pub epsilon: f64,
}

impl Default for RecurrenceConfig {
    fn default() -> Self {
        Self {
            tau: 2.0 * std::f64::consts::PI / 3.0,
            phi: 0.0,
            alpha: 0.01,
            beta: 0.2,
            length: 1.0,
            gate: 0.1,
            inner_only: true,
            epsilon: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChartConfig {
    pub height: f64,
    pub r_inner: f64,
    pub r_outer: f64,
    pub step: f64,
}

impl Default for ChartConfig {
    fn default() -> Self {
        Self { height: std::f64::consts::TAU, r_inner: 1.0, r_outer: 3.0, step: 1e-3 }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Rejects non-positive tolerances and other values no subcommand can use.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |what: &str| Err(CliError::Config(format!("{what} must be positive and finite")));
        let pos = |x: f64| x > 0.0 && x.is_finite();
        if !pos(self.tolerances.graze_threshold) {
            return bad("tolerances.graze_threshold");
        }
        if !pos(self.tolerances.z_h_band) {
            return bad("tolerances.z_h_band");
        }
        if self.caps.max_bounces == 0 || !pos(self.caps.max_length) {
            return bad("caps.max_bounces and caps.max_length");
        }
        if !pos(self.jacobian.h) || !pos(self.chart.step) {
            return bad("jacobian.h and chart.step");
        }
        if self.badset.eps.iter().any(|e| !(*e >= 0.0 && e.is_finite())) {
            return Err(CliError::Config("badset.eps entries must be non-negative".into()));
        }
        if let Some([lo, hi]) = self.badset.speed_band {
            if !(pos(lo) && hi >= lo && hi.is_finite()) {
                return Err(CliError::Config("badset.speed_band must satisfy 0 < lo <= hi".into()));
            }
        }
        for (name, len) in [
            ("simulate.length", self.simulate.length),
            ("badset.length", self.badset.length),
            ("recurrence.length", self.recurrence.length),
        ] {
            if !pos(len) || len > self.caps.max_length {
                return Err(CliError::Config(format!("{name} must lie in (0, caps.max_length]")));
            }
        }
        Ok(())
    }

    pub fn caps(&self) -> Caps<f64> {
        Caps { max_bounces: self.caps.max_bounces, graze_threshold: self.tolerances.graze_threshold }
    }

    /// SHA-256 of the canonical JSON form of the resolved configuration,
    /// leaving out the output path and worker count since neither changes
    /// the emitted values.
    pub fn hash(&self) -> String {
        let mut canon = self.clone();
        canon.output.path = None;
        canon.workers = 0;
        let json = serde_json::to_vec(&canon).expect("config serializes");
        hex::encode(Sha256::digest(json))
    }
}
