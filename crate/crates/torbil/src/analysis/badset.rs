use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::rings::{ring_membership, RingSpec};
use crate::domain::ToroidalDomain;
use crate::engine::{backward_cycles, Budget, Caps, PhaseState, TrajectoryStatus};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::vec3::Vec3;

/// Smallest accepted sample count.
pub const MIN_SAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct BadSetConfig<T> {
    pub x: Vec3<T>,
    /// Unwrapped azimuth label of the base point.
    pub phi: T,
    pub eps_graze: T,
    pub length: T,
    pub n_samples: usize,
    pub seed: u64,
    /// Speeds drawn uniformly from `[lo, hi]`; unit speed when `None`.
    pub speed_band: Option<(T, T)>,
    pub rings: Vec<RingSpec<T>>,
    pub caps: Caps<T>,
    /// Worker threads; `0` uses the global pool.
    pub workers: usize,
}

/// Per-cause counts. A sample may be counted under several causes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Breakdown {
    pub near_grazing: usize,
    pub ring_excluded: usize,
    pub inflection_stop: usize,
    pub max_bounces: usize,
    pub numeric_failure: usize,
}

impl Breakdown {
    fn merge(self, o: Self) -> Self {
        Self {
            near_grazing: self.near_grazing + o.near_grazing,
            ring_excluded: self.ring_excluded + o.ring_excluded,
            inflection_stop: self.inflection_stop + o.inflection_stop,
            max_bounces: self.max_bounces + o.max_bounces,
            numeric_failure: self.numeric_failure + o.numeric_failure,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BadSetReport<T> {
    pub x: Vec3<T>,
    pub phi: T,
    pub epsilon_graze: T,
    pub length: T,
    pub n_samples: usize,
    pub bad: usize,
    pub fraction: f64,
    /// Normal-approximation 95% half-width, `1.96 √(p(1−p)/n)`.
    pub ci95: f64,
    pub breakdown: Breakdown,
    /// Largest bounce count among samples that were not flagged.
    pub max_bounces_good: usize,
}

#[derive(Default, Clone, Copy)]
struct Tally {
    bad: usize,
    breakdown: Breakdown,
    max_good: usize,
}

impl Tally {
    fn merge(self, o: Self) -> Self {
        Self { bad: self.bad + o.bad, breakdown: self.breakdown.merge(o.breakdown), max_good: self.max_good.max(o.max_good) }
    }
}

/// Direction (and speed) of sample `index`, drawn from its own stream.
pub(crate) fn sample_velocity<T: Scalar>(seed: u64, index: u64, speed_band: Option<(T, T)>) -> Vec3<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let dir = loop {
        let g: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
        let n = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
        if n > 1e-12 {
            break Vec3::<T>::from_f64([g[0] / n, g[1] / n, g[2] / n]);
        }
    };
    let speed = match speed_band {
        Some((lo, hi)) => lo + (hi - lo) * T::lit(rng.random::<f64>()),
        None => T::one(),
    };
    dir * speed
}

fn run_sample<T: Scalar>(domain: &ToroidalDomain<T>, cfg: &BadSetConfig<T>, index: usize) -> Tally {
    let v = sample_velocity(cfg.seed, index as u64, cfg.speed_band);
    let mut b = Breakdown::default();
    let v_hat = v.normalized().unwrap_or(v);
    match ring_membership(domain, cfg.x, v_hat, &cfg.rings) {
        Ok(flags) => {
            if flags.iter().any(|&f| f) {
                b.ring_excluded = 1;
            }
        }
        Err(_) => b.numeric_failure = 1,
    }
    let mut bounces = 0;
    match backward_cycles(domain, PhaseState::new(cfg.x, v, T::zero()), Budget::Length(cfg.length), cfg.caps) {
        Ok(traj) => {
            bounces = traj.events.len();
            let min_dot = traj.events.iter().map(|e| e.normal_dot.abs()).fold(T::infinity(), T::min);
            if min_dot < cfg.eps_graze {
                b.near_grazing = 1;
            }
            match traj.status {
                TrajectoryStatus::StoppedAtInflectionMinus => b.inflection_stop = 1,
                TrajectoryStatus::MaxBouncesReached => b.max_bounces = 1,
                TrajectoryStatus::GrazingAmbiguous | TrajectoryStatus::StuckConvexGrazing => b.near_grazing = 1,
                _ => {}
            }
        }
        Err(_) => b.numeric_failure = 1,
    }
    let bad = b != Breakdown::default();
    Tally { bad: usize::from(bad), breakdown: b, max_good: if bad { 0 } else { bounces } }
}

/// Monte Carlo estimate of the direction measure of phases at `cfg.x` whose
/// backward trajectory up to length `cfg.length` comes within `eps_graze` of
/// grazing, stops at an inflection phase, hits the bounce cap, or lies in one
/// of the configured rings.
///
/// Sample `i` draws from the ChaCha stream `i` of `seed`, so the result does
/// not depend on the worker count.
pub fn badset_measure<T: Scalar>(domain: &ToroidalDomain<T>, cfg: &BadSetConfig<T>) -> Result<BadSetReport<T>> {
    if cfg.n_samples < MIN_SAMPLES {
        return Err(Error::Precondition(format!("badset_measure needs at least {MIN_SAMPLES} samples")));
    }
    PhaseState::new(cfg.x, Vec3::new(T::one(), T::zero(), T::zero()), T::zero()).validate(domain)?;
    let work = || (0..cfg.n_samples).into_par_iter().map(|i| run_sample(domain, cfg, i)).reduce(Tally::default, Tally::merge);
    let tally = if cfg.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?
            .install(work)
    } else {
        work()
    };
    let n = cfg.n_samples as f64;
    let p = tally.bad as f64 / n;
    Ok(BadSetReport {
        x: cfg.x,
        phi: cfg.phi,
        epsilon_graze: cfg.eps_graze,
        length: cfg.length,
        n_samples: cfg.n_samples,
        bad: tally.bad,
        fraction: p,
        ci95: 1.96 * (p * (1.0 - p) / n).sqrt(),
        breakdown: tally.breakdown,
        max_bounces_good: tally.max_good,
    })
}
