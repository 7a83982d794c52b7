//! Diagnostics built on top of the engine: bounce counts, recurrence
//! residuals, ring membership, Monte Carlo bad-set estimates and
//! finite-difference Jacobians.

mod badset;
mod jacobian;
mod recurrence;
mod rings;

pub use badset::{badset_measure, BadSetConfig, BadSetReport, Breakdown};
pub use jacobian::{jacobian_det, specular_basis, JacobianReport};
pub use recurrence::{recurrence_residuals, tangent_launch, RecurrenceOptions, RecurrenceRecord};
pub use rings::{cross_section_components, reference_omega, ring_membership, RingKind, RingSpec};

use crate::domain::ToroidalDomain;
use crate::engine::{backward_cycles, Budget, Caps, PhaseState, TrajectoryStatus};
use crate::error::Result;
use crate::scalar::Scalar;
use crate::vec3::Vec3;

/// Number of backward bounces within path length `L` before any entering
/// inflection stop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BounceCount {
    pub n: usize,
    /// The bounce cap was hit before the length budget ran out.
    pub capped: bool,
}

pub fn bounce_count<T: Scalar>(domain: &ToroidalDomain<T>, x: Vec3<T>, v: Vec3<T>, length: T, caps: Caps<T>) -> Result<BounceCount> {
    let traj = backward_cycles(domain, PhaseState::new(x, v, T::zero()), Budget::Length(length), caps)?;
    Ok(BounceCount { n: traj.count_within(length), capped: traj.status == TrajectoryStatus::MaxBouncesReached })
}
