//! Billiards in toroidal domains obtained by revolving a convex planar curve
//! about the z-axis.
//!
//! The numerics are generic over [`Scalar`] (implemented for `f32` and `f64`);
//! the aliases at the crate root fix the scalar to `f64`.
//!
//! ```
//! use torbil::{Budget, Caps, Domain, PhaseState, Vec3f};
//!
//! let torus = Domain::circle_torus(2.0, 1.0).unwrap();
//! let s3 = 3f64.sqrt();
//! let start = PhaseState::new(Vec3f::new(3.0, 0.0, 0.0), Vec3f::new(-s3 / 2.0, 0.5, 0.0), 0.0);
//! let run = torbil::engine::forward_cycles(&torus, start, Budget::Length(9.0 * s3 + 1e-9), Caps::default()).unwrap();
//! assert_eq!(run.events.len(), 3);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod domain;
pub mod engine;
pub mod error;
pub mod grazing;
pub mod ortho;
pub mod profile;
pub mod scalar;
pub mod vec3;

pub use domain::{IndicatorKind, PointClass, ToroidalDomain};
pub use engine::{Budget, Caps, Direction, PhaseState, TrajectoryStatus};
pub use error::{Error, Result};
pub use grazing::GrazingClass;
pub use profile::{CurveMarkers, ProfileCurve};
pub use scalar::Scalar;
pub use vec3::Vec3;

pub type Vec3f = Vec3<f64>;
pub type Profile = ProfileCurve<f64>;
pub type Domain = ToroidalDomain<f64>;
pub type Markers = CurveMarkers<f64>;
pub type State = PhaseState<f64>;
pub type Trajectory = engine::Trajectory<f64>;
pub type BounceEvent = engine::BounceEvent<f64>;
pub type InflectionDirections = grazing::InflectionDirections<f64>;
pub type BadSetConfig = analysis::BadSetConfig<f64>;
pub type BadSetReport = analysis::BadSetReport<f64>;
pub type RingSpec = analysis::RingSpec<f64>;
pub type Annulus = ortho::AnnulusChart<f64>;
