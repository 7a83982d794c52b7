use serde::{Deserialize, Serialize};

use crate::domain::ToroidalDomain;
use crate::error::{Error, Result};
use crate::grazing::Z_H_BAND;
use crate::scalar::Scalar;
use crate::vec3::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RingKind<T> {
    /// `|ω_ref(τ_ref) − ω(x, v)| < ε`.
    AngularMomentum { tau_ref: T },
    /// `|v_φ| < ε`.
    Perp,
    /// `|v_φ| > 1 − ε`.
    AzimuthAligned,
    /// `||v_x| − |v_y|| < ε`.
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingSpec<T> {
    #[serde(flatten)]
    pub kind: RingKind<T>,
    pub epsilon: T,
}

/// `(v_x, v_φ, v_y)`: radial, azimuthal and axial components of `v` at `x`.
pub fn cross_section_components<T: Scalar>(x: Vec3<T>, v: Vec3<T>) -> (T, T, T) {
    let rho = x.rho();
    let (c, s) = if rho > T::zero() { (x.x / rho, x.y / rho) } else { (T::one(), T::zero()) };
    (v.x * c + v.y * s, -v.x * s + v.y * c, v.z)
}

/// Angular momentum `γ₁ cos ϑ` of the unit inflection direction at `τ_ref`,
/// for `τ_ref` in the closed inner arc and away from the zeros of `h`.
pub fn reference_omega<T: Scalar>(domain: &ToroidalDomain<T>, tau_ref: T) -> Result<T> {
    let m = domain.markers();
    let u = m.unwrap_inner(tau_ref);
    if u > m.tau2_star {
        return Err(Error::UndefinedInflection { tau: tau_ref.to_f64_lossy(), reason: "outside the inner arc" });
    }
    if m.dist_to_z_h(tau_ref) <= T::lit(Z_H_BAND) {
        return Err(Error::UndefinedInflection { tau: tau_ref.to_f64_lossy(), reason: "inside the Z_h exclusion band" });
    }
    let j = domain.profile().jet(tau_ref);
    let kappa = j.d2[0].hypot(j.d2[1]);
    let theta = (j.d1[1].abs() / (kappa * j.p[0])).sqrt().atan();
    Ok(j.p[0] * theta.cos())
}

/// Membership of the unit direction `v` at `x` in each ring.
pub fn ring_membership<T: Scalar>(domain: &ToroidalDomain<T>, x: Vec3<T>, v: Vec3<T>, specs: &[RingSpec<T>]) -> Result<Vec<bool>> {
    let (vx, vphi, vy) = cross_section_components(x, v);
    specs
        .iter()
        .map(|spec| {
            let eps = spec.epsilon;
            Ok(match spec.kind {
                RingKind::AngularMomentum { tau_ref } => {
                    let omega = crate::engine::angular_momentum(x, v);
                    (reference_omega(domain, tau_ref)? - omega).abs() < eps
                }
                RingKind::Perp => vphi.abs() < eps,
                RingKind::AzimuthAligned => vphi.abs() > T::one() - eps,
                RingKind::Symmetric => (vx.abs() - vy.abs()).abs() < eps,
            })
        })
        .collect()
}
