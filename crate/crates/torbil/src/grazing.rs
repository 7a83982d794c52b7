//! Tangential boundary phases: principal and normal curvatures, inflection
//! directions and the sign-ladder classifier.

use serde::{Deserialize, Serialize};

use crate::domain::ToroidalDomain;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::vec3::Vec3;

/// Default exclusion half-width around the zeros of `h`, in `τ`.
pub const Z_H_BAND: f64 = 1e-3;
/// First rung of the sign ladder, as a fraction of the local curvature radius.
pub const LADDER_BASE: f64 = 1e-2;
/// Number of rungs `s₀, s₀/2, s₀/4` that must agree.
pub const LADDER_RUNGS: usize = 3;
/// Tangency tolerance for [`normal_curvature`].
pub const TANGENT_TOL: f64 = 1e-10;

/// Kind of boundary phase `(x, v)`, named after the sets `γ₀^V`, `γ₀^C`, `γ₀^{I±}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GrazingClass {
    NonGrazing,
    ConvexGrazing,
    ConcaveGrazing,
    InflectionPlus,
    InflectionMinus,
}

impl GrazingClass {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::NonGrazing => "non_grazing",
            Self::ConvexGrazing => "convex",
            Self::ConcaveGrazing => "concave",
            Self::InflectionPlus => "inflection_plus",
            Self::InflectionMinus => "inflection_minus",
        }
    }

    /// Class of `(x, −v)` given the class of `(x, v)`.
    pub fn reversed(self) -> Self {
        match self {
            Self::InflectionPlus => Self::InflectionMinus,
            Self::InflectionMinus => Self::InflectionPlus,
            other => other,
        }
    }
}

/// The two zero-normal-curvature directions at an inner boundary point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InflectionDirections<T> {
    pub tau: T,
    pub phi: T,
    /// Angle of both directions against `φ̂`.
    pub theta: T,
    /// Classifies as [`GrazingClass::InflectionPlus`].
    pub i1: Vec3<T>,
    /// Classifies as [`GrazingClass::InflectionMinus`].
    pub i2: Vec3<T>,
}

impl<T: Scalar> InflectionDirections<T> {
    /// The pair reflected through the meridian plane, for negative angular
    /// momentum. Class labels are preserved.
    pub fn mirrored(&self) -> Self {
        let ph = ToroidalDomain::<T>::phi_hat(self.phi);
        let m = |v: Vec3<T>| v - ph * (T::two() * v.dot(ph));
        Self { i1: m(self.i1), i2: m(self.i2), ..*self }
    }
}

/// `(κ₁, κ₂) = (γ₂′/γ₁, κ)`, azimuthal and meridian principal curvatures.
/// Positive values bend the surface away from the exterior side.
pub fn principal_curvatures<T: Scalar>(domain: &ToroidalDomain<T>, tau: T) -> (T, T) {
    let j = domain.profile().jet(tau);
    (j.d1[1] / j.p[0], j.d2[0].hypot(j.d2[1]))
}

/// Euler's formula `κ₁ cos²ϑ_w + κ₂ sin²ϑ_w`, with `ϑ_w` the angle between the
/// unit tangent `w` and `φ̂`.
pub fn normal_curvature<T: Scalar>(domain: &ToroidalDomain<T>, tau: T, phi: T, w: Vec3<T>) -> Result<T> {
    let w = w.normalized().ok_or_else(|| Error::Precondition("zero tangent vector".into()))?;
    let n = domain.outward_normal(tau, phi);
    if n.dot(w).abs() > T::lit(TANGENT_TOL) {
        return Err(Error::Precondition(format!("direction not tangent: n.w = {:e}", n.dot(w).to_f64_lossy())));
    }
    let (k1, k2) = principal_curvatures(domain, tau);
    let c = w.dot(ToroidalDomain::phi_hat(phi));
    let c2 = c * c;
    Ok(k1 * c2 + k2 * (T::one() - c2))
}

/// Normal curvature from the indicator's Hessian, `wᵀ∇²ξ w / |∇ξ|`.
pub fn normal_curvature_hessian<T: Scalar>(domain: &ToroidalDomain<T>, p: Vec3<T>, w: Vec3<T>) -> T {
    let h = domain.hessian_xi(p);
    let g = domain.grad_xi(p);
    let w = [w.x, w.y, w.z];
    let mut q = T::zero();
    for i in 0..3 {
        for j in 0..3 {
            q += w[i] * h[i][j] * w[j];
        }
    }
    q / g.norm()
}

/// Both candidate directions `cos ϑ φ̂ ± sin ϑ z̃` with `z̃` the meridian tangent
/// pointing toward decreasing `τ`.
fn candidate_pair<T: Scalar>(domain: &ToroidalDomain<T>, tau: T, phi: T) -> (T, Vec3<T>, Vec3<T>) {
    let j = domain.profile().jet(tau);
    let kappa = j.d2[0].hypot(j.d2[1]);
    let theta = (j.d1[1].abs() / (kappa * j.p[0])).sqrt().atan();
    let ph = ToroidalDomain::phi_hat(phi);
    let zt = -domain.meridian_tangent(tau, phi);
    let (s, c) = theta.sin_cos();
    (theta, ph * c + zt * s, ph * c - zt * s)
}

/// Angles and directions of the formal pair without any classification.
///
/// On the zeros of `h` the pair still exists as a pair of angles but neither
/// member is an inflection grazing direction. The first direction carries the
/// `+ sin ϑ` meridian component.
pub fn formal_directions<T: Scalar>(domain: &ToroidalDomain<T>, tau: T, phi: T) -> Result<(T, Vec3<T>, Vec3<T>)> {
    if !domain.markers().in_inner(tau) {
        return Err(Error::UndefinedInflection { tau: tau.to_f64_lossy(), reason: "outside the inner arc" });
    }
    Ok(candidate_pair(domain, tau, phi))
}

/// `I¹`, `I²` at `σ(τ, φ)` with the default `Z_h` band.
pub fn inflection_directions<T: Scalar>(domain: &ToroidalDomain<T>, tau: T, phi: T) -> Result<InflectionDirections<T>> {
    inflection_directions_with(domain, tau, phi, T::lit(Z_H_BAND))
}

/// `I¹`, `I²` at `σ(τ, φ)`, refusing parameters within `delta_z` of `Z_h`.
///
/// Labels are assigned from the sign ladder, shrinking the rungs until the
/// cubic term of the tangent-plane section dominates.
pub fn inflection_directions_with<T: Scalar>(domain: &ToroidalDomain<T>, tau: T, phi: T, delta_z: T) -> Result<InflectionDirections<T>> {
    let (theta, plus, minus) = formal_directions(domain, tau, phi)?;
    if domain.markers().dist_to_z_h(tau) <= delta_z {
        return Err(Error::UndefinedInflection { tau: tau.to_f64_lossy(), reason: "inside the Z_h exclusion band" });
    }
    let x = domain.sigma(tau, phi);
    let s0 = ladder_base(domain, tau);
    for shrink in 0..24 {
        let s = s0 / T::lit(2f64.powi(shrink));
        match ladder_at(domain, x, plus, s) {
            Some(GrazingClass::InflectionPlus) => {
                return Ok(InflectionDirections { tau, phi, theta, i1: plus, i2: minus });
            }
            Some(GrazingClass::InflectionMinus) => {
                return Ok(InflectionDirections { tau, phi, theta, i1: minus, i2: plus });
            }
            _ => continue,
        }
    }
    Err(Error::UndefinedInflection { tau: tau.to_f64_lossy(), reason: "sign ladder never resolved the cubic regime" })
}

/// Normalized `η I¹ + (1 − η) I²` for `η ∈ (0, 1)`, falling back to the
/// formal pair on the `Z_h` band.
pub fn concave_direction<T: Scalar>(domain: &ToroidalDomain<T>, tau: T, phi: T, eta: T) -> Result<Vec3<T>> {
    if !(eta > T::zero() && eta < T::one()) {
        return Err(Error::Domain(format!("eta must lie in (0, 1), got {eta}")));
    }
    let (i1, i2) = match inflection_directions(domain, tau, phi) {
        Ok(d) => (d.i1, d.i2),
        Err(Error::UndefinedInflection { reason: "inside the Z_h exclusion band", .. }) => {
            let (_, a, b) = formal_directions(domain, tau, phi)?;
            (a, b)
        }
        Err(e) => return Err(e),
    };
    (i1 * eta + i2 * (T::one() - eta)).normalized().ok_or(Error::DegenerateBasis)
}

fn ladder_base<T: Scalar>(domain: &ToroidalDomain<T>, tau: T) -> T {
    let (k1, k2) = principal_curvatures(domain, tau);
    T::lit(LADDER_BASE) / k1.abs().max(k2)
}

fn class_of_signs(fwd_out: bool, bwd_out: bool) -> GrazingClass {
    match (fwd_out, bwd_out) {
        (false, false) => GrazingClass::ConcaveGrazing,
        (true, true) => GrazingClass::ConvexGrazing,
        (true, false) => GrazingClass::InflectionPlus,
        (false, true) => GrazingClass::InflectionMinus,
    }
}

/// Class agreed on by all rungs `s, s/2, s/4`, or `None` when they disagree.
fn ladder_at<T: Scalar>(domain: &ToroidalDomain<T>, x: Vec3<T>, v_hat: Vec3<T>, s: T) -> Option<GrazingClass> {
    let mut agreed = None;
    let mut step = s;
    for _ in 0..LADDER_RUNGS {
        let f = domain.xi(x + v_hat * step) > T::zero();
        let b = domain.xi(x - v_hat * step) > T::zero();
        let c = class_of_signs(f, b);
        match agreed {
            None => agreed = Some(c),
            Some(prev) if prev != c => return None,
            _ => {}
        }
        step *= T::half();
    }
    agreed
}

/// Classifies a tangential phase `(x, v)` by sampling `ξ(x ± s v̂)`.
///
/// Callers are expected to have checked `|n·v̂|` against their grazing
/// threshold; this function always returns one of the four grazing classes.
pub fn classify<T: Scalar>(domain: &ToroidalDomain<T>, x: Vec3<T>, v: Vec3<T>) -> Result<GrazingClass> {
    let v_hat = v.normalized().ok_or_else(|| Error::Precondition("zero velocity".into()))?;
    let tau = domain.nearest_param(x.rho(), x.z)?;
    let s0 = ladder_base(domain, tau);
    ladder_at(domain, x, v_hat, s0).ok_or(Error::GrazingAmbiguous { s: s0.to_f64_lossy() })
}

/// [`classify`] gated by `|n·v̂| < threshold`; returns `NonGrazing` otherwise.
pub fn classify_phase<T: Scalar>(domain: &ToroidalDomain<T>, x: Vec3<T>, v: Vec3<T>, threshold: T) -> Result<GrazingClass> {
    let v_hat = v.normalized().ok_or_else(|| Error::Precondition("zero velocity".into()))?;
    let n = domain.grad_xi(x).normalized().ok_or_else(|| Error::Precondition("indicator gradient vanishes".into()))?;
    if n.dot(v_hat).abs() >= threshold {
        return Ok(GrazingClass::NonGrazing);
    }
    classify(domain, x, v_hat)
}
