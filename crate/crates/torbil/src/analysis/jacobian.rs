use crate::domain::ToroidalDomain;
use crate::engine::{backward_cycles, Budget, Caps, PhaseState};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::vec3::Vec3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianReport<T> {
    /// `det ∂X(s; t, x, v)/∂v` by central differences with step `h`.
    pub det: T,
    /// The same with step `h/2`.
    pub det_half: T,
    /// `|det − det_half| / |det_half|`.
    pub rel_spread: T,
    /// Bounces of the base trajectory on `[s, t]`.
    pub bounces: usize,
}

fn position_at<T: Scalar>(domain: &ToroidalDomain<T>, state: PhaseState<T>, s: T, caps: Caps<T>) -> Result<(Vec3<T>, usize, Vec<T>)> {
    let traj = backward_cycles(domain, state, Budget::Time(state.t - s), caps)?;
    if traj.status.is_frozen() {
        return Err(Error::Stopped(traj.status.as_str().into()));
    }
    let times = traj.events.iter().map(|e| e.t).collect();
    Ok((traj.end.x, traj.events.len(), times))
}

fn det3<T: Scalar>(c: [Vec3<T>; 3]) -> T {
    c[0].dot(c[1].cross(c[2]))
}

fn central_matrix<T: Scalar>(
    domain: &ToroidalDomain<T>,
    state: PhaseState<T>,
    s: T,
    h: T,
    base: usize,
    caps: Caps<T>,
) -> Result<[Vec3<T>; 3]> {
    let axes =
        [Vec3::new(T::one(), T::zero(), T::zero()), Vec3::new(T::zero(), T::one(), T::zero()), Vec3::new(T::zero(), T::zero(), T::one())];
    let mut cols = [Vec3::zero(); 3];
    for (j, e) in axes.iter().enumerate() {
        let (xp, np, _) = position_at(domain, PhaseState { v: state.v + *e * h, ..state }, s, caps)?;
        let (xm, nm, _) = position_at(domain, PhaseState { v: state.v - *e * h, ..state }, s, caps)?;
        for n in [np, nm] {
            if n != base {
                return Err(Error::NonSmoothPoint { base, perturbed: n });
            }
        }
        cols[j] = (xp - xm) / (h + h);
    }
    Ok(cols)
}

/// Finite-difference determinant of `v ↦ X(s; t, x, v)` for `s ≤ t`.
///
/// Fails with [`Error::NonSmoothPoint`] when any perturbed trajectory has a
/// different bounce count from the base one, and with a precondition error
/// when `s` lies within `10 h |v|` of a base bounce time.
pub fn jacobian_det<T: Scalar>(domain: &ToroidalDomain<T>, state: PhaseState<T>, s: T, h: T, caps: Caps<T>) -> Result<JacobianReport<T>> {
    if !(s <= state.t) || !(h > T::zero()) {
        return Err(Error::Precondition("jacobian_det needs s <= t and h > 0".into()));
    }
    let (_, base, _) = position_at(domain, state, s, caps)?;
    let guard = T::lit(10.0) * h * state.v.norm();
    let (_, _, times) = position_at(domain, state, s - guard, caps)?;
    if times.iter().any(|&tk| (tk - s).abs() <= guard) {
        return Err(Error::Precondition("evaluation time too close to a bounce".into()));
    }
    let det = det3(central_matrix(domain, state, s, h, base, caps)?);
    let det_half = det3(central_matrix(domain, state, s, h * T::half(), base, caps)?);
    let scale = det_half.abs().max(T::min_positive_value());
    Ok(JacobianReport { det, det_half, rel_spread: (det - det_half).abs() / scale, bounces: base })
}

/// Orthonormal frame `(v̂, normalize(v̂ × φ̂), v̂ × e⊥₁)` at a bounce point.
pub fn specular_basis<T: Scalar>(domain: &ToroidalDomain<T>, x_k: Vec3<T>, v_k: Vec3<T>, graze_threshold: T) -> Result<[Vec3<T>; 3]> {
    let e0 = v_k.normalized().ok_or_else(|| Error::Precondition("zero velocity".into()))?;
    let n = domain.grad_xi(x_k).normalized().ok_or_else(|| Error::Precondition("indicator gradient vanishes".into()))?;
    if n.dot(e0).abs() < graze_threshold {
        return Err(Error::Precondition("specular basis needs a non-grazing bounce".into()));
    }
    let c = e0.cross(ToroidalDomain::phi_hat(x_k.azimuth()));
    if c.norm() < T::lit(1e-12) {
        return Err(Error::DegenerateBasis);
    }
    let e1 = c / c.norm();
    Ok([e0, e1, e0.cross(e1)])
}
