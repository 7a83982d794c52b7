use crate::domain::ToroidalDomain;
use crate::engine::{PhaseState, Trajectory};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecurrenceOptions<T> {
    /// Steps with `|Δτ|` or `|Δφ|` at or above this are discarded.
    pub gate: T,
    /// Keep only steps whose three bounce points lie in
    /// `[τ₁* + ε, τ₂* − ε]` and at least `ε` away from the zeros of `h`.
    pub inner_only: bool,
    pub epsilon: T,
}

impl<T: Scalar> Default for RecurrenceOptions<T> {
    fn default() -> Self {
        Self { gate: T::lit(0.1), inner_only: false, epsilon: T::lit(0.05) }
    }
}

/// Residuals for the pair of steps `i → i+1 → i+2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecurrenceRecord<T> {
    pub index: usize,
    pub d_tau: T,
    pub d_phi: T,
    pub d_tau_next: T,
    pub d_phi_next: T,
    /// `|Δφᵢ| / |Δτᵢ|`.
    pub r1: T,
    /// `|Δτᵢ₊₁ − Δτᵢ| / (Δτᵢ² + Δτᵢ₊₁² + Δφᵢ² + Δφᵢ₊₁²)`.
    pub r2: T,
}

/// Per-step recurrence residuals along the bounce sequence of `traj`.
pub fn recurrence_residuals<T: Scalar>(
    domain: &ToroidalDomain<T>,
    traj: &Trajectory<T>,
    opts: RecurrenceOptions<T>,
) -> Vec<RecurrenceRecord<T>> {
    let ev: Vec<_> = traj.events.iter().filter(|e| e.tau.is_finite()).collect();
    if ev.len() < 3 {
        return Vec::new();
    }
    let period = domain.profile().period();
    let half = period * T::half();
    let d_tau = |a: T, b: T| {
        let mut d = (b - a) % period;
        if d > half {
            d -= period;
        } else if d <= -half {
            d += period;
        }
        d
    };
    let markers = domain.markers();
    let admissible = |tau: T| !opts.inner_only || (markers.in_inner_by(tau, opts.epsilon) && markers.dist_to_z_h(tau) > opts.epsilon);

    let mut out = Vec::new();
    for i in 0..ev.len() - 2 {
        let (a, b, c) = (ev[i], ev[i + 1], ev[i + 2]);
        if !(admissible(a.tau) && admissible(b.tau) && admissible(c.tau)) {
            continue;
        }
        let dt0 = d_tau(a.tau, b.tau);
        let dt1 = d_tau(b.tau, c.tau);
        let dp0 = b.phi - a.phi;
        let dp1 = c.phi - b.phi;
        let small = |x: T| x.abs() < opts.gate;
        if !(small(dt0) && small(dt1) && small(dp0) && small(dp1)) || dt0 == T::zero() {
            continue;
        }
        let denom = dt0 * dt0 + dt1 * dt1 + dp0 * dp0 + dp1 * dp1;
        out.push(RecurrenceRecord {
            index: i,
            d_tau: dt0,
            d_phi: dp0,
            d_tau_next: dt1,
            d_phi_next: dp1,
            r1: dp0.abs() / dt0.abs(),
            r2: (dt1 - dt0).abs() / denom,
        });
    }
    out
}

/// Boundary state at `σ(τ, φ)` moving almost tangentially: the tangent
/// direction `cos β t̂ + sin β φ̂` (with `t̂` the meridian tangent) tilted
/// inward by `α`.
pub fn tangent_launch<T: Scalar>(domain: &ToroidalDomain<T>, tau: T, phi: T, alpha: T, beta: T) -> PhaseState<T> {
    let t = domain.meridian_tangent(tau, phi);
    let ph = ToroidalDomain::phi_hat(phi);
    let n = domain.outward_normal(tau, phi);
    let u = t * beta.cos() + ph * beta.sin();
    PhaseState::new(domain.sigma(tau, phi), u * alpha.cos() - n * alpha.sin(), T::zero())
}
