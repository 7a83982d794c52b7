//! Generator curves in the meridian half-plane.
//!
//! A profile is a closed, positively oriented, strictly convex curve
//! `γ(τ) = (γ₁, γ₂)` in the `(ρ, z)` half-plane with `γ₁ > 0`, parametrized by
//! arc length over a half-open period `[a, b)`. Revolving it about the z-axis
//! gives the boundary of the solid torus handled by [`crate::domain`].

use std::fmt::Debug;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{wrap_into, Scalar};

/// Default number of scan points per period used by root searches.
pub const DEFAULT_SCAN_POINTS: usize = 4096;
/// Bisection stops once the bracket is narrower than this.
pub const ROOT_TOL: f64 = 1e-12;
/// Allowed defect in `|γ′|² = 1`.
pub const UNIT_SPEED_TOL: f64 = 1e-10;
/// Central-difference step for `κ′` when no third derivative is supplied.
pub const KAPPA_PRIME_STEP: f64 = 1e-6;

/// Value and derivatives of a planar curve at one parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<T> {
    pub p: [T; 2],
    pub d1: [T; 2],
    pub d2: [T; 2],
    pub d3: Option<[T; 2]>,
}

/// Plug-in evaluator for a unit-speed generator.
///
/// Implementations must be periodic over [`interval`](Self::interval); callers
/// always pass parameters already wrapped into it.
pub trait ProfileEvaluator<T: Scalar>: Send + Sync + Debug {
    fn interval(&self) -> (T, T);
    fn jet(&self, tau: T) -> Jet<T>;
}

/// A closed parametric curve with arbitrary (nonvanishing) speed.
pub trait RawCurve<T: Scalar>: Send + Sync + Debug {
    fn interval(&self) -> (T, T);
    fn point(&self, t: T) -> [T; 2];
    fn d1(&self, t: T) -> [T; 2];
    fn d2(&self, t: T) -> [T; 2];
    fn d3(&self, t: T) -> Option<[T; 2]> {
        let _ = t;
        None
    }
}

#[inline]
fn cross2<T: Scalar>(a: [T; 2], b: [T; 2]) -> T {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
fn dot2<T: Scalar>(a: [T; 2], b: [T; 2]) -> T {
    a[0] * b[0] + a[1] * b[1]
}

/// Scales a documented f64 tolerance up to something meaningful for `T`.
pub(crate) fn tol<T: Scalar>(x: f64) -> T {
    T::lit(x).max(T::epsilon() * T::lit(128.0))
}

// ---------------------------------------------------------------------------
// Built-in curves
// ---------------------------------------------------------------------------

/// Circle of radius `r` centred at `(R, 0)`, with `τ = 0` on the outer equator.
#[derive(Debug, Clone, Copy)]
pub struct CircleEvaluator<T> {
    pub center: T,
    pub radius: T,
}

impl<T: Scalar> ProfileEvaluator<T> for CircleEvaluator<T> {
    fn interval(&self) -> (T, T) {
        (T::zero(), T::TAU() * self.radius)
    }

    fn jet(&self, tau: T) -> Jet<T> {
        let r = self.radius;
        let (s, c) = (tau / r).sin_cos();
        Jet { p: [self.center + r * c, r * s], d1: [-s, c], d2: [-c / r, -s / r], d3: Some([s / (r * r), -c / (r * r)]) }
    }
}

/// Ellipse `(c + a cos t, b sin t)` in its angular parameter.
#[derive(Debug, Clone, Copy)]
pub struct RawEllipse<T> {
    pub center: T,
    pub semi_rho: T,
    pub semi_z: T,
}

impl<T: Scalar> RawCurve<T> for RawEllipse<T> {
    fn interval(&self) -> (T, T) {
        (T::zero(), T::TAU())
    }
    fn point(&self, t: T) -> [T; 2] {
        let (s, c) = t.sin_cos();
        [self.center + self.semi_rho * c, self.semi_z * s]
    }
    fn d1(&self, t: T) -> [T; 2] {
        let (s, c) = t.sin_cos();
        [-self.semi_rho * s, self.semi_z * c]
    }
    fn d2(&self, t: T) -> [T; 2] {
        let (s, c) = t.sin_cos();
        [-self.semi_rho * c, -self.semi_z * s]
    }
    fn d3(&self, t: T) -> Option<[T; 2]> {
        let (s, c) = t.sin_cos();
        Some([self.semi_rho * s, -self.semi_z * c])
    }
}

/// Truncated Fourier series curve
/// `ρ(t) = ρ₀ + Σ aₖ cos kt + bₖ sin kt`, `z(t) = z₀ + Σ cₖ cos kt + dₖ sin kt`.
///
/// This is the `custom` curve family of the CLI.
#[derive(Debug, Clone)]
pub struct FourierCurve<T> {
    pub rho0: T,
    pub z0: T,
    /// `(aₖ, bₖ)` for k = 1, 2, ...
    pub rho_coeffs: Vec<(T, T)>,
    /// `(cₖ, dₖ)` for k = 1, 2, ...
    pub z_coeffs: Vec<(T, T)>,
}

impl<T: Scalar> FourierCurve<T> {
    fn series(&self, t: T, order: u32) -> [T; 2] {
        let eval = |c0: T, coeffs: &[(T, T)]| {
            let mut acc = if order == 0 { c0 } else { T::zero() };
            for (i, &(a, b)) in coeffs.iter().enumerate() {
                let k = T::from_usize_lossy(i + 1);
                let (s, c) = (k * t).sin_cos();
                let kp = k.powi(order as i32);
                // d^n/dt^n of a cos kt + b sin kt cycles with period 4.
                let term = match order % 4 {
                    0 => a * c + b * s,
                    1 => -a * s + b * c,
                    2 => -a * c - b * s,
                    _ => a * s - b * c,
                };
                acc += kp * term;
            }
            acc
        };
        [eval(self.rho0, &self.rho_coeffs), eval(self.z0, &self.z_coeffs)]
    }
}

impl<T: Scalar> RawCurve<T> for FourierCurve<T> {
    fn interval(&self) -> (T, T) {
        (T::zero(), T::TAU())
    }
    fn point(&self, t: T) -> [T; 2] {
        self.series(t, 0)
    }
    fn d1(&self, t: T) -> [T; 2] {
        self.series(t, 1)
    }
    fn d2(&self, t: T) -> [T; 2] {
        self.series(t, 2)
    }
    fn d3(&self, t: T) -> Option<[T; 2]> {
        Some(self.series(t, 3))
    }
}

// ---------------------------------------------------------------------------
// Arc-length reparametrization
// ---------------------------------------------------------------------------

const GL8_NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL8_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

const ARC_TABLE_CELLS: usize = 1024;

/// Unit-speed view of a [`RawCurve`], built from a cumulative Gauss–Legendre
/// arc-length table and Newton inversion inside each cell.
#[derive(Debug)]
pub struct ArcLengthEvaluator<T: Scalar> {
    raw: Arc<dyn RawCurve<T>>,
    t0: T,
    dt: T,
    cumulative: Vec<T>,
}

impl<T: Scalar> ArcLengthEvaluator<T> {
    fn speed(&self, t: T) -> T {
        let d = self.raw.d1(t);
        d[0].hypot(d[1])
    }

    fn integrate(&self, lo: T, hi: T) -> T {
        let half = (hi - lo) * T::half();
        let mid = (hi + lo) * T::half();
        GL8_NODES
            .iter()
            .zip(GL8_WEIGHTS.iter())
            .map(|(&x, &w)| T::lit(w) * self.speed(mid + half * T::lit(x)))
            .fold(T::zero(), |a, b| a + b)
            * half
    }

    fn period(&self) -> T {
        *self.cumulative.last().expect("non-empty table")
    }

    /// Raw parameter at arc length `tau ∈ [0, period)`.
    fn raw_param(&self, tau: T) -> T {
        let idx = self.cumulative.partition_point(|&s| s <= tau).saturating_sub(1).min(ARC_TABLE_CELLS - 1);
        let lo = self.t0 + self.dt * T::from_usize_lossy(idx);
        let s_lo = self.cumulative[idx];
        let cell_len = self.cumulative[idx + 1] - s_lo;
        let mut t = lo + self.dt * (tau - s_lo) / cell_len;
        let step_tol = T::epsilon() * T::lit(4.0) * (T::one() + t.abs());
        for _ in 0..12 {
            let f = s_lo + self.integrate(lo, t) - tau;
            let dt = f / self.speed(t);
            t -= dt;
            if dt.abs() <= step_tol {
                break;
            }
        }
        t
    }
}

impl<T: Scalar> ProfileEvaluator<T> for ArcLengthEvaluator<T> {
    fn interval(&self) -> (T, T) {
        (T::zero(), self.period())
    }

    fn jet(&self, tau: T) -> Jet<T> {
        let t = self.raw_param(tau);
        let u = self.raw.d1(t);
        let a = self.raw.d2(t);
        let m = u[0].hypot(u[1]);
        let tang = [u[0] / m, u[1] / m];
        let at = dot2(a, tang);
        let p = [a[0] - at * tang[0], a[1] - at * tang[1]];
        let m2 = m * m;
        let d2 = [p[0] / m2, p[1] / m2];
        let d3 = self.raw.d3(t).map(|j| {
            let tp = [p[0] / m, p[1] / m];
            let jt = dot2(j, tang);
            let atp = dot2(a, tp);
            let pp = [j[0] - (jt + atp) * tang[0] - at * tp[0], j[1] - (jt + atp) * tang[1] - at * tp[1]];
            let m3 = m2 * m;
            [(pp[0] / m2 - T::two() * p[0] * at / m3) / m, (pp[1] / m2 - T::two() * p[1] * at / m3) / m]
        });
        Jet { p: self.raw.point(t), d1: tang, d2, d3 }
    }
}

/// Reparametrizes a convex closed curve by arc length.
///
/// Fails with [`Error::NonConvex`] at the first scan point where the raw
/// curve turns clockwise, and with [`Error::Domain`] if it reaches the axis.
pub fn reparametrize_arclength<T: Scalar>(raw: Arc<dyn RawCurve<T>>) -> Result<ProfileCurve<T>> {
    let (t0, t1) = raw.interval();
    if !(t1 > t0) {
        return Err(Error::Domain("raw curve interval is empty".into()));
    }
    let scan = DEFAULT_SCAN_POINTS;
    let h = (t1 - t0) / T::from_usize_lossy(scan);
    for i in 0..scan {
        let t = t0 + h * T::from_usize_lossy(i);
        let c = cross2(raw.d1(t), raw.d2(t));
        if !(c > T::zero()) {
            let partial = ArcLengthEvaluator { raw: raw.clone(), t0, dt: t - t0, cumulative: vec![T::zero(), T::zero()] };
            let tau = if i == 0 { T::zero() } else { partial.integrate(t0, t) };
            return Err(Error::NonConvex { tau: tau.to_f64_lossy() });
        }
        if !(raw.point(t)[0] > T::zero()) {
            return Err(Error::Domain(format!("curve meets the rotation axis near raw parameter {}", t.to_f64_lossy())));
        }
    }

    let dt = (t1 - t0) / T::from_usize_lossy(ARC_TABLE_CELLS);
    let mut eval = ArcLengthEvaluator { raw, t0, dt, cumulative: Vec::with_capacity(ARC_TABLE_CELLS + 1) };
    let mut acc = T::zero();
    eval.cumulative.push(acc);
    for i in 0..ARC_TABLE_CELLS {
        let lo = t0 + dt * T::from_usize_lossy(i);
        acc += eval.integrate(lo, lo + dt);
        eval.cumulative.push(acc);
    }
    ProfileCurve::from_evaluator(Arc::new(eval))
}

// ---------------------------------------------------------------------------
// ProfileCurve
// ---------------------------------------------------------------------------

/// Which closed form, if any, the curve came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveShape<T> {
    Circle { center: T, radius: T },
    General,
}

/// Unit-speed, strictly convex generator curve.
#[derive(Debug, Clone)]
pub struct ProfileCurve<T: Scalar> {
    eval: Arc<dyn ProfileEvaluator<T>>,
    a: T,
    b: T,
    shape: CurveShape<T>,
    kappa_max: T,
}

impl<T: Scalar> ProfileCurve<T> {
    /// Circle of radius `r` about `(R, 0)`, requiring `0 < r < R`.
    pub fn circle(center: T, radius: T) -> Result<Self> {
        if !(radius > T::zero() && center > radius) {
            return Err(Error::Domain(format!("circle generator needs 0 < r < R (got R = {center}, r = {radius})")));
        }
        let eval = Arc::new(CircleEvaluator { center, radius });
        let (a, b) = eval.interval();
        Ok(Self { eval, a, b, shape: CurveShape::Circle { center, radius }, kappa_max: radius.recip() })
    }

    /// Arc-length ellipse with semi-axes `semi_rho` (radial) and `semi_z`.
    pub fn ellipse(center: T, semi_rho: T, semi_z: T) -> Result<Self> {
        if !(semi_rho > T::zero() && semi_z > T::zero() && center > semi_rho) {
            return Err(Error::Domain("ellipse generator needs positive semi-axes and center > semi_rho".into()));
        }
        reparametrize_arclength(Arc::new(RawEllipse { center, semi_rho, semi_z }))
    }

    /// Wraps a user evaluator after checking the unit-speed, convexity and
    /// positivity invariants on a scan grid.
    pub fn from_evaluator(eval: Arc<dyn ProfileEvaluator<T>>) -> Result<Self> {
        let (a, b) = eval.interval();
        if !(b > a) {
            return Err(Error::Domain("profile interval is empty".into()));
        }
        let mut curve = Self { eval, a, b, shape: CurveShape::General, kappa_max: T::zero() };
        curve.check_invariants(DEFAULT_SCAN_POINTS)?;
        let kmax = curve.scan_grid(DEFAULT_SCAN_POINTS).map(|t| curve.kappa_unchecked(t)).fold(T::zero(), T::max);
        curve.kappa_max = kmax;
        Ok(curve)
    }

    pub fn shape(&self) -> CurveShape<T> {
        self.shape
    }

    pub fn interval(&self) -> (T, T) {
        (self.a, self.b)
    }

    pub fn period(&self) -> T {
        self.b - self.a
    }

    /// Wraps `tau` into `[a, b)`.
    pub fn wrap(&self, tau: T) -> T {
        wrap_into(tau, self.a, self.period())
    }

    pub fn jet(&self, tau: T) -> Jet<T> {
        self.eval.jet(self.wrap(tau))
    }

    pub fn point(&self, tau: T) -> [T; 2] {
        self.jet(tau).p
    }

    pub fn d1(&self, tau: T) -> [T; 2] {
        self.jet(tau).d1
    }

    pub fn d2(&self, tau: T) -> [T; 2] {
        self.jet(tau).d2
    }

    /// Largest curvature found on the construction scan.
    pub fn kappa_max(&self) -> T {
        self.kappa_max
    }

    /// Radius of the largest osculating disc, used to size marching steps.
    pub fn inradius(&self) -> T {
        self.kappa_max.recip()
    }

    fn kappa_unchecked(&self, tau: T) -> T {
        let d2 = self.d2(tau);
        d2[0].hypot(d2[1])
    }

    /// Curvature `κ = |γ″|`, refusing parameters where unit speed fails.
    pub fn curvature(&self, tau: T) -> Result<T> {
        let j = self.jet(tau);
        let defect = (dot2(j.d1, j.d1) - T::one()).abs();
        if defect > tol::<T>(UNIT_SPEED_TOL) {
            return Err(Error::InvariantViolation { what: "unit speed", at: tau.to_f64_lossy(), defect: defect.to_f64_lossy() });
        }
        Ok(j.d2[0].hypot(j.d2[1]))
    }

    /// `κ′(τ)`, analytic when the evaluator supplies `γ‴`, otherwise a central
    /// difference with step [`KAPPA_PRIME_STEP`].
    pub fn curvature_prime(&self, tau: T) -> T {
        let j = self.jet(tau);
        match j.d3 {
            Some(d3) => dot2(j.d2, d3) / j.d2[0].hypot(j.d2[1]),
            None => {
                let h = T::lit(KAPPA_PRIME_STEP);
                (self.kappa_unchecked(tau + h) - self.kappa_unchecked(tau - h)) / (h + h)
            }
        }
    }

    /// `h(τ) = (γ₁′/γ₁)(γ₁κ + |γ₂′|) + |γ₂′|κ′/(3κ)`.
    pub fn h_value(&self, tau: T) -> T {
        let j = self.jet(tau);
        let kappa = j.d2[0].hypot(j.d2[1]);
        let kp = self.curvature_prime(tau);
        let g1 = j.p[0];
        let a2 = j.d1[1].abs();
        (j.d1[0] / g1) * (g1 * kappa + a2) + a2 * kp / (T::lit(3.0) * kappa)
    }

    fn scan_grid(&self, n: usize) -> impl Iterator<Item = T> + '_ {
        let h = self.period() / T::from_usize_lossy(n);
        (0..n).map(move |i| self.a + h * T::from_usize_lossy(i))
    }

    /// Checks unit speed, strict convexity, positivity and closure on `n`
    /// equally spaced parameters.
    pub fn check_invariants(&self, n: usize) -> Result<()> {
        let unit = tol::<T>(UNIT_SPEED_TOL);
        for tau in self.scan_grid(n) {
            let j = self.jet(tau);
            let defect = (dot2(j.d1, j.d1) - T::one()).abs();
            if defect > unit {
                return Err(Error::InvariantViolation { what: "unit speed", at: tau.to_f64_lossy(), defect: defect.to_f64_lossy() });
            }
            let c = cross2(j.d1, j.d2);
            if !(c > T::zero()) {
                return Err(Error::NonConvex { tau: tau.to_f64_lossy() });
            }
            if !(j.p[0] > T::zero()) {
                return Err(Error::InvariantViolation { what: "gamma_1 > 0", at: tau.to_f64_lossy(), defect: j.p[0].to_f64_lossy() });
            }
        }
        let pa = self.eval.jet(self.a).p;
        let pb = self.eval.jet(self.b).p;
        let gap = (pa[0] - pb[0]).hypot(pa[1] - pb[1]);
        if gap > tol::<T>(1e-9) {
            return Err(Error::InvariantViolation { what: "closure", at: self.b.to_f64_lossy(), defect: gap.to_f64_lossy() });
        }
        Ok(())
    }

    /// Mirror image under `z ↦ −z`, reparametrized to stay positively oriented.
    pub fn reflected_z(&self) -> Result<Self> {
        let inner = Arc::new(ReflectedZ { inner: self.eval.clone(), a: self.a, b: self.b });
        let mut out = Self::from_evaluator(inner)?;
        if let CurveShape::Circle { .. } = self.shape {
            out.kappa_max = self.kappa_max;
        }
        Ok(out)
    }
}

#[derive(Debug)]
struct ReflectedZ<T: Scalar> {
    inner: Arc<dyn ProfileEvaluator<T>>,
    a: T,
    b: T,
}

impl<T: Scalar> ProfileEvaluator<T> for ReflectedZ<T> {
    fn interval(&self) -> (T, T) {
        (self.a, self.b)
    }
    fn jet(&self, tau: T) -> Jet<T> {
        let s = wrap_into(self.a + self.b - tau, self.a, self.b - self.a);
        let j = self.inner.jet(s);
        Jet { p: [j.p[0], -j.p[1]], d1: [-j.d1[0], j.d1[1]], d2: [j.d2[0], -j.d2[1]], d3: j.d3.map(|d| [-d[0], d[1]]) }
    }
}

// ---------------------------------------------------------------------------
// Markers
// ---------------------------------------------------------------------------

/// Special parameters of a generator.
///
/// `tau2_star` may exceed the period end when the inner arc straddles the
/// parameter origin; use [`CurveMarkers::unwrap_inner`] to compare against it.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveMarkers<T> {
    pub tau1_star: T,
    pub tau2_star: T,
    pub lambda_star: T,
    pub z_h_zeros: Vec<T>,
    period: T,
}

impl<T: Scalar> CurveMarkers<T> {
    /// Representative of `tau` in `[τ₁*, τ₁* + period)`.
    pub fn unwrap_inner(&self, tau: T) -> T {
        wrap_into(tau, self.tau1_star, self.period)
    }

    /// True for `τ ∈ (τ₁*, τ₂*)` (open inner arc).
    pub fn in_inner(&self, tau: T) -> bool {
        let u = self.unwrap_inner(tau);
        u > self.tau1_star && u < self.tau2_star
    }

    /// True for `τ ∈ [τ₁* + ε, τ₂* − ε]`.
    pub fn in_inner_by(&self, tau: T, eps: T) -> bool {
        let u = self.unwrap_inner(tau);
        u >= self.tau1_star + eps && u <= self.tau2_star - eps
    }

    /// Distance from `tau` to the nearest listed zero of `h`.
    pub fn dist_to_z_h(&self, tau: T) -> T {
        let u = self.unwrap_inner(tau);
        self.z_h_zeros.iter().map(|&z| (u - z).abs()).fold(T::infinity(), T::min)
    }
}

/// Sign with zero counted as positive, so a crossing through an exact grid
/// zero is still seen once.
#[inline]
fn nonneg<T: Scalar>(x: T) -> bool {
    x >= T::zero()
}

fn bisect<T: Scalar>(f: impl Fn(T) -> T, mut lo: T, mut hi: T) -> T {
    let s_lo = nonneg(f(lo));
    let width = T::lit(ROOT_TOL).max(T::epsilon() * T::lit(4.0) * hi.abs().max(T::one()));
    for _ in 0..200 {
        if hi - lo <= width {
            break;
        }
        let mid = (lo + hi) * T::half();
        if nonneg(f(mid)) == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) * T::half()
}

/// All sign changes of `f` on `[lo, hi]` sampled at `n + 1` points, refined by
/// bisection.
fn sign_changes<T: Scalar>(f: impl Fn(T) -> T, lo: T, hi: T, n: usize) -> Vec<(T, bool)> {
    let h = (hi - lo) / T::from_usize_lossy(n);
    let mut out = Vec::new();
    let mut prev_t = lo;
    let mut prev = nonneg(f(lo));
    for i in 1..=n {
        let t = if i == n { hi } else { lo + h * T::from_usize_lossy(i) };
        let s = nonneg(f(t));
        if s != prev {
            out.push((bisect(&f, prev_t, t), s));
        }
        prev = s;
        prev_t = t;
    }
    out
}

/// Locates `τ₁*`, `τ₂*`, `λ*` and the zeros of `h` with the default grid.
pub fn find_markers<T: Scalar>(curve: &ProfileCurve<T>) -> Result<CurveMarkers<T>> {
    find_markers_with(curve, DEFAULT_SCAN_POINTS)
}

/// As [`find_markers`] with `grid` scan points per period.
pub fn find_markers_with<T: Scalar>(curve: &ProfileCurve<T>, grid: usize) -> Result<CurveMarkers<T>> {
    let (a, b) = curve.interval();
    let period = b - a;
    let g2 = |t: T| curve.d1(t)[1];
    let crossings = sign_changes(g2, a, b, grid);
    if crossings.len() != 2 {
        return Err(Error::NonConformingCurve(format!("gamma_2' must change sign exactly twice per period, found {}", crossings.len())));
    }
    let down = crossings.iter().find(|c| !c.1);
    let up = crossings.iter().find(|c| c.1);
    let (tau1, tau2) = match (down, up) {
        (Some(d), Some(u)) => (d.0, if u.0 > d.0 { u.0 } else { u.0 + period }),
        _ => return Err(Error::NonConformingCurve("gamma_2' zeros do not alternate".into())),
    };

    let inner_points = ((grid as f64) * ((tau2 - tau1) / period).to_f64_lossy()).ceil().max(16.0) as usize;
    let g1 = |t: T| curve.d1(t)[0];
    let g1_changes = sign_changes(g1, tau1, tau2, inner_points);
    let lambda = match g1_changes.as_slice() {
        [(l, true)] => *l,
        _ => {
            return Err(Error::NonConformingCurve(format!(
                "gamma_1' must go from negative to positive exactly once on the inner arc, found {} sign changes",
                g1_changes.len()
            )))
        }
    };

    let z_h_zeros = zero_set_h_between(curve, tau1, tau2, inner_points);
    Ok(CurveMarkers { tau1_star: tau1, tau2_star: tau2, lambda_star: lambda, z_h_zeros, period })
}

fn zero_set_h_between<T: Scalar>(curve: &ProfileCurve<T>, tau1: T, tau2: T, n: usize) -> Vec<T> {
    sign_changes(|t| curve.h_value(t), tau1, tau2, n).into_iter().map(|(t, _)| t).collect()
}

/// Zeros of `h` on the inner arc, scanned with `grid` points per period.
pub fn zero_set_h<T: Scalar>(curve: &ProfileCurve<T>, markers: &CurveMarkers<T>, grid: usize) -> Vec<T> {
    let frac = ((markers.tau2_star - markers.tau1_star) / curve.period()).to_f64_lossy();
    let n = ((grid as f64) * frac).ceil().max(16.0) as usize;
    zero_set_h_between(curve, markers.tau1_star, markers.tau2_star, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn circle_markers_are_quarter_points() {
        let c = ProfileCurve::<f64>::circle(2.0, 1.0).unwrap();
        let m = find_markers(&c).unwrap();
        assert!((m.tau1_star - PI / 2.0).abs() < 1e-11);
        assert!((m.tau2_star - 1.5 * PI).abs() < 1e-11);
        assert!((m.lambda_star - PI).abs() < 1e-11);
        assert_eq!(m.z_h_zeros.len(), 1);
        assert!((m.z_h_zeros[0] - PI).abs() < 1e-10);
    }

    #[test]
    fn circle_curvature_is_reciprocal_radius() {
        let c = ProfileCurve::<f64>::circle(2.0, 0.5).unwrap();
        assert!((c.curvature(0.3).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(c.curvature_prime(0.3), 0.0);
    }

    #[test]
    fn h_at_endpoint_matches_closed_form() {
        let c = ProfileCurve::<f64>::circle(2.0, 1.0).unwrap();
        let t = PI / 2.0;
        let expect = c.d1(t)[0] * c.curvature(t).unwrap();
        assert!((c.h_value(t) - expect).abs() < 1e-12);
        assert!(expect < 0.0);
    }

    #[test]
    fn non_convex_raw_curve_is_rejected() {
        // ρ = 3 + cos t + 0.6 cos 2t develops a dent.
        let raw = FourierCurve {
            rho0: 3.0,
            z0: 0.0,
            rho_coeffs: vec![(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)],
            z_coeffs: vec![(0.0, 1.0), (0.0, 0.0), (0.0, 0.6)],
        };
        match reparametrize_arclength::<f64>(Arc::new(raw)) {
            Err(Error::NonConvex { tau }) => assert!(tau >= 0.0),
            other => panic!("expected NonConvex, got {other:?}"),
        }
    }

    #[test]
    fn fourier_circle_matches_builtin() {
        let raw = FourierCurve { rho0: 2.0, z0: 0.0, rho_coeffs: vec![(1.0, 0.0)], z_coeffs: vec![(0.0, 1.0)] };
        let c = reparametrize_arclength::<f64>(Arc::new(raw)).unwrap();
        assert!((c.period() - 2.0 * PI).abs() < 1e-12);
        let j = c.jet(1.0);
        assert!((j.p[0] - (2.0 + 1f64.cos())).abs() < 1e-12);
        assert!((j.d3.unwrap()[1] + 1f64.cos()).abs() < 1e-9);
    }

    #[test]
    fn f32_circle_builds() {
        let c = ProfileCurve::<f32>::circle(2.0, 1.0).unwrap();
        let m = find_markers(&c).unwrap();
        assert!((m.lambda_star - std::f32::consts::PI).abs() < 1e-5);
    }
}
