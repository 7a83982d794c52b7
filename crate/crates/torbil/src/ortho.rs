//! Orthogonal curvilinear charts and numerical checks of their frame
//! identities.
//!
//! Indices are 1-based throughout, matching the usual notation: for the
//! annulus chart `1 = θ`, `2 = z`, `3 = r`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{wrap_into, Scalar};
use crate::vec3::Vec3;

/// A chart point `(q₁, q₂, q₃)`.
pub type ChartPoint<T> = [T; 3];

/// A scalar field on chart coordinates.
pub type Field<'a, T> = &'a (dyn Fn(ChartPoint<T>) -> T + Sync);

pub trait OrthoChart<T: Scalar>: Sync {
    fn eta(&self, q: ChartPoint<T>) -> Vec3<T>;

    /// Diagonal metric entries `g_ii`.
    fn metric(&self, q: ChartPoint<T>) -> [T; 3];

    /// Unit frame `D_i η = ∂_i η / √g_ii`.
    fn frame(&self, q: ChartPoint<T>) -> [Vec3<T>; 3];

    /// Period of coordinate `axis` (0-based), if it is periodic.
    fn period(&self, axis: usize) -> Option<T>;

    /// Range of coordinate `axis` (0-based).
    fn range(&self, axis: usize) -> (T, T);

    /// Closed-form `Γ_ij^k`, when the chart has one.
    fn christoffel_table(&self, _i: usize, _j: usize, _k: usize, _q: ChartPoint<T>) -> Option<T> {
        None
    }
}

/// Periodic annular cylinder `θ ∈ [0, 2π)`, `z ∈ [0, H)`, `r ∈ (R₁, R₂)` with
/// `η(θ, z, r) = (r cos θ, r sin θ, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnnulusChart<T> {
    pub height: T,
    pub r_inner: T,
    pub r_outer: T,
}

impl<T: Scalar> Default for AnnulusChart<T> {
    fn default() -> Self {
        Self { height: T::TAU(), r_inner: T::one(), r_outer: T::lit(3.0) }
    }
}

impl<T: Scalar> AnnulusChart<T> {
    pub fn new(height: T, r_inner: T, r_outer: T) -> Result<Self> {
        if !(height > T::zero() && r_inner > T::zero() && r_outer > r_inner) {
            return Err(Error::Domain(format!("annulus needs H > 0 and 0 < R1 < R2, got H={height}, R1={r_inner}, R2={r_outer}")));
        }
        Ok(Self { height, r_inner, r_outer })
    }

    /// The closed-form correction functions `ζ₁ = 1/r`, `ζ₂ = 1`, `ζ₃ = 1/r`
    /// with their frame derivatives `(D₁ζ, D₂ζ, D₃ζ)`.
    pub fn zeta(&self, a: usize, q: ChartPoint<T>) -> (T, [T; 3]) {
        let r = q[2];
        match a {
            2 => (T::one(), [T::zero(); 3]),
            _ => (r.recip(), [T::zero(), T::zero(), -(r * r).recip()]),
        }
    }
}

impl<T: Scalar> OrthoChart<T> for AnnulusChart<T> {
    fn eta(&self, q: ChartPoint<T>) -> Vec3<T> {
        let (s, c) = q[0].sin_cos();
        Vec3::new(q[2] * c, q[2] * s, q[1])
    }

    fn metric(&self, q: ChartPoint<T>) -> [T; 3] {
        [q[2] * q[2], T::one(), T::one()]
    }

    fn frame(&self, q: ChartPoint<T>) -> [Vec3<T>; 3] {
        let (s, c) = q[0].sin_cos();
        [Vec3::new(-s, c, T::zero()), Vec3::new(T::zero(), T::zero(), T::one()), Vec3::new(c, s, T::zero())]
    }

    fn period(&self, axis: usize) -> Option<T> {
        match axis {
            0 => Some(T::TAU()),
            1 => Some(self.height),
            _ => None,
        }
    }

    fn range(&self, axis: usize) -> (T, T) {
        match axis {
            0 => (T::zero(), T::TAU()),
            1 => (T::zero(), self.height),
            _ => (self.r_inner, self.r_outer),
        }
    }

    fn christoffel_table(&self, i: usize, j: usize, k: usize, q: ChartPoint<T>) -> Option<T> {
        let inv_r = q[2].recip();
        Some(match (i, j, k) {
            (1, 1, 3) => -inv_r,
            (1, 3, 1) => inv_r,
            _ => T::zero(),
        })
    }
}

fn check_index(i: usize) -> Result<()> {
    if (1..=3).contains(&i) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("chart index {i} is not in 1..=3")))
    }
}

/// Rejects points whose non-periodic coordinates leave the open chart range.
pub fn check_point<T: Scalar, C: OrthoChart<T> + ?Sized>(chart: &C, q: ChartPoint<T>) -> Result<()> {
    for (axis, &x) in q.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::Domain(format!("chart coordinate {} is not finite", axis + 1)));
        }
        if chart.period(axis).is_none() {
            let (lo, hi) = chart.range(axis);
            if !(x > lo && x < hi) {
                return Err(Error::OutOfRange { s: x.to_f64_lossy(), lo: lo.to_f64_lossy(), hi: hi.to_f64_lossy() });
            }
        }
    }
    Ok(())
}

/// How a derivative stencil was placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stencil {
    Central,
    /// Shifted to stay inside a non-periodic range. Still fourth order, with
    /// a larger error constant.
    OneSided,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative<T> {
    pub value: T,
    pub stencil: Stencil,
}

// Fourth-order weights for f'(x₀) from samples at x₀ + (m + o)·h, m = 0..5,
// where o is the offset of the first node. Row o ∈ {−2, …, 0}: central at −2.
const FORWARD_WEIGHTS: [[f64; 5]; 3] = [[1.0, -8.0, 0.0, 8.0, -1.0], [-3.0, -10.0, 18.0, -6.0, 1.0], [-25.0, 48.0, -36.0, 16.0, -3.0]];

fn shifted<T: Scalar>(q: ChartPoint<T>, axis: usize, ds: T, period: Option<T>, lo: T) -> ChartPoint<T> {
    let mut p = q;
    p[axis] += ds;
    if let Some(per) = period {
        p[axis] = wrap_into(p[axis], lo, per);
    }
    p
}

/// `∂_axis u` with a five-point stencil, shifted inward near a range end.
fn partial<T: Scalar, C: OrthoChart<T> + ?Sized>(
    chart: &C,
    axis: usize,
    u: &dyn Fn(ChartPoint<T>) -> T,
    q: ChartPoint<T>,
    step: T,
) -> Derivative<T> {
    let period = chart.period(axis);
    let (lo, hi) = chart.range(axis);
    let two = T::two();
    let (row, first, sign, stencil) = if period.is_some() || (q[axis] - two * step > lo && q[axis] + two * step < hi) {
        (0, -2, T::one(), Stencil::Central)
    } else if q[axis] + T::lit(4.0) * step < hi && q[axis] - step > lo {
        (1, -1, T::one(), Stencil::OneSided)
    } else if q[axis] + T::lit(4.0) * step < hi {
        (2, 0, T::one(), Stencil::OneSided)
    } else if q[axis] - step > lo {
        (1, -1, -T::one(), Stencil::OneSided)
    } else {
        (2, 0, -T::one(), Stencil::OneSided)
    };
    let mut acc = T::zero();
    for (m, &w) in FORWARD_WEIGHTS[row].iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let offset = T::lit((first + m as i32) as f64) * step * sign;
        acc += T::lit(w) * u(shifted(q, axis, offset, period, lo));
    }
    Derivative { value: sign * acc / (T::lit(12.0) * step), stencil }
}

fn d_raw<T: Scalar, C: OrthoChart<T> + ?Sized>(chart: &C, i: usize, u: &dyn Fn(ChartPoint<T>) -> T, q: ChartPoint<T>, step: T) -> T {
    let g = chart.metric(q)[i - 1];
    partial(chart, i - 1, u, q, step).value / g.sqrt()
}

/// `D_i u = (1/√g_ii) ∂_i u` with a fourth-order stencil.
pub fn d_operator<T: Scalar, C: OrthoChart<T> + ?Sized>(
    chart: &C,
    i: usize,
    u: Field<'_, T>,
    q: ChartPoint<T>,
    step: T,
) -> Result<Derivative<T>> {
    check_index(i)?;
    check_point(chart, q)?;
    if !(step > T::zero()) {
        return Err(Error::Precondition("stencil step must be positive".into()));
    }
    let d = partial(chart, i - 1, u, q, step);
    Ok(Derivative { value: d.value / chart.metric(q)[i - 1].sqrt(), stencil: d.stencil })
}

/// `Γ_ij^k = ⟨D_i D_j η, D_k η⟩` from the chart's table, or by differencing
/// the frame when the chart has no table.
pub fn christoffel<T: Scalar, C: OrthoChart<T> + ?Sized>(chart: &C, i: usize, j: usize, k: usize, q: ChartPoint<T>) -> Result<T> {
    for n in [i, j, k] {
        check_index(n)?;
    }
    check_point(chart, q)?;
    Ok(chart.christoffel_table(i, j, k, q).unwrap_or_else(|| christoffel_fd(chart, i, j, k, q, T::lit(1e-3))))
}

/// Finite-difference `⟨D_i (D_j η), D_k η⟩`.
pub fn christoffel_fd<T: Scalar, C: OrthoChart<T> + ?Sized>(chart: &C, i: usize, j: usize, k: usize, q: ChartPoint<T>, step: T) -> T {
    let ek = chart.frame(q)[k - 1];
    let proj = |p: ChartPoint<T>| chart.frame(p)[j - 1].dot(ek);
    d_raw(chart, i, &proj, q, step)
}

/// Chart components `𝐯 = Qᵀ v`.
pub fn transform_velocity<T: Scalar, C: OrthoChart<T> + ?Sized>(chart: &C, v: Vec3<T>, q: ChartPoint<T>) -> [T; 3] {
    let f = chart.frame(q);
    [f[0].dot(v), f[1].dot(v), f[2].dot(v)]
}

/// Cartesian `v = Q 𝐯`.
pub fn inverse_transform_velocity<T: Scalar, C: OrthoChart<T> + ?Sized>(chart: &C, w: [T; 3], q: ChartPoint<T>) -> Vec3<T> {
    let f = chart.frame(q);
    f[0] * w[0] + f[1] * w[1] + f[2] * w[2]
}

fn gamma<T: Scalar, C: OrthoChart<T> + ?Sized>(chart: &C, i: usize, j: usize, k: usize, q: ChartPoint<T>) -> T {
    chart.christoffel_table(i, j, k, q).unwrap_or_else(|| christoffel_fd(chart, i, j, k, q, T::lit(1e-3)))
}

/// `|(D_i D_j − D_j D_i) u − (Γ_jj^i D_j u − Γ_ii^j D_i u)|`.
pub fn commutator_residual<T: Scalar, C: OrthoChart<T> + ?Sized>(
    chart: &C,
    i: usize,
    j: usize,
    u: Field<'_, T>,
    q: ChartPoint<T>,
    step: T,
) -> Result<T> {
    check_index(i)?;
    check_index(j)?;
    if i == j {
        return Err(Error::Precondition("commutator needs i != j".into()));
    }
    check_point(chart, q)?;
    let dj = |p: ChartPoint<T>| d_raw(chart, j, u, p, step);
    let di = |p: ChartPoint<T>| d_raw(chart, i, u, p, step);
    let lhs = d_raw(chart, i, &dj, q, step) - d_raw(chart, j, &di, q, step);
    let rhs = gamma(chart, j, j, i, q) * dj(q) - gamma(chart, i, i, j, q) * di(q);
    Ok((lhs - rhs).abs())
}

/// `|Δ_D u − Σ_i Σ_{k≠i} Γ_kk^i D_i u − Δ u|` against a reference Laplacian.
pub fn laplace_beltrami_residual<T: Scalar, C: OrthoChart<T> + ?Sized>(
    chart: &C,
    u: Field<'_, T>,
    laplacian: T,
    q: ChartPoint<T>,
    step: T,
) -> Result<T> {
    check_point(chart, q)?;
    let mut total = T::zero();
    for i in 1..=3 {
        let di = |p: ChartPoint<T>| d_raw(chart, i, u, p, step);
        let mut coef = T::zero();
        for k in (1..=3).filter(|&k| k != i) {
            coef += gamma(chart, k, k, i, q);
        }
        total += d_raw(chart, i, &di, q, step) - coef * di(q);
    }
    Ok((total - laplacian).abs())
}

/// Residuals of the three first-order systems for `ζ₁`, `ζ₂`, `ζ₃`:
/// `D_a ζ_a = Σ_{k≠a} Γ_kk^a ζ_a` and `D_b ζ_a = Γ_aa^b ζ_a` for `b ≠ a`.
/// Row `a−1` holds the residuals of `ζ_a` for `b = 1, 2, 3`.
pub fn zeta_residuals<T: Scalar>(chart: &AnnulusChart<T>, q: ChartPoint<T>) -> Result<[[T; 3]; 3]> {
    check_point(chart, q)?;
    let mut out = [[T::zero(); 3]; 3];
    for a in 1..=3 {
        let (z, dz) = chart.zeta(a, q);
        for b in 1..=3 {
            let coef = if b == a {
                (1..=3).filter(|&k| k != a).map(|k| gamma(chart, k, k, a, q)).fold(T::zero(), |s, g| s + g)
            } else {
                gamma(chart, a, a, b, q)
            };
            out[a - 1][b - 1] = (dz[b - 1] - coef * z).abs();
        }
    }
    Ok(out)
}

/// `|D_i 𝐯_j − Σ_k Γ_ij^k 𝐯_k|` for a fixed Cartesian `v`.
pub fn dv_identity_residual<T: Scalar, C: OrthoChart<T> + ?Sized>(
    chart: &C,
    i: usize,
    j: usize,
    q: ChartPoint<T>,
    v: Vec3<T>,
    step: T,
) -> Result<T> {
    check_index(i)?;
    check_index(j)?;
    check_point(chart, q)?;
    let vj = |p: ChartPoint<T>| transform_velocity(chart, v, p)[j - 1];
    let w = transform_velocity(chart, v, q);
    let mut rhs = T::zero();
    for k in 1..=3 {
        rhs += gamma(chart, i, j, k, q) * w[k - 1];
    }
    Ok((d_raw(chart, i, &vj, q, step) - rhs).abs())
}

/// Observed orders `log₂(e(h)/e(h/2))` for consecutive step pairs.
pub fn observed_orders<T: Scalar>(residual: impl Fn(T) -> Result<T>, steps: &[T]) -> Result<Vec<T>> {
    let errs = steps.iter().map(|&h| residual(h)).collect::<Result<Vec<_>>>()?;
    Ok(errs.windows(2).zip(steps.windows(2)).map(|(e, h)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln()).collect())
}

/// A smooth periodic test field with its exact cylindrical Laplacian.
pub struct TestField<T> {
    pub name: &'static str,
    pub u: Box<dyn Fn(ChartPoint<T>) -> T + Sync>,
    pub laplacian: Box<dyn Fn(ChartPoint<T>) -> T + Sync>,
}

/// Standard fields for the annulus suite: `r cos θ`, `r²`, `cos(2πz/H)`,
/// a constant, and `eʳ cos 2θ cos(2πz/H)`.
pub fn annulus_fields<T: Scalar>(chart: &AnnulusChart<T>) -> Vec<TestField<T>> {
    let k = T::TAU() / chart.height;
    let two = T::two();
    vec![
        TestField { name: "r cos θ", u: Box::new(|q: ChartPoint<T>| q[2] * q[0].cos()), laplacian: Box::new(|_| T::zero()) },
        TestField { name: "r^2", u: Box::new(|q: ChartPoint<T>| q[2] * q[2]), laplacian: Box::new(|_| T::lit(4.0)) },
        TestField {
            name: "cos(2πz/H)",
            u: Box::new(move |q: ChartPoint<T>| (k * q[1]).cos()),
            laplacian: Box::new(move |q: ChartPoint<T>| -k * k * (k * q[1]).cos()),
        },
        TestField { name: "const", u: Box::new(|_| T::lit(1.5)), laplacian: Box::new(|_| T::zero()) },
        TestField {
            name: "e^r cos 2θ cos(2πz/H)",
            u: Box::new(move |q: ChartPoint<T>| q[2].exp() * (two * q[0]).cos() * (k * q[1]).cos()),
            laplacian: Box::new(move |q: ChartPoint<T>| {
                let r = q[2];
                let base = r.exp() * (two * q[0]).cos() * (k * q[1]).cos();
                base * (T::one() + r.recip() - T::lit(4.0) / (r * r) - k * k)
            }),
        },
    ]
}

/// One line of the identity suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteRow {
    pub check: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl SuiteRow {
    fn below(check: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { check: check.into(), value, threshold, pass: value < threshold }
    }

    fn at_least(check: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { check: check.into(), value, threshold, pass: value >= threshold }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    /// Stencil step for the residual thresholds.
    pub step: f64,
    pub fd_tol: f64,
    pub zeta_tol: f64,
    pub frame_tol: f64,
    /// Coarse steps for the convergence study.
    pub order_steps: [f64; 3],
    /// Minimum accepted observed order.
    pub min_order: f64,
    /// Sample points per check.
    pub samples: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { step: 1e-3, fd_tol: 1e-6, zeta_tol: 1e-12, frame_tol: 1e-12, order_steps: [0.2, 0.1, 0.05], min_order: 3.5, samples: 16 }
    }
}

/// Deterministic sample points spread over the chart interior.
pub fn sample_points<T: Scalar>(chart: &AnnulusChart<T>, n: usize) -> Vec<ChartPoint<T>> {
    (0..n)
        .map(|m| {
            let f = |k: f64| T::lit(((m as f64 + 0.5) * k).fract());
            let margin = T::lit(0.05) * (chart.r_outer - chart.r_inner);
            [
                f(0.618_033_988_75) * T::TAU(),
                f(0.754_877_666_25) * chart.height,
                chart.r_inner + margin + f(0.569_840_290_99) * (chart.r_outer - chart.r_inner - margin - margin),
            ]
        })
        .collect()
}

fn pairs() -> impl Iterator<Item = (usize, usize)> {
    (1..=3).flat_map(|i| (1..=3).map(move |j| (i, j)))
}

/// Runs every annulus identity and reports one row per check.
pub fn run_identity_suite(chart: &AnnulusChart<f64>, cfg: &SuiteConfig) -> Result<Vec<SuiteRow>> {
    let pts = sample_points(chart, cfg.samples);
    let fields = annulus_fields(chart);
    let mut rows = Vec::new();
    let worst =
        |f: &mut dyn FnMut(ChartPoint<f64>) -> Result<f64>| -> Result<f64> { pts.iter().try_fold(0.0f64, |m, &q| Ok(m.max(f(q)?))) };

    rows.push(SuiteRow::below(
        "frame orthonormality |QᵀQ − I|",
        worst(&mut |q| {
            let f = chart.frame(q);
            Ok(pairs().map(|(i, j)| (f[i - 1].dot(f[j - 1]) - if i == j { 1.0 } else { 0.0 }).abs()).fold(0.0, f64::max))
        })?,
        cfg.frame_tol,
    ));
    rows.push(SuiteRow::below(
        "metric vs |∂η|²",
        worst(&mut |q| {
            let g = chart.metric(q);
            let mut m: f64 = 0.0;
            for (a, ga) in g.iter().enumerate() {
                let comp = |c: usize| move |p: ChartPoint<f64>| chart.eta(p)[c];
                let d: f64 = (0..3).map(|c| partial(chart, a, &comp(c), q, 1e-3).value.powi(2)).sum();
                m = m.max((d - ga).abs() / ga);
            }
            Ok(m)
        })?,
        cfg.fd_tol,
    ));

    let mut antisym: f64 = 0.0;
    let mut distinct: f64 = 0.0;
    for &q in &pts {
        for (i, j) in pairs() {
            for k in 1..=3 {
                let g = christoffel(chart, i, j, k, q)?;
                antisym = antisym.max((g + christoffel(chart, i, k, j, q)?).abs());
                if i != j && j != k && i != k {
                    distinct = distinct.max(g.abs());
                }
            }
        }
    }
    rows.push(SuiteRow { check: "Γ antisymmetry (exact)".into(), value: antisym, threshold: 0.0, pass: antisym == 0.0 });
    rows.push(SuiteRow { check: "Γ distinct-index vanishing (exact)".into(), value: distinct, threshold: 0.0, pass: distinct == 0.0 });
    rows.push(SuiteRow::below(
        "Γ table vs ⟨D_i D_j η, D_k η⟩",
        worst(&mut |q| {
            let mut m: f64 = 0.0;
            for (i, j) in pairs() {
                for k in 1..=3 {
                    m = m.max((christoffel_fd(chart, i, j, k, q, cfg.step) - christoffel(chart, i, j, k, q)?).abs());
                }
            }
            Ok(m)
        })?,
        cfg.fd_tol,
    ));
    rows.push(SuiteRow::below(
        "velocity isometry ||𝐯| − |v||",
        worst(&mut |q| {
            let v = Vec3::new(q[0].cos() - 0.3, 0.7 * q[1].sin(), q[2] - 2.0);
            let w = transform_velocity(chart, v, q);
            let back = inverse_transform_velocity(chart, w, q);
            let n = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
            Ok((n - v.norm()).abs().max((back - v).norm()))
        })?,
        cfg.frame_tol,
    ));

    for f in &fields {
        rows.push(SuiteRow::below(
            format!("commutator [{}]", f.name),
            worst(&mut |q| {
                let mut m: f64 = 0.0;
                for (i, j) in pairs().filter(|(i, j)| i != j) {
                    m = m.max(commutator_residual(chart, i, j, &*f.u, q, cfg.step)?);
                }
                Ok(m)
            })?,
            cfg.fd_tol,
        ));
        rows.push(SuiteRow::below(
            format!("Laplace-Beltrami [{}]", f.name),
            worst(&mut |q| laplace_beltrami_residual(chart, &*f.u, (f.laplacian)(q), q, cfg.step))?,
            cfg.fd_tol,
        ));
    }

    rows.push(SuiteRow::below(
        "zeta systems",
        worst(&mut |q| Ok(zeta_residuals(chart, q)?.iter().flatten().fold(0.0f64, |m, &x| m.max(x))))?,
        cfg.zeta_tol,
    ));
    rows.push(SuiteRow::below(
        "dv identity",
        worst(&mut |q| {
            let v = Vec3::new(0.3, -1.1, 0.7);
            let mut m: f64 = 0.0;
            for (i, j) in pairs() {
                m = m.max(dv_identity_residual(chart, i, j, q, v, cfg.step)?);
            }
            Ok(m)
        })?,
        cfg.fd_tol,
    ));

    // Convergence on the non-polynomial field, where truncation error dominates.
    let smooth = fields.last().expect("field list is non-empty");
    let q = [0.7, 1.3, 0.5 * (chart.r_inner + chart.r_outer)];
    let steps = cfg.order_steps;
    let orders = [
        ("order: D₁", observed_orders(|h| Ok((d_raw(chart, 1, &*smooth.u, q, h) - d_raw(chart, 1, &*smooth.u, q, 1e-3)).abs()), &steps)?),
        ("order: commutator", observed_orders(|h| commutator_residual(chart, 1, 3, &*smooth.u, q, h), &steps)?),
        (
            "order: Laplace-Beltrami",
            observed_orders(|h| laplace_beltrami_residual(chart, &*smooth.u, (smooth.laplacian)(q), q, h), &steps)?,
        ),
        ("order: dv identity", observed_orders(|h| dv_identity_residual(chart, 1, 1, q, Vec3::new(0.3, -1.1, 0.7), h), &steps)?),
    ];
    for (name, o) in orders {
        let lowest = o.iter().cloned().fold(f64::INFINITY, f64::min);
        rows.push(SuiteRow::at_least(name, lowest, cfg.min_order));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_sided_stencil_is_exact_on_quartics() {
        let c = AnnulusChart::<f64>::default();
        let u = |q: ChartPoint<f64>| q[2].powi(4);
        for r in [1.0005, 1.002, 2.998, 2.9995] {
            let d = d_operator(&c, 3, &u, [0.0, 0.0, r], 1e-3).unwrap();
            assert_eq!(d.stencil, Stencil::OneSided);
            assert!((d.value - 4.0 * r.powi(3)).abs() < 1e-8, "{r} {}", d.value);
        }
    }

    #[test]
    fn periodic_stencil_wraps() {
        let c = AnnulusChart::<f64>::default();
        let u = |q: ChartPoint<f64>| (q[1]).sin();
        let d = d_operator(&c, 2, &u, [0.0, 1e-4, 2.0], 1e-3).unwrap();
        assert_eq!(d.stencil, Stencil::Central);
        assert!((d.value - 1e-4f64.cos()).abs() < 1e-12, "{}", d.value);
    }
}
