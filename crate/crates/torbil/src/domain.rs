//! The solid torus obtained by revolving a generator about the z-axis.

use crate::error::{Error, Result};
use crate::profile::{find_markers, CurveMarkers, CurveShape, ProfileCurve};
use crate::scalar::{nearest_branch, wrap_into, Scalar};
use crate::vec3::Vec3;

/// Half-width of the band `|ξ| ≤ ε_b` counted as the boundary.
pub const BOUNDARY_BAND: f64 = 1e-10;
/// Iteration cap for nearest-parameter Newton solves.
pub const NEWTON_MAX_ITER: usize = 50;
/// Largest `|ξ(p)|` accepted by [`ToroidalDomain::boundary_params`].
pub const BOUNDARY_PARAMS_GATE: f64 = 1e-6;

const SEED_POINTS: usize = 64;

/// How the meridian indicator `ξ̄(ρ, z)` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndicatorKind {
    /// `(ρ − R)² + z² − r²`, only for circle generators.
    Quadric,
    /// Signed distance to the generator in the `(ρ, z)` half-plane.
    SignedDistance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointClass {
    Inside,
    Boundary,
    Outside,
}

/// A boundary point with its generator parameter and unwrapped azimuth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint<T> {
    pub tau: T,
    pub phi: T,
    pub xyz: Vec3<T>,
}

/// `ξ̄` with first and second partial derivatives in `(ρ, z)`.
#[derive(Debug, Clone, Copy)]
struct MeridianJet<T> {
    value: T,
    d_r: T,
    d_z: T,
    d_rr: T,
    d_rz: T,
    d_zz: T,
}

/// Solid torus `Ω = {ξ < 0}` with boundary `σ(τ, φ)`.
#[derive(Debug, Clone)]
pub struct ToroidalDomain<T: Scalar> {
    profile: ProfileCurve<T>,
    markers: CurveMarkers<T>,
    kind: IndicatorKind,
    seeds: Vec<(T, [T; 2])>,
}

impl<T: Scalar> ToroidalDomain<T> {
    /// Builds the domain, choosing the exact quadric for circle generators.
    pub fn new(profile: ProfileCurve<T>) -> Result<Self> {
        let kind = match profile.shape() {
            CurveShape::Circle { .. } => IndicatorKind::Quadric,
            CurveShape::General => IndicatorKind::SignedDistance,
        };
        Self::with_indicator(profile, kind)
    }

    /// Builds the domain with an explicit indicator choice.
    pub fn with_indicator(profile: ProfileCurve<T>, kind: IndicatorKind) -> Result<Self> {
        if kind == IndicatorKind::Quadric && !matches!(profile.shape(), CurveShape::Circle { .. }) {
            return Err(Error::Domain("quadric indicator requires a circle generator".into()));
        }
        let markers = find_markers(&profile)?;
        let (a, _) = profile.interval();
        let h = profile.period() / T::from_usize_lossy(SEED_POINTS);
        let seeds = (0..SEED_POINTS)
            .map(|i| {
                let t = a + h * T::from_usize_lossy(i);
                (t, profile.point(t))
            })
            .collect();
        Ok(Self { profile, markers, kind, seeds })
    }

    /// Circle-generator torus with tube centre radius `R` and tube radius `r`.
    pub fn circle_torus(center: T, radius: T) -> Result<Self> {
        Self::new(ProfileCurve::circle(center, radius)?)
    }

    pub fn profile(&self) -> &ProfileCurve<T> {
        &self.profile
    }

    pub fn markers(&self) -> &CurveMarkers<T> {
        &self.markers
    }

    pub fn indicator_kind(&self) -> IndicatorKind {
        self.kind
    }

    /// Smallest distance from the axis to the generator, `γ₁(λ*)`.
    pub fn rho_min(&self) -> T {
        self.profile.point(self.markers.lambda_star)[0]
    }

    /// Largest distance from the axis to the generator.
    pub fn rho_max(&self) -> T {
        self.seeds.iter().map(|s| s.1[0]).fold(T::zero(), T::max) + self.profile.period() / T::from_usize_lossy(SEED_POINTS)
    }

    pub fn sigma(&self, tau: T, phi: T) -> Vec3<T> {
        let g = self.profile.point(tau);
        let (s, c) = phi.sin_cos();
        Vec3::new(g[0] * c, g[0] * s, g[1])
    }

    pub fn outward_normal(&self, tau: T, phi: T) -> Vec3<T> {
        let d = self.profile.d1(tau);
        let (s, c) = phi.sin_cos();
        Vec3::new(d[1] * c, d[1] * s, -d[0])
    }

    /// Unit azimuthal tangent `φ̂(φ)`.
    pub fn phi_hat(phi: T) -> Vec3<T> {
        let (s, c) = phi.sin_cos();
        Vec3::new(-s, c, T::zero())
    }

    /// Unit tangent to the meridian curve through `σ(τ, φ)`, in the direction of increasing `τ`.
    pub fn meridian_tangent(&self, tau: T, phi: T) -> Vec3<T> {
        let d = self.profile.d1(tau);
        let (s, c) = phi.sin_cos();
        Vec3::new(d[0] * c, d[0] * s, d[1])
    }

    /// Nearest generator parameter to `(ρ, z)` by safeguarded Newton on the
    /// squared distance, seeded from a cached coarse grid.
    pub fn nearest_param(&self, rho: T, z: T) -> Result<T> {
        if let CurveShape::Circle { center, radius } = self.profile.shape() {
            let (a, _) = self.profile.interval();
            return Ok(wrap_into(radius * z.atan2(rho - center), a, self.profile.period()));
        }
        let mut best = self.seeds[0].0;
        let mut best_d = T::infinity();
        for &(t, p) in &self.seeds {
            let d = (rho - p[0]).powi(2) + (z - p[1]).powi(2);
            if d < best_d {
                best_d = d;
                best = t;
            }
        }
        let max_step = self.profile.period() / T::from_usize_lossy(SEED_POINTS);
        let mut tau = best;
        let mut residual = T::infinity();
        let tol = T::epsilon() * T::lit(64.0) * (T::one() + self.profile.period());
        for _ in 0..NEWTON_MAX_ITER {
            let j = self.profile.jet(tau);
            let q = [rho - j.p[0], z - j.p[1]];
            let g = -(q[0] * j.d1[0] + q[1] * j.d1[1]);
            let hess = T::one() - (q[0] * j.d2[0] + q[1] * j.d2[1]);
            let step = if hess > T::lit(0.1) { g / hess } else { g };
            let step = step.max(-max_step).min(max_step);
            tau -= step;
            residual = g.abs();
            if step.abs() <= tol {
                return Ok(self.profile.wrap(tau));
            }
        }
        Err(Error::NewtonFailed { iterations: NEWTON_MAX_ITER, residual: residual.to_f64_lossy() })
    }

    fn meridian_jet(&self, rho: T, z: T) -> MeridianJet<T> {
        match (self.kind, self.profile.shape()) {
            (IndicatorKind::Quadric, CurveShape::Circle { center, radius }) => {
                let dr = rho - center;
                MeridianJet {
                    value: dr * dr + z * z - radius * radius,
                    d_r: T::two() * dr,
                    d_z: T::two() * z,
                    d_rr: T::two(),
                    d_rz: T::zero(),
                    d_zz: T::two(),
                }
            }
            _ => {
                let tau = self.nearest_param(rho, z).unwrap_or_else(|_| self.seed_param(rho, z));
                let j = self.profile.jet(tau);
                let n = [j.d1[1], -j.d1[0]];
                let d = (rho - j.p[0]) * n[0] + (z - j.p[1]) * n[1];
                let kappa = j.d2[0].hypot(j.d2[1]);
                let w = kappa / (T::one() + kappa * d);
                let t = j.d1;
                MeridianJet { value: d, d_r: n[0], d_z: n[1], d_rr: w * t[0] * t[0], d_rz: w * t[0] * t[1], d_zz: w * t[1] * t[1] }
            }
        }
    }

    fn seed_param(&self, rho: T, z: T) -> T {
        self.seeds
            .iter()
            .map(|&(t, p)| (t, (rho - p[0]).powi(2) + (z - p[1]).powi(2)))
            .fold((self.seeds[0].0, T::infinity()), |a, b| if b.1 < a.1 { b } else { a })
            .0
    }

    /// Indicator `ξ(p) = ξ̄(√(x² + y²), z)`.
    pub fn xi(&self, p: Vec3<T>) -> T {
        self.meridian_jet(p.rho(), p.z).value
    }

    /// `ξ` together with its Cartesian gradient.
    pub fn xi_grad(&self, p: Vec3<T>) -> (T, Vec3<T>) {
        let rho = p.rho();
        let m = self.meridian_jet(rho, p.z);
        let (cx, cy) = if rho > T::zero() { (p.x / rho, p.y / rho) } else { (T::zero(), T::zero()) };
        (m.value, Vec3::new(m.d_r * cx, m.d_r * cy, m.d_z))
    }

    pub fn grad_xi(&self, p: Vec3<T>) -> Vec3<T> {
        self.xi_grad(p).1
    }

    /// Cartesian Hessian of `ξ`, rows indexed by x, y, z.
    pub fn hessian_xi(&self, p: Vec3<T>) -> [[T; 3]; 3] {
        let rho = p.rho();
        let m = self.meridian_jet(rho, p.z);
        let rh = [p.x / rho, p.y / rho, T::zero()];
        let ph = [-p.y / rho, p.x / rho, T::zero()];
        let zh = [T::zero(), T::zero(), T::one()];
        let mut h = [[T::zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                h[i][j] = m.d_rr * rh[i] * rh[j]
                    + m.d_rz * (rh[i] * zh[j] + zh[i] * rh[j])
                    + m.d_zz * zh[i] * zh[j]
                    + m.d_r / rho * ph[i] * ph[j];
            }
        }
        h
    }

    /// Lower bound on the Euclidean distance from `p` to `∂Ω` (exact for the
    /// quadric and for the signed distance when the nearest point is found).
    pub fn boundary_distance(&self, p: Vec3<T>) -> T {
        let rho = p.rho();
        match self.profile.shape() {
            CurveShape::Circle { center, radius } => ((rho - center).hypot(p.z) - radius).abs(),
            CurveShape::General => match self.kind {
                IndicatorKind::SignedDistance => self.meridian_jet(rho, p.z).value.abs(),
                IndicatorKind::Quadric => T::zero(),
            },
        }
    }

    pub fn classify_point(&self, p: Vec3<T>) -> PointClass {
        self.classify_point_with(p, T::lit(BOUNDARY_BAND))
    }

    pub fn classify_point_with(&self, p: Vec3<T>, band: T) -> PointClass {
        let xi = self.xi(p);
        if xi.abs() <= band {
            PointClass::Boundary
        } else if xi < T::zero() {
            PointClass::Inside
        } else {
            PointClass::Outside
        }
    }

    /// Recovers `(τ, φ)` for a point on (or within `1e-6` of) the boundary,
    /// taking the azimuth branch nearest `phi_hint`.
    pub fn boundary_params(&self, p: Vec3<T>, phi_hint: T) -> Result<SurfacePoint<T>> {
        let xi = self.xi(p);
        if !(xi.abs() < T::lit(BOUNDARY_PARAMS_GATE)) {
            return Err(Error::Precondition(format!(
                "boundary_params needs |xi(p)| < {BOUNDARY_PARAMS_GATE:e}, got {:e}",
                xi.to_f64_lossy()
            )));
        }
        let tau = self.nearest_param(p.rho(), p.z)?;
        let phi = nearest_branch(p.azimuth(), phi_hint);
        Ok(SurfacePoint { tau, phi, xyz: self.sigma(tau, phi) })
    }

    /// `γ₁(τ)` of the generator, the axis distance of `σ(τ, ·)`.
    pub fn gamma1(&self, tau: T) -> T {
        self.profile.point(tau)[0]
    }
}
