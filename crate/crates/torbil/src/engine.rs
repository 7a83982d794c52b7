//! Specular billiard cycles inside a [`ToroidalDomain`].
//!
//! The engine marches along straight rays, brackets the first boundary
//! crossing and refines it, reflects, and repeats. Tangential events are
//! routed to [`crate::grazing::classify`], which decides whether the cycle
//! continues, stops or freezes.

use serde::{Deserialize, Serialize};

use crate::domain::{PointClass, ToroidalDomain, BOUNDARY_BAND};
use crate::error::{Error, Result};
use crate::grazing::{classify, GrazingClass};
use crate::scalar::Scalar;
use crate::vec3::Vec3;

/// Default `|n·v̂|` below which a boundary event counts as grazing.
pub const GRAZE_THRESHOLD: f64 = 1e-7;
/// Default hard cap on recorded events.
pub const MAX_BOUNCES: usize = 10_000;
/// A ray whose maximum of `ξ` lies in `[−TOUCH_BAND, 0]` touches the boundary.
pub const TOUCH_BAND: f64 = 1e-12;
/// Crossings are refined until `|ξ| < ROOT_XI_TOL`.
pub const ROOT_XI_TOL: f64 = 1e-12;
/// Longest marching step as a fraction of the tube inradius.
pub const MARCH_FRACTION: f64 = 0.1;
/// Shortest marching step as a fraction of the tube inradius.
pub const MIN_STEP_FRACTION: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseState<T> {
    pub x: Vec3<T>,
    pub v: Vec3<T>,
    pub t: T,
}

impl<T: Scalar> PhaseState<T> {
    pub fn new(x: Vec3<T>, v: Vec3<T>, t: T) -> Self {
        Self { x, v, t }
    }

    /// Checks `|v| > 0` and that `x` is not outside the domain.
    pub fn validate(&self, domain: &ToroidalDomain<T>) -> Result<()> {
        if !(self.v.norm() > T::zero()) || !self.v.is_finite() {
            return Err(Error::Precondition("velocity must be finite and nonzero".into()));
        }
        if !self.x.is_finite() || domain.classify_point(self.x) == PointClass::Outside {
            return Err(Error::Precondition(format!("position {:?} is outside the closed domain", self.x.to_f64())));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    fn sign<T: Scalar>(self) -> T {
        match self {
            Self::Forward => T::one(),
            Self::Backward => -T::one(),
        }
    }
}

/// How far a run may travel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Budget<T> {
    /// Total path length.
    Length(T),
    /// Elapsed time, converted to length through the speed.
    Time(T),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Caps<T> {
    pub max_bounces: usize,
    pub graze_threshold: T,
}

impl<T: Scalar> Default for Caps<T> {
    fn default() -> Self {
        Self { max_bounces: MAX_BOUNCES, graze_threshold: T::lit(GRAZE_THRESHOLD) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrajectoryStatus {
    /// The budget was used up.
    Completed,
    /// A backward cycle reached an entering inflection phase.
    StoppedAtInflectionMinus,
    /// A forward cycle reached a leaving inflection phase.
    StoppedAtInflectionPlus,
    /// The phase is convex grazing and the trajectory is frozen.
    StuckConvexGrazing,
    MaxBouncesReached,
    /// The grazing classifier could not decide.
    GrazingAmbiguous,
}

impl TrajectoryStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Completed => "completed",
            Self::StoppedAtInflectionMinus => "stopped_inflection_minus",
            Self::StoppedAtInflectionPlus => "stopped_inflection_plus",
            Self::StuckConvexGrazing => "stuck_convex_grazing",
            Self::MaxBouncesReached => "max_bounces",
            Self::GrazingAmbiguous => "grazing_ambiguous",
        }
    }

    /// States after which the trajectory stays at its last point forever.
    pub fn is_frozen(self) -> bool {
        matches!(self, Self::StoppedAtInflectionMinus | Self::StoppedAtInflectionPlus | Self::StuckConvexGrazing)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BounceEvent<T> {
    /// 1-based cycle index.
    pub k: usize,
    pub t: T,
    pub x: Vec3<T>,
    pub tau: T,
    /// Unwrapped azimuth of `x`.
    pub phi: T,
    pub v_in: Vec3<T>,
    pub v_out: Vec3<T>,
    /// `n(x)·v̂_in`.
    pub normal_dot: T,
    pub graze: GrazingClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics<T> {
    /// Largest `| |v_k| − |v_0| | / |v_0|` over all events.
    pub speed_drift: T,
    /// Largest `|ω_k − ω_0| / ω_0` over all events (absolute when `ω_0 = 0`).
    pub omega_drift: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub direction: Direction,
    pub origin: PhaseState<T>,
    pub origin_phi: T,
    pub events: Vec<BounceEvent<T>>,
    /// Phase at the last covered time.
    pub end: PhaseState<T>,
    pub end_phi: T,
    pub total_length: T,
    /// Accumulated azimuth over 2π.
    pub winding: T,
    pub status: TrajectoryStatus,
    pub diagnostics: Diagnostics<T>,
}

/// A straight piece of a trajectory, oriented in the direction of travel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment<T> {
    pub t_start: T,
    pub t_stop: T,
    pub x_start: Vec3<T>,
    pub x_stop: Vec3<T>,
    /// Velocity carried on the segment.
    pub v: Vec3<T>,
    pub phi_start: T,
}

impl<T: Scalar> Trajectory<T> {
    /// Free-flight pieces between consecutive events and up to the end phase.
    pub fn segments(&self) -> Vec<Segment<T>> {
        let mut out = Vec::with_capacity(self.events.len() + 1);
        let mut x = self.origin.x;
        let mut v = self.origin.v;
        let mut t = self.origin.t;
        let mut phi = self.origin_phi;
        for e in &self.events {
            out.push(Segment { t_start: t, t_stop: e.t, x_start: x, x_stop: e.x, v, phi_start: phi });
            x = e.x;
            v = e.v_out;
            t = e.t;
            phi = e.phi;
        }
        if !self.status.is_frozen() {
            out.push(Segment { t_start: t, t_stop: self.end.t, x_start: x, x_stop: self.end.x, v, phi_start: phi });
        }
        out
    }

    pub fn bounce_count(&self) -> usize {
        self.events.len()
    }

    /// `(X(s), V(s))`. Each free-flight piece owns the half-open time interval
    /// closed at its earlier end, so `V` is right-continuous in `s`.
    pub fn eval(&self, s: T) -> Result<(Vec3<T>, Vec3<T>)> {
        if s == self.origin.t {
            return Ok((self.origin.x, self.origin.v));
        }
        let sign: T = self.direction.sign();
        let ahead = |a: T, b: T| (b - a) * sign;
        let progress = ahead(self.origin.t, s);
        if progress < T::zero() || (ahead(self.end.t, s) > T::zero() && !self.status.is_frozen()) {
            let (lo, hi) = if sign > T::zero() { (self.origin.t, self.end.t) } else { (self.end.t, self.origin.t) };
            return Err(Error::OutOfRange { s: s.to_f64_lossy(), lo: lo.to_f64_lossy(), hi: hi.to_f64_lossy() });
        }
        if ahead(self.end.t, s) > T::zero() {
            return Ok((self.end.x, self.end.v));
        }
        let segs = self.segments();
        for seg in &segs {
            let (a, b) = (ahead(seg.t_start, s), ahead(seg.t_stop, s));
            let inside = if sign > T::zero() { a >= T::zero() && b < T::zero() } else { a > T::zero() && b <= T::zero() };
            if inside {
                return Ok((seg.x_start + seg.v * (s - seg.t_start), seg.v));
            }
        }
        Ok((self.end.x, self.end.v))
    }

    /// Largest `k` such that no inflection stop occurs at events `1..=k` and
    /// the path length up to event `k` is at most `length`.
    pub fn count_within(&self, length: T) -> usize {
        let mut travelled = T::zero();
        let mut prev = self.origin.x;
        let mut n = 0;
        for e in &self.events {
            travelled += (e.x - prev).norm();
            prev = e.x;
            let stop = matches!(
                (self.direction, e.graze),
                (Direction::Backward, GrazingClass::InflectionMinus) | (Direction::Forward, GrazingClass::InflectionPlus)
            ) && self.status.is_frozen();
            if stop || travelled > length {
                break;
            }
            n += 1;
        }
        n
    }
}

/// `|(x × ẑ)·v|`.
pub fn angular_momentum<T: Scalar>(x: Vec3<T>, v: Vec3<T>) -> T {
    signed_angular_momentum(x, v).abs()
}

/// `x_x v_y − x_y v_x`, positive when the azimuth increases.
pub fn signed_angular_momentum<T: Scalar>(x: Vec3<T>, v: Vec3<T>) -> T {
    x.x * v.y - x.y * v.x
}

/// Specular reflection `v − 2(n·v)n` about the unit normal `n`.
#[inline]
pub fn reflect_about<T: Scalar>(n: Vec3<T>, v: Vec3<T>) -> Vec3<T> {
    v - n * (T::two() * n.dot(v))
}

/// Reflection at a boundary point, using the normalized indicator gradient.
pub fn reflect<T: Scalar>(domain: &ToroidalDomain<T>, x_b: Vec3<T>, v: Vec3<T>) -> Result<Vec3<T>> {
    let n = domain
        .grad_xi(x_b)
        .normalized()
        .ok_or_else(|| Error::Precondition("indicator gradient vanishes at the reflection point".into()))?;
    Ok(reflect_about(n, v))
}

/// Result of searching a ray for the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RayOutcome<T> {
    /// First crossing at distance `s` (possibly zero).
    Hit { s: T, point: Vec3<T> },
    /// Tangential touch without crossing.
    Touch { s: T, point: Vec3<T> },
    /// No boundary within the allowed length.
    Clear,
}

/// Marches from `x` along the unit direction `d` for at most `max_len`.
///
/// With `inward_start` the starting point is treated as interior even when it
/// sits on the boundary; otherwise a boundary start whose ray leaves the
/// domain returns a zero-length hit.
pub fn ray_exit<T: Scalar>(domain: &ToroidalDomain<T>, x: Vec3<T>, d: Vec3<T>, max_len: T, inward_start: bool) -> Result<RayOutcome<T>> {
    let band = T::lit(BOUNDARY_BAND);
    let inr = domain.profile().inradius();
    let h_max = inr * T::lit(MARCH_FRACTION);
    let h_min = inr * T::lit(MIN_STEP_FRACTION);
    let probe = |s: T| {
        let p = x + d * s;
        let (f, g) = domain.xi_grad(p);
        (f, g.dot(d), p)
    };
    let (f0, fp0, _) = probe(T::zero());
    if f0 > band && !inward_start {
        return Err(Error::Precondition(format!("ray origin outside the domain (xi = {:e})", f0.to_f64_lossy())));
    }
    if !inward_start && f0.abs() <= band && fp0 > T::zero() {
        return Ok(RayOutcome::Hit { s: T::zero(), point: x });
    }

    let mut s = T::zero();
    let mut fp = fp0;
    let mut dist = domain.boundary_distance(x);
    while s < max_len {
        let step = dist.max(h_min).min(h_max).min(max_len - s);
        let s1 = s + step;
        let (f1, fp1, p1) = probe(s1);
        if f1 > T::zero() {
            return refine_crossing(domain, x, d, s, s1).map(|(s, point)| RayOutcome::Hit { s, point });
        }
        let dist1 = domain.boundary_distance(p1);
        if dist + dist1 < step && fp > T::zero() && fp1 < T::zero() {
            let (sm, fm) = locate_max(domain, x, d, s, s1);
            if fm > T::zero() {
                return refine_crossing(domain, x, d, s, sm).map(|(s, point)| RayOutcome::Hit { s, point });
            }
            if fm >= -T::lit(TOUCH_BAND) {
                return Ok(RayOutcome::Touch { s: sm, point: x + d * sm });
            }
        }
        s = s1;
        fp = fp1;
        dist = dist1;
    }
    Ok(RayOutcome::Clear)
}

/// Crossing in `[lo, hi]`, with `lo` taken as interior and `ξ(hi) > 0`.
fn refine_crossing<T: Scalar>(domain: &ToroidalDomain<T>, x: Vec3<T>, d: Vec3<T>, mut lo: T, mut hi: T) -> Result<(T, Vec3<T>)> {
    let width = T::epsilon() * T::lit(4.0) * (T::one() + hi);
    let floor = T::epsilon() * T::lit(8.0);
    let mut s = hi;
    let mut f = T::infinity();
    for _ in 0..200 {
        let (fs, g) = domain.xi_grad(x + d * s);
        f = fs;
        if f > T::zero() {
            hi = s;
        } else {
            lo = s;
        }
        if f.abs() <= floor || hi - lo <= width {
            break;
        }
        let fp = g.dot(d);
        let newton = s - f / fp;
        s = if fp != T::zero() && newton > lo && newton < hi { newton } else { (lo + hi) * T::half() };
    }
    if f.abs() > T::lit(ROOT_XI_TOL) && hi - lo > width {
        return Err(Error::NewtonFailed { iterations: 200, residual: f.to_f64_lossy() });
    }
    Ok((s, x + d * s))
}

/// Maximum of `ξ` along the ray in `[lo, hi]`, where the directional
/// derivative goes from positive to negative.
fn locate_max<T: Scalar>(domain: &ToroidalDomain<T>, x: Vec3<T>, d: Vec3<T>, mut lo: T, mut hi: T) -> (T, T) {
    for _ in 0..100 {
        if hi - lo <= T::epsilon() * T::lit(4.0) * (T::one() + hi) {
            break;
        }
        let mid = (lo + hi) * T::half();
        let (_, g) = domain.xi_grad(x + d * mid);
        if g.dot(d) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let sm = (lo + hi) * T::half();
    (sm, domain.xi(x + d * sm))
}

fn ray_length_bound<T: Scalar>(domain: &ToroidalDomain<T>) -> T {
    T::lit(4.0) * (domain.rho_max() + domain.profile().period())
}

/// `t_b(x, v)`: the first time the backward ray `x − s v` meets the boundary,
/// with `t_b = 0` when a boundary start immediately leaves the domain.
pub fn backward_exit<T: Scalar>(domain: &ToroidalDomain<T>, x: Vec3<T>, v: Vec3<T>) -> Result<(T, Vec3<T>)> {
    exit_along(domain, x, -v)
}

/// Forward analogue of [`backward_exit`].
pub fn forward_exit<T: Scalar>(domain: &ToroidalDomain<T>, x: Vec3<T>, v: Vec3<T>) -> Result<(T, Vec3<T>)> {
    exit_along(domain, x, v)
}

fn exit_along<T: Scalar>(domain: &ToroidalDomain<T>, x: Vec3<T>, w: Vec3<T>) -> Result<(T, Vec3<T>)> {
    let speed = w.norm();
    let d = w.normalized().ok_or_else(|| Error::Precondition("zero velocity".into()))?;
    match ray_exit(domain, x, d, ray_length_bound(domain), false)? {
        RayOutcome::Hit { s, point } => Ok((s / speed, point)),
        RayOutcome::Touch { s, .. } => Err(Error::GrazingAmbiguous { s: s.to_f64_lossy() }),
        RayOutcome::Clear => Err(Error::Precondition("ray never meets the boundary".into())),
    }
}

/// Azimuth swept when moving in a straight line from `a` to `b`.
#[inline]
pub fn azimuth_increment<T: Scalar>(a: Vec3<T>, b: Vec3<T>) -> T {
    (a.x * b.y - a.y * b.x).atan2(a.x * b.x + a.y * b.y)
}

/// Runs backward cycles from `state`.
pub fn backward_cycles<T: Scalar>(
    domain: &ToroidalDomain<T>,
    state: PhaseState<T>,
    budget: Budget<T>,
    caps: Caps<T>,
) -> Result<Trajectory<T>> {
    run_cycles(domain, state, state.x.azimuth(), Direction::Backward, budget, caps)
}

/// Runs forward cycles from `state`.
pub fn forward_cycles<T: Scalar>(
    domain: &ToroidalDomain<T>,
    state: PhaseState<T>,
    budget: Budget<T>,
    caps: Caps<T>,
) -> Result<Trajectory<T>> {
    run_cycles(domain, state, state.x.azimuth(), Direction::Forward, budget, caps)
}

/// Cycles in either direction with an explicit unwrapped azimuth for the origin.
pub fn run_cycles<T: Scalar>(
    domain: &ToroidalDomain<T>,
    state: PhaseState<T>,
    origin_phi: T,
    direction: Direction,
    budget: Budget<T>,
    caps: Caps<T>,
) -> Result<Trajectory<T>> {
    state.validate(domain)?;
    let speed = state.v.norm();
    let total = match budget {
        Budget::Length(l) => l,
        Budget::Time(t) => t * speed,
    };
    if !(total >= T::zero()) {
        return Err(Error::Precondition("budget must be nonnegative".into()));
    }
    let sign: T = direction.sign();
    let stop_class = match direction {
        Direction::Backward => GrazingClass::InflectionMinus,
        Direction::Forward => GrazingClass::InflectionPlus,
    };
    let stop_status = match direction {
        Direction::Backward => TrajectoryStatus::StoppedAtInflectionMinus,
        Direction::Forward => TrajectoryStatus::StoppedAtInflectionPlus,
    };
    let omega0 = angular_momentum(state.x, state.v);
    let omega_scale = if omega0 > T::zero() { omega0 } else { T::one() };

    let mut traj = Trajectory {
        direction,
        origin: state,
        origin_phi,
        events: Vec::new(),
        end: state,
        end_phi: origin_phi,
        total_length: T::zero(),
        winding: T::zero(),
        status: TrajectoryStatus::Completed,
        diagnostics: Diagnostics::default(),
    };

    let mut x = state.x;
    let mut v = state.v;
    let mut t = state.t;
    let mut phi = origin_phi;
    let mut used = T::zero();
    let mut inward = false;

    let record = |traj: &mut Trajectory<T>, e: BounceEvent<T>| {
        let d = &mut traj.diagnostics;
        d.speed_drift = d.speed_drift.max((e.v_out.norm() - speed).abs() / speed);
        d.omega_drift = d.omega_drift.max((angular_momentum(e.x, e.v_out) - omega0).abs() / omega_scale);
        traj.events.push(e);
    };
    let finish = |traj: &mut Trajectory<T>, x: Vec3<T>, v: Vec3<T>, t: T, phi: T, used: T, status: TrajectoryStatus| {
        traj.end = PhaseState::new(x, v, t);
        traj.end_phi = phi;
        traj.total_length = used;
        traj.winding = (phi - origin_phi) / T::TAU();
        traj.status = status;
    };

    if domain.classify_point(x) == PointClass::Boundary {
        let n = domain.grad_xi(x).normalized().ok_or_else(|| Error::Precondition("indicator gradient vanishes".into()))?;
        let nd = n.dot(v) / speed;
        if nd.abs() < caps.graze_threshold {
            let class = match classify(domain, x, v) {
                Ok(c) => c,
                Err(Error::GrazingAmbiguous { .. }) => {
                    finish(&mut traj, x, v, t, phi, used, TrajectoryStatus::GrazingAmbiguous);
                    return Ok(traj);
                }
                Err(e) => return Err(e),
            };
            if class == GrazingClass::ConvexGrazing {
                finish(&mut traj, x, v, t, phi, used, TrajectoryStatus::StuckConvexGrazing);
                return Ok(traj);
            }
            if class == stop_class {
                finish(&mut traj, x, v, t, phi, used, stop_status);
                return Ok(traj);
            }
            inward = true;
        }
    }

    loop {
        if traj.events.len() >= caps.max_bounces {
            finish(&mut traj, x, v, t, phi, used, TrajectoryStatus::MaxBouncesReached);
            return Ok(traj);
        }
        let d = v * (sign / speed);
        let remaining = total - used;
        let outcome = ray_exit(domain, x, d, remaining, inward)?;
        let (s, point, touch) = match outcome {
            RayOutcome::Clear => {
                let end = x + d * remaining;
                let phi_end = phi + azimuth_increment(x, end);
                let t_end = match budget {
                    Budget::Time(span) => state.t + sign * span,
                    Budget::Length(_) => t + sign * remaining / speed,
                };
                finish(&mut traj, end, v, t_end, phi_end, total, TrajectoryStatus::Completed);
                return Ok(traj);
            }
            RayOutcome::Hit { s, point } => (s, point, false),
            RayOutcome::Touch { s, point } => (s, point, true),
        };
        phi += azimuth_increment(x, point);
        used += s;
        t += sign * s / speed;
        x = point;
        let sp = domain.boundary_params(x, phi).ok();
        let tau = sp.map(|p| p.tau).unwrap_or_else(T::nan);
        let n = domain.grad_xi(x).normalized().ok_or_else(|| Error::Precondition("indicator gradient vanishes".into()))?;
        let normal_dot = n.dot(v) / speed;
        let k = traj.events.len() + 1;

        if touch {
            record(&mut traj, BounceEvent { k, t, x, tau, phi, v_in: v, v_out: v, normal_dot, graze: GrazingClass::ConcaveGrazing });
            inward = true;
            continue;
        }

        let mut graze = GrazingClass::NonGrazing;
        if normal_dot.abs() < caps.graze_threshold {
            let class = match classify(domain, x, v) {
                Ok(c) => Some(c),
                Err(Error::GrazingAmbiguous { .. }) => None,
                Err(e) => return Err(e),
            };
            let terminal = match class {
                None => Some(TrajectoryStatus::GrazingAmbiguous),
                Some(GrazingClass::ConvexGrazing) => Some(TrajectoryStatus::StuckConvexGrazing),
                Some(c) if c == stop_class => Some(stop_status),
                _ => None,
            };
            if let Some(status) = terminal {
                let g = class.unwrap_or(GrazingClass::NonGrazing);
                record(&mut traj, BounceEvent { k, t, x, tau, phi, v_in: v, v_out: v, normal_dot, graze: g });
                finish(&mut traj, x, v, t, phi, used, status);
                return Ok(traj);
            }
            graze = class.unwrap_or(GrazingClass::NonGrazing);
        }
        let v_out = reflect_about(n, v);
        record(&mut traj, BounceEvent { k, t, x, tau, phi, v_in: v, v_out, normal_dot, graze });
        v = v_out;
        inward = true;
    }
}

/// Time until the forward trajectory from `(x, v)` has swept the azimuth
/// `−phi_unwrapped`, i.e. reaches the half-plane `S₀` for the first time.
///
/// States with negative signed angular momentum are mirrored through the
/// plane `y = 0` first, so the sweep is always counted in the direction of motion.
pub fn arrival_time_s0<T: Scalar>(domain: &ToroidalDomain<T>, x: Vec3<T>, phi_unwrapped: T, v: Vec3<T>, caps: Caps<T>) -> Result<T> {
    let lz = signed_angular_momentum(x, v);
    if !(lz.abs() > T::zero()) {
        return Err(Error::Precondition("arrival time needs positive angular momentum".into()));
    }
    if !(phi_unwrapped < T::zero()) {
        return Err(Error::Precondition("arrival time needs a negative unwrapped azimuth".into()));
    }
    let (x, v) = if lz < T::zero() { (x.mirror_y(), v.mirror_y()) } else { (x, v) };
    let lz = lz.abs();
    let target = -phi_unwrapped;
    let speed = v.norm();
    let rmax = domain.rho_max();
    let bound = target * speed * rmax * rmax / lz * T::lit(1.05) + domain.profile().inradius();
    let state = PhaseState::new(x, v, T::zero());
    let traj = run_cycles(domain, state, phi_unwrapped, Direction::Forward, Budget::Length(bound), caps)?;

    let mut swept = T::zero();
    for seg in traj.segments() {
        let dphi = azimuth_increment(seg.x_start, seg.x_stop);
        if swept + dphi >= target {
            let alpha = seg.x_start.azimuth() + (target - swept);
            let n_alpha = Vec3::new(-alpha.sin(), alpha.cos(), T::zero());
            let denom = seg.v.dot(n_alpha);
            let ds = if denom != T::zero() { -seg.x_start.dot(n_alpha) / denom } else { T::zero() };
            let len = seg.t_stop - seg.t_start;
            return Ok(seg.t_start + ds.max(T::zero()).min(len));
        }
        swept += dphi;
    }
    Err(Error::Stopped(format!("{} after sweeping {}", traj.status.as_str(), swept.to_f64_lossy())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus() -> ToroidalDomain<f64> {
        ToroidalDomain::circle_torus(2.0, 1.0).unwrap()
    }

    #[test]
    fn backward_exit_goldens() {
        let d = torus();
        let (tb, xb) = backward_exit(&d, Vec3::new(2.0, 0.0, 0.0), Vec3::new(-1.0, 0.0, 0.0)).unwrap();
        assert!((tb - 1.0).abs() < 1e-12 && (xb - Vec3::new(3.0, 0.0, 0.0)).norm() < 1e-12);
        let (tb, xb) = backward_exit(&d, Vec3::new(2.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0)).unwrap();
        assert!((tb - 1.0).abs() < 1e-12 && (xb - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-12);
        let (tb, _) = backward_exit(&d, Vec3::new(3.0, 0.0, 0.0), Vec3::new(-1.0, 0.0, 0.0)).unwrap();
        assert_eq!(tb, 0.0);
        let (tb, xb) = backward_exit(&d, Vec3::new(2.0, 0.0, 0.0), Vec3::new(0.0, 0.0, 1.0)).unwrap();
        assert!((tb - 1.0).abs() < 1e-12 && (xb - Vec3::new(2.0, 0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn reflection_basics() {
        let n = Vec3::new(1.0, 0.0, 0.0);
        assert_eq!(reflect_about(n, Vec3::new(1.0, 0.0, 0.0)), Vec3::new(-1.0, 0.0, 0.0));
        assert_eq!(reflect_about(n, Vec3::new(0.0, 1.0, 0.0)), Vec3::new(0.0, 1.0, 0.0));
    }

    #[test]
    fn angular_momentum_goldens() {
        assert_eq!(angular_momentum(Vec3::new(3.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)), 3.0);
        assert_eq!(angular_momentum(Vec3::new(3.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0)), 0.0);
    }

    #[test]
    fn cap_semantics() {
        let d = torus();
        let st = PhaseState::new(Vec3::new(2.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.3), 0.0);
        let caps = Caps { max_bounces: 5, ..Caps::default() };
        let tr = backward_cycles(&d, st, Budget::Length(1e3), caps).unwrap();
        assert_eq!(tr.status, TrajectoryStatus::MaxBouncesReached);
        assert_eq!(tr.events.len(), 5);
    }
}
