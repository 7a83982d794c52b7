use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torbil::analysis::*;
use torbil::domain::ToroidalDomain;
use torbil::engine::*;
use torbil::error::Error;
use torbil::profile::ProfileCurve;
use torbil::vec3::Vec3;

fn torus() -> ToroidalDomain<f64> {
    ToroidalDomain::circle_torus(2.0, 1.0).unwrap()
}

fn unit(rng: &mut ChaCha8Rng) -> Vec3<f64> {
    loop {
        let w = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let n = w.norm();
        if n > 0.1 && n <= 1.0 {
            return w / n;
        }
    }
}

fn interior_point(rng: &mut ChaCha8Rng, d: &ToroidalDomain<f64>) -> Vec3<f64> {
    loop {
        let p = Vec3::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-1.0..1.0));
        if d.xi(p) < -1e-2 {
            return p;
        }
    }
}

// ---------- bounce counts ----------

#[test]
fn triangle_bounce_count() {
    let d = torus();
    let s3 = 3f64.sqrt();
    let chord = 3.0 * s3;
    let x = Vec3::new(3.0, 0.0, 0.0);
    // Backward ray heads inward immediately: three chords, three bounces.
    let v = Vec3::new(s3 / 2.0, -0.5, 0.0);
    let n = bounce_count(&d, x, v, 3.0 * chord * (1.0 + 1e-12), Caps::default()).unwrap();
    assert_eq!(n, BounceCount { n: 3, capped: false });
    assert_eq!(bounce_count(&d, x, v, 0.5 * chord, Caps::default()).unwrap().n, 0);
    // The opposite orientation starts with a zero-length cycle at x itself.
    let n = bounce_count(&d, x, -v, 3.0 * chord * (1.0 + 1e-12), Caps::default()).unwrap();
    assert_eq!(n.n, 4);
}

#[test]
fn bounce_count_cap_is_flagged() {
    let d = torus();
    let n = bounce_count(&d, Vec3::new(2.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.2), 1e4, Caps { max_bounces: 7, ..Caps::default() }).unwrap();
    assert!(n.capped);
    assert_eq!(n.n, 7);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn bounce_count_is_monotone_in_length(seed in 0u64..1000, l1 in 0.1..15.0f64, dl in 0.0..10.0f64) {
        let d = torus();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = interior_point(&mut rng, &d);
        let v = unit(&mut rng);
        let a = bounce_count(&d, x, v, l1, Caps::default()).unwrap();
        let b = bounce_count(&d, x, v, l1 + dl, Caps::default()).unwrap();
        prop_assert!(a.n <= b.n);
    }
}

// ---------- rings ----------

#[test]
fn azimuthal_direction_is_aligned_and_not_perp() {
    let d = torus();
    let x = Vec3::new(2.0, 0.0, 0.0);
    let v = ToroidalDomain::phi_hat(0.0);
    for eps in [1e-9, 1e-3, 0.5] {
        let f = ring_membership(
            &d,
            x,
            v,
            &[RingSpec { kind: RingKind::AzimuthAligned, epsilon: eps }, RingSpec { kind: RingKind::Perp, epsilon: eps }],
        )
        .unwrap();
        assert_eq!(f, vec![true, false]);
    }
    assert!((angular_momentum(x, v) - 2.0).abs() < 1e-15);
}

#[test]
fn meridian_direction_is_perp() {
    let d = torus();
    let x = Vec3::new(1.5, 1.5, 0.2);
    let v = (Vec3::new(1.0, 1.0, 0.0) / 2f64.sqrt() * 0.6 + Vec3::new(0.0, 0.0, 0.8)).normalized().unwrap();
    let f = ring_membership(&d, x, v, &[RingSpec { kind: RingKind::Perp, epsilon: 1e-9 }]).unwrap();
    assert_eq!(f, vec![true]);
    let (vx, vphi, vy) = cross_section_components(x, v);
    assert!((vx - 0.6).abs() < 1e-12 && vphi.abs() < 1e-12 && (vy - 0.8).abs() < 1e-12);
}

#[test]
fn symmetric_ring() {
    let d = torus();
    let x = Vec3::new(0.0, 2.0, 0.0);
    // At φ = π/2 the radial direction is ŷ.
    let v = Vec3::new(0.0, 0.6, -0.6).normalized().unwrap();
    let spec = [RingSpec { kind: RingKind::Symmetric, epsilon: 1e-6 }];
    assert_eq!(ring_membership(&d, x, v, &spec).unwrap(), vec![true]);
    assert_eq!(ring_membership(&d, x, Vec3::new(0.0, 0.0, 1.0), &spec).unwrap(), vec![false]);
}

#[test]
fn angular_momentum_ring_reference() {
    let d = torus();
    let w = reference_omega(&d, 2.0 * PI / 3.0).unwrap();
    assert!((w - 1.5 * (PI / 6.0).cos()).abs() < 1e-12, "{w}");
    let spec = [RingSpec { kind: RingKind::AngularMomentum { tau_ref: 2.0 * PI / 3.0 }, epsilon: 1e-3 }];
    let x = Vec3::new(w / 0.5, 0.0, 0.0);
    let v = Vec3::new(0.0, 0.5, 0.866_025_403_784_438_6);
    assert_eq!(ring_membership(&d, x, v, &spec).unwrap(), vec![true]);
    assert_eq!(ring_membership(&d, x, Vec3::new(0.0, 0.6, 0.8), &spec).unwrap(), vec![false]);
    // Undefined outside the inner arc and at the zero of h.
    assert!(reference_omega(&d, 0.1).is_err());
    assert!(reference_omega(&d, PI).is_err());
    let bad = [RingSpec { kind: RingKind::AngularMomentum { tau_ref: PI }, epsilon: 1e-3 }];
    assert!(matches!(ring_membership(&d, x, v, &bad), Err(Error::UndefinedInflection { .. })));
}

// ---------- bad set ----------

fn cfg(x: Vec3<f64>, eps: f64, length: f64, n: usize, seed: u64) -> BadSetConfig<f64> {
    BadSetConfig {
        x,
        phi: 0.0,
        eps_graze: eps,
        length,
        n_samples: n,
        seed,
        speed_band: None,
        rings: vec![],
        caps: Caps::default(),
        workers: 0,
    }
}

#[test]
fn zero_threshold_has_no_near_grazing() {
    let d = torus();
    let r = badset_measure(&d, &cfg(Vec3::new(2.0, 0.0, 0.0), 0.0, 10.0, 2000, 5)).unwrap();
    assert_eq!(r.breakdown.near_grazing, 0);
    assert!((0.0..=1.0).contains(&r.fraction));
}

#[test]
fn outer_base_with_short_length_never_stops_at_inflection() {
    let d = torus();
    // Nearest inner-region point (2, 0, 1) is at distance √1.81 > 1.
    let r = badset_measure(&d, &cfg(Vec3::new(2.9, 0.0, 0.0), 0.05, 1.0, 4000, 9)).unwrap();
    assert_eq!(r.breakdown.inflection_stop, 0);
}

#[test]
fn ci_shrinks_like_inverse_sqrt_n() {
    let d = torus();
    let mut c = cfg(Vec3::new(2.0, 0.0, 0.0), 0.05, 5.0, 4000, 21);
    c.rings = vec![RingSpec { kind: RingKind::Perp, epsilon: 0.3 }];
    let a = badset_measure(&d, &c).unwrap();
    c.n_samples = 8000;
    let b = badset_measure(&d, &c).unwrap();
    let ratio = a.ci95 / b.ci95;
    assert!((ratio / 2f64.sqrt() - 1.0).abs() < 0.2, "ratio {ratio}");
    assert!(a.breakdown.ring_excluded > 0);
}

#[test]
fn report_is_independent_of_worker_count() {
    let d = torus();
    let mut c = cfg(Vec3::new(2.0, 0.0, 0.3), 0.05, 10.0, 1500, 77);
    c.speed_band = Some((0.5, 2.0));
    c.workers = 1;
    let a = badset_measure(&d, &c).unwrap();
    c.workers = 3;
    let b = badset_measure(&d, &c).unwrap();
    assert_eq!(a, b);
}

#[test]
fn too_few_samples_is_rejected() {
    let d = torus();
    assert!(badset_measure(&d, &cfg(Vec3::new(2.0, 0.0, 0.0), 0.01, 1.0, 10, 0)).is_err());
}

#[test]
fn good_set_bounce_count_is_stable_under_reseeding() {
    let d = torus();
    let rings = vec![
        RingSpec { kind: RingKind::AngularMomentum { tau_ref: 2.0 * PI / 3.0 }, epsilon: 0.05 },
        RingSpec { kind: RingKind::Perp, epsilon: 0.05 },
        RingSpec { kind: RingKind::AzimuthAligned, epsilon: 0.05 },
        RingSpec { kind: RingKind::Symmetric, epsilon: 0.05 },
    ];
    let mut maxes = vec![];
    for seed in [1, 2, 3] {
        let mut c = cfg(Vec3::new(2.0, 0.0, 0.0), 0.05, 10.0, 20_000, seed);
        c.rings = rings.clone();
        maxes.push(badset_measure(&d, &c).unwrap().max_bounces_good);
    }
    let lo = *maxes.iter().min().unwrap();
    let hi = *maxes.iter().max().unwrap();
    assert!(hi - lo <= 1, "{maxes:?}");
}

// ---------- Jacobian ----------

#[test]
fn free_flight_cube_law() {
    let d = torus();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100 {
        let x = interior_point(&mut rng, &d);
        let dir = unit(&mut rng);
        let span: f64 = rng.random_range(0.1..5.0);
        let (tb, _) = backward_exit(&d, x, dir).unwrap();
        let v = dir * (0.5 * tb / span);
        let r = jacobian_det(&d, PhaseState::new(x, v, 0.0), -span, 1e-5, Caps::default()).unwrap();
        assert_eq!(r.bounces, 0);
        assert!((r.det + span.powi(3)).abs() / span.powi(3) < 1e-6, "det {} span {span}", r.det);
    }
}

#[test]
fn free_flight_goldens() {
    let d = torus();
    let x = Vec3::new(2.0, 0.0, 0.0);
    let v = Vec3::new(0.1, 0.2, 0.1);
    let r = jacobian_det(&d, PhaseState::new(x, v, 1.0), -1.0, 1e-5, Caps::default()).unwrap();
    assert!((r.det + 8.0).abs() < 8e-6);
    let r = jacobian_det(&d, PhaseState::new(x, v, 1.0), 0.5, 1e-5, Caps::default()).unwrap();
    assert!((r.det.abs() - 0.125).abs() < 1.25e-7);
}

#[test]
fn one_bounce_planar_richardson() {
    let d = torus();
    // Off the tube centre, which is a focal point of the meridian circle.
    let st = PhaseState::new(Vec3::new(2.3, 0.0, 0.2), Vec3::new(1.0, 0.0, 0.3), 0.0);
    let tr = backward_cycles(&d, st, Budget::Length(5.0), Caps::default()).unwrap();
    let s = 0.5 * (tr.events[0].t + tr.events[1].t);
    let r = jacobian_det(&d, st, s, 1e-5, Caps::default()).unwrap();
    assert_eq!(r.bounces, 1);
    assert!(r.rel_spread < 1e-4, "{r:?}");
    assert!(r.det.abs() > 1e-3);
}

#[test]
fn grazing_perturbation_is_non_smooth() {
    let d = torus();
    let (c, s) = (PI / 6.0).cos_sin();
    // The backward ray is tangent to the inner equator ρ = 1.
    let st = PhaseState::new(Vec3::new(2.0, 0.0, 0.0), Vec3::new(c, -s, 0.0), 0.0);
    let r = jacobian_det(&d, st, -2.5, 1e-5, Caps::default());
    assert!(matches!(r, Err(Error::NonSmoothPoint { .. })), "{r:?}");
}

#[test]
fn evaluation_near_a_bounce_is_rejected() {
    let d = torus();
    let st = PhaseState::new(Vec3::new(2.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0), 0.0);
    assert!(matches!(jacobian_det(&d, st, -1.0, 1e-5, Caps::default()), Err(Error::Precondition(_))));
}

trait CosSin {
    fn cos_sin(self) -> (f64, f64);
}
impl CosSin for f64 {
    fn cos_sin(self) -> (f64, f64) {
        (self.cos(), self.sin())
    }
}

// ---------- specular basis ----------

#[test]
fn specular_basis_is_orthonormal_and_right_handed() {
    let d = torus();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut checked = 0;
    while checked < 1000 {
        let st = PhaseState::new(interior_point(&mut rng, &d), unit(&mut rng) * rng.random_range(0.5..2.0), 0.0);
        let tr = backward_cycles(&d, st, Budget::Length(20.0), Caps { max_bounces: 20, ..Caps::default() }).unwrap();
        for e in &tr.events {
            let Ok([e0, e1, e2]) = specular_basis(&d, e.x, e.v_out, 1e-7) else { continue };
            let phi_hat = ToroidalDomain::phi_hat(e.x.azimuth());
            for (a, b, want) in [(e0, e0, 1.0), (e1, e1, 1.0), (e2, e2, 1.0), (e0, e1, 0.0), (e0, e2, 0.0), (e1, e2, 0.0)] {
                assert!((a.dot(b) - want).abs() < 1e-12);
            }
            assert!((e0.cross(e1) - e2).norm() < 1e-12);
            assert!((e0.dot(e.v_out) - e.v_out.norm()).abs() < 1e-12);
            assert!(e1.dot(phi_hat).abs() < 1e-12);
            checked += 1;
        }
    }
}

#[test]
fn specular_basis_degenerate_cases() {
    let d = torus();
    let x = d.sigma(0.0, 0.0);
    let v = ToroidalDomain::phi_hat(0.0);
    assert!(matches!(specular_basis(&d, x, v, 1e-7), Err(Error::Precondition(_))));
    assert!(matches!(specular_basis(&d, x, v, 0.0), Err(Error::DegenerateBasis)));
}

// ---------- recurrence ----------

/// Independent 2D billiard in the ellipse ((ρ−c)/a)² + (z/b)² = 1.
fn ellipse_billiard(c: f64, a: f64, b: f64, mut p: [f64; 2], mut d: [f64; 2], n: usize) -> Vec<[f64; 2]> {
    let mut out = vec![];
    for _ in 0..n {
        let (px, pz) = ((p[0] - c) / a, p[1] / b);
        let (dx, dz) = (d[0] / a, d[1] / b);
        let qa = dx * dx + dz * dz;
        let qb = 2.0 * (px * dx + pz * dz);
        let qc = px * px + pz * pz - 1.0;
        let t = (-qb + (qb * qb - 4.0 * qa * qc).sqrt()) / (2.0 * qa);
        p = [p[0] + t * d[0], p[1] + t * d[1]];
        let nrm = [(p[0] - c) / (a * a), p[1] / (b * b)];
        let nn = (nrm[0] * nrm[0] + nrm[1] * nrm[1]).sqrt();
        let k = 2.0 * (d[0] * nrm[0] + d[1] * nrm[1]) / (nn * nn);
        d = [d[0] - k * nrm[0], d[1] - k * nrm[1]];
        out.push(p);
    }
    out
}

#[test]
fn meridian_ellipse_matches_planar_oracle() {
    let prof = ProfileCurve::ellipse(3.0, 1.0, 0.6).unwrap();
    let d = ToroidalDomain::new(prof).unwrap();
    let p0 = [3.1, 0.05];
    let v0 = [0.3, 0.7];
    let st = PhaseState::new(Vec3::new(p0[0], 0.0, p0[1]), Vec3::new(v0[0], 0.0, v0[1]), 0.0);
    let tr = forward_cycles(&d, st, Budget::Length(1e3), Caps { max_bounces: 30, ..Caps::default() }).unwrap();
    let oracle = ellipse_billiard(3.0, 1.0, 0.6, p0, v0, 30);
    for (e, q) in tr.events.iter().zip(&oracle) {
        assert!((e.x.x - q[0]).abs() < 1e-7 && (e.x.z - q[1]).abs() < 1e-7, "k={} {:?} vs {:?}", e.k, e.x, q);
    }
}

#[test]
fn meridian_recurrence_reduces_to_planar_form() {
    let prof = ProfileCurve::ellipse(3.0, 1.0, 0.6).unwrap();
    let d = ToroidalDomain::new(prof).unwrap();
    let opts = RecurrenceOptions { gate: 0.1, inner_only: false, epsilon: 0.05 };
    let mut level_max = vec![];
    for alpha in [0.04f64, 0.02, 0.01, 0.005] {
        // Whispering-gallery launch from the outer vertex.
        let x = d.sigma(0.0, 0.0);
        let t = d.meridian_tangent(0.0, 0.0);
        let n = d.outward_normal(0.0, 0.0);
        let v = t * alpha.cos() - n * alpha.sin();
        let tr = forward_cycles(&d, PhaseState::new(x, v, 0.0), Budget::Length(2.0), Caps::default()).unwrap();
        let recs: Vec<RecurrenceRecord<f64>> = recurrence_residuals(&d, &tr, opts);
        assert!(recs.len() > 5);
        let mut m: f64 = 0.0;
        for r in &recs {
            assert!(r.d_phi.abs() < 1e-12 && r.r1 < 1e-9);
            let want = (r.d_tau_next - r.d_tau).abs() / (r.d_tau * r.d_tau + r.d_tau_next * r.d_tau_next);
            assert!((r.r2 - want).abs() <= 1e-9 * want.max(1.0));
            m = m.max(r.r2);
        }
        level_max.push(m);
    }
    let hi = level_max.iter().cloned().fold(0.0, f64::max);
    let lo = level_max.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(hi <= 10.0 * lo, "{level_max:?}");
}

#[test]
fn large_steps_fail_the_gate() {
    let d = torus();
    let st = PhaseState::new(Vec3::new(2.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.3), 0.0);
    let tr = forward_cycles(&d, st, Budget::Length(100.0), Caps::default()).unwrap();
    assert!(recurrence_residuals(&d, &tr, RecurrenceOptions::default()).is_empty());
}

#[test]
fn short_trajectory_gives_empty_report() {
    let d = torus();
    let st = PhaseState::new(Vec3::new(2.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0), 0.0);
    let tr = forward_cycles(&d, st, Budget::Length(2.5), Caps::default()).unwrap();
    assert!(tr.events.len() < 3);
    assert!(recurrence_residuals(&d, &tr, RecurrenceOptions::default()).is_empty());
}
