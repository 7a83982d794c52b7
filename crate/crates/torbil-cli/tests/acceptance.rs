//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torbil::analysis::{badset_measure, jacobian_det, recurrence_residuals, tangent_launch, BadSetConfig, RecurrenceOptions};
use torbil::engine::{backward_cycles, backward_exit, forward_cycles, reflect};
use torbil::grazing::{inflection_directions, normal_curvature, normal_curvature_hessian, principal_curvatures};
use torbil::ortho::{run_identity_suite, AnnulusChart, SuiteConfig};
use torbil::profile::{find_markers, zero_set_h};
use torbil::{Budget, Caps, Domain, Error, ProfileCurve, State, Vec3f};

type Verdict = (bool, String);
type Criterion = (&'static str, fn() -> Verdict);

fn torus() -> Domain {
    Domain::circle_torus(2.0, 1.0).unwrap()
}

fn unit(rng: &mut ChaCha8Rng) -> Vec3f {
    loop {
        let w = Vec3f::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let n = w.norm();
        if n > 0.1 && n <= 1.0 {
            return w / n;
        }
    }
}

fn random_state(rng: &mut ChaCha8Rng, d: &Domain) -> State {
    let x = loop {
        let p = Vec3f::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-1.0..1.0));
        if d.xi(p) < -1e-3 {
            break p;
        }
    };
    State::new(x, unit(rng), 0.0)
}

fn caps(max_bounces: usize) -> Caps<f64> {
    Caps { max_bounces, ..Caps::default() }
}

fn c1_conservation() -> Verdict {
    let d = torus();
    let start = Instant::now();
    let (mut speed, mut omega, mut short) = (0.0f64, 0.0f64, 0);
    for seed in 0..64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let st = random_state(&mut rng, &d);
        let tr = forward_cycles(&d, st, Budget::Length(1e6), caps(200)).unwrap();
        if tr.events.len() != 200 {
            short += 1;
        }
        speed = speed.max(tr.diagnostics.speed_drift);
        omega = omega.max(tr.diagnostics.omega_drift);
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = speed < 1e-9 && omega < 1e-8 && short == 0 && secs < 5.0;
    (ok, format!("max |v| drift {speed:.2e}, max ω drift {omega:.2e}, short runs {short}, {secs:.2} s"))
}

fn c2_reflection() -> Verdict {
    let d = torus();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let (tau, phi) = (rng.random_range(0.0..2.0 * PI), rng.random_range(-PI..PI));
        let x = d.sigma(tau, phi);
        let n = d.outward_normal(tau, phi);
        let v = unit(&mut rng);
        let r = reflect(&d, x, v).unwrap();
        let rr = reflect(&d, x, r).unwrap();
        let tangential = |w: Vec3f| w - n * n.dot(w);
        worst = worst.max((rr - v).norm()).max((tangential(r) - tangential(v)).norm()).max((r.dot(n) + v.dot(n)).abs());
    }
    (worst < 1e-14, format!("worst residual {worst:.2e} over 10^4 phases"))
}

fn c3_reversibility() -> Verdict {
    let d = torus();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut worst, mut mismatched) = (0.0f64, 0);
    for _ in 0..1000 {
        let st = random_state(&mut rng, &d);
        let probe = forward_cycles(&d, st, Budget::Length(1e6), caps(10)).unwrap();
        let last = probe.events.last().unwrap();
        let t_end = last.t + 0.25 * backward_exit(&d, last.x, -last.v_out).unwrap().0;
        let fw = forward_cycles(&d, st, Budget::Time(t_end), Caps::default()).unwrap();
        let bw = backward_cycles(&d, State::new(fw.end.x, fw.end.v, t_end), Budget::Time(t_end), Caps::default()).unwrap();
        if fw.events.len() != 10 || bw.events.len() != 10 {
            mismatched += 1;
            continue;
        }
        let (x0, v0) = bw.eval(0.0).unwrap();
        worst = worst.max((x0 - st.x).norm()).max((v0 - st.v).norm());
    }
    (worst < 1e-6 && mismatched == 0, format!("worst phase error {worst:.2e}, bounce-count mismatches {mismatched}"))
}

fn c4_golden_orbit() -> Verdict {
    let d = torus();
    let s3 = 3f64.sqrt();
    let st = State::new(Vec3f::new(3.0, 0.0, 0.0), Vec3f::new(-s3 / 2.0, 0.5, 0.0), 0.0);
    let tr = forward_cycles(&d, st, Budget::Length(9.0 * s3 * (1.0 + 1e-12)), Caps::default()).unwrap();
    let mut prev = 0.0;
    let mut dphi = 0.0f64;
    for e in &tr.events {
        dphi = dphi.max((e.phi - prev - 2.0 * PI / 3.0).abs());
        prev = e.phi;
    }
    let closes = tr.events.last().map_or(f64::INFINITY, |e| (e.x - st.x).norm());
    let ok = tr.events.len() == 3 && dphi < 1e-9 && closes < 1e-9 && (tr.winding - 1.0).abs() < 1e-9;
    (ok, format!("{} bounces, Δφ error {dphi:.1e}, closure {closes:.1e}, winding {:.12}", tr.events.len(), tr.winding))
}

fn c5_equivariance() -> Verdict {
    let d = torus();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let mut count_diff = 0;
    for _ in 0..100 {
        let st = random_state(&mut rng, &d);
        let a: f64 = rng.random_range(-PI..PI);
        let t1 = forward_cycles(&d, st, Budget::Length(1e6), caps(10)).unwrap();
        let rs = State::new(st.x.rotate_z(a), st.v.rotate_z(a), 0.0);
        let t2 = forward_cycles(&d, rs, Budget::Length(1e6), caps(10)).unwrap();
        if t1.events.len() != t2.events.len() {
            count_diff += 1;
        }
        for (e1, e2) in t1.events.iter().zip(&t2.events) {
            worst = worst.max((e1.x.rotate_z(a) - e2.x).norm()).max((e1.v_out.rotate_z(a) - e2.v_out).norm());
        }
    }
    (worst < 1e-9 && count_diff == 0, format!("worst rotated-event error {worst:.2e}"))
}

fn c6_inflection_angle() -> Verdict {
    let d = torus();
    let tau = 2.0 * PI / 3.0;
    let dirs = inflection_directions(&d, tau, 0.0).unwrap();
    let g1 = d.gamma1(tau);
    let dz = d.profile().d1(tau)[1];
    let kappa = d.profile().curvature(tau).unwrap();
    let closed = (dz.abs() / (kappa * g1)).sqrt().atan();
    let err = (dirs.theta - closed).abs().max((dirs.theta - PI / 6.0).abs());
    let (k1, k2) = principal_curvatures(&d, tau);
    let radius = 1.0 / k1.abs().max(k2);
    let x = d.sigma(tau, 0.0);
    let ladder = [1e-2, 5e-3, 2.5e-3].iter().all(|&s| {
        let s = s * radius;
        d.xi(x + dirs.i1 * s) > 0.0 && 0.0 > d.xi(x - dirs.i1 * s)
    });
    (err < 1e-12 && ladder, format!("ϑ error {err:.1e}, ladder {}", if ladder { "confirmed" } else { "violated" }))
}

fn c7_z_h() -> Verdict {
    let c = ProfileCurve::circle(2.0, 1.0).unwrap();
    let m = find_markers(&c).unwrap();
    let a = zero_set_h(&c, &m, 4096);
    let b = zero_set_h(&c, &m, 8192);
    let one = m.z_h_zeros.len() == 1 && a.len() == 1 && b.len() == 1;
    let err = if one { (m.z_h_zeros[0] - PI).abs().max((a[0] - PI).abs()).max((b[0] - PI).abs()) } else { f64::INFINITY };
    (one && err < 1e-8, format!("zeros {:?}, error {err:.1e}", m.z_h_zeros))
}

fn c8_euler() -> Verdict {
    let domains = [torus(), Domain::new(ProfileCurve::ellipse(3.0, 1.0, 0.6).unwrap()).unwrap()];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let d = &domains[i % 2];
        let (a, b) = d.profile().interval();
        let tau = rng.random_range(a..b);
        let phi = rng.random_range(-PI..PI);
        let ang = rng.random_range(0.0..2.0 * PI);
        let w = Domain::phi_hat(phi) * ang.cos() + d.meridian_tangent(tau, phi) * ang.sin();
        let kn = normal_curvature(d, tau, phi, w).unwrap();
        worst = worst.max((kn - normal_curvature_hessian(d, d.sigma(tau, phi), w)).abs());
    }
    (worst < 1e-7, format!("worst |κ_n − Hessian| {worst:.2e} over 10^3 samples"))
}

fn c9_jacobian() -> Verdict {
    let d = torus();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut cube = 0.0f64;
    for _ in 0..100 {
        let x = loop {
            let p = Vec3f::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-1.0..1.0));
            if d.xi(p) < -1e-3 {
                break p;
            }
        };
        let dir = unit(&mut rng);
        let span: f64 = rng.random_range(0.1..5.0);
        let (tb, _) = backward_exit(&d, x, dir).unwrap();
        let v = dir * (0.5 * tb / span);
        let r = jacobian_det(&d, State::new(x, v, 0.0), -span, 1e-5, Caps::default()).unwrap();
        cube = cube.max((r.det.abs() - span.powi(3)).abs() / span.powi(3));
    }
    let st = State::new(Vec3f::new(2.3, 0.0, 0.2), Vec3f::new(1.0, 0.0, 0.3), 0.0);
    let tr = backward_cycles(&d, st, Budget::Length(5.0), Caps::default()).unwrap();
    let s = 0.5 * (tr.events[0].t + tr.events[1].t);
    let one = jacobian_det(&d, st, s, 1e-5, Caps::default()).unwrap();
    let graze = State::new(Vec3f::new(2.0, 0.0, 0.0), Vec3f::new((PI / 6.0).cos(), -(PI / 6.0).sin(), 0.0), 0.0);
    let non_smooth = matches!(jacobian_det(&d, graze, -2.5, 1e-5, Caps::default()), Err(Error::NonSmoothPoint { .. }));
    let ok = cube < 1e-6 && one.bounces == 1 && one.rel_spread < 1e-4 && non_smooth;
    (ok, format!("cube-law rel error {cube:.1e}, one-bounce rel_spread {:.1e}, NonSmoothPoint {non_smooth}", one.rel_spread))
}

fn c10_badset_slope() -> Verdict {
    let d = torus();
    let deltas = [0.02f64, 0.01, 0.005];
    let n = 100_000;
    let start = Instant::now();
    let mut pts = Vec::new();
    let mut fracs = Vec::new();
    for &delta in &deltas {
        let cfg = BadSetConfig {
            x: Vec3f::new(2.0, 0.0, 0.0),
            phi: 0.0,
            eps_graze: delta,
            length: 10.0,
            n_samples: n,
            seed: 10,
            speed_band: None,
            rings: vec![],
            caps: Caps::default(),
            workers: 8,
        };
        let r = badset_measure(&d, &cfg).unwrap();
        let f = r.breakdown.near_grazing as f64 / n as f64;
        fracs.push(f);
        pts.push((delta.ln(), f.ln()));
    }
    let secs = start.elapsed().as_secs_f64();
    let slope = if pts.iter().all(|p| p.1.is_finite()) {
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / 3.0;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / 3.0;
        pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>()
    } else {
        f64::NAN
    };
    let ok = (0.7..=1.3).contains(&slope) && secs < 60.0;
    (ok, format!("fractions {fracs:?}, log-log slope {slope:.2} (target [0.7, 1.3]), {secs:.1} s"))
}

fn c11_recurrence() -> Verdict {
    let d = torus();
    let opts = RecurrenceOptions { gate: 0.1, inner_only: true, epsilon: 0.05 };
    let mut levels = Vec::new();
    for alpha in [0.02f64, 0.01, 0.005, 0.0025] {
        let st = tangent_launch(&d, 2.0 * PI / 3.0, 0.0, alpha, 0.2);
        let tr = forward_cycles(&d, st, Budget::Length(1.0), Caps::default()).unwrap();
        let recs = recurrence_residuals(&d, &tr, opts);
        let r1 = recs.iter().map(|r| r.r1).fold(0.0, f64::max);
        let r2 = recs.iter().map(|r| r.r2).fold(0.0, f64::max);
        levels.push((recs.len(), r1, r2));
    }
    let (_, r1_0, r2_0) = levels[0];
    let nonempty = levels.iter().all(|l| l.0 > 0);
    let bounded = levels.iter().all(|l| l.1.is_finite() && l.2.is_finite() && l.1 <= 10.0 * r1_0 && l.2 <= 10.0 * r2_0);
    let summary: Vec<String> = levels.iter().map(|l| format!("(n={}, r1={:.3}, r2={:.3})", l.0, l.1, l.2)).collect();
    (nonempty && bounded, summary.join(" "))
}

fn c12_identities() -> Verdict {
    let start = Instant::now();
    let rows = run_identity_suite(&AnnulusChart::default(), &SuiteConfig::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let failed: Vec<&str> = rows.iter().filter(|r| !r.pass).map(|r| r.check.as_str()).collect();
    (failed.is_empty() && secs < 1.0, format!("{} checks, failed {failed:?}, {secs:.3} s", rows.len()))
}

fn c13_determinism() -> Verdict {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_torbil"))
            .args(["--seed", "13", "badset", "--samples", "5000", "--eps", "0.05,0.02"])
            .env_remove("TORBIL_SEED")
            .env_remove("TORBIL_OUT")
            .env_remove("TORBIL_CONFIG")
            .output()
            .unwrap()
    };
    let (a, b) = (run(), run());
    let ok = a.status.success() && b.status.success() && a.stdout == b.stdout;
    (ok, format!("{} bytes, identical {}", a.stdout.len(), a.stdout == b.stdout))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 13] = [
        ("conservation", c1_conservation),
        ("reflection algebra", c2_reflection),
        ("reversibility", c3_reversibility),
        ("golden orbit", c4_golden_orbit),
        ("equivariance", c5_equivariance),
        ("inflection angle", c6_inflection_angle),
        ("zeros of h", c7_z_h),
        ("Euler formula", c8_euler),
        ("Jacobian", c9_jacobian),
        ("bad-set scaling", c10_badset_slope),
        ("recurrence diagnostics", c11_recurrence),
        ("chart identities", c12_identities),
        ("determinism", c13_determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = check();
        if !ok {
            failures += 1;
        }
        println!("criterion {:>2} {}: {name}: {detail}", i + 1, if ok { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} of 13 passed", 13 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
