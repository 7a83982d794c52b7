//! Near-grazing fraction at the tube centre across thresholds, with the
//! local log-log slope between consecutive thresholds.
//!
//! `cargo run --release --example badset_scan -- 200000`

use torbil::analysis::{badset_measure, BadSetConfig};
use torbil::{Caps, Domain, Vec3f};

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let d = Domain::circle_torus(2.0, 1.0).expect("valid torus");
    let mut prev: Option<(f64, f64)> = None;
    for delta in [0.04, 0.02, 0.01, 0.005] {
        let cfg = BadSetConfig {
            x: Vec3f::new(2.0, 0.0, 0.0),
            phi: 0.0,
            eps_graze: delta,
            length: 10.0,
            n_samples: n,
            seed: 1,
            speed_band: None,
            rings: vec![],
            caps: Caps::default(),
            workers: 0,
        };
        let r = badset_measure(&d, &cfg).expect("badset run");
        let f = r.breakdown.near_grazing as f64 / n as f64;
        let slope = prev.map(|(pd, pf): (f64, f64)| (f / pf).ln() / (delta / pd).ln());
        println!(
            "delta {delta:<7} near_grazing {:>7} fraction {f:.3e} slope {}",
            r.breakdown.near_grazing,
            slope.map_or("-".into(), |s| format!("{s:.2}"))
        );
        prev = Some((delta, f));
    }
}
