use std::f64::consts::TAU;

use serde_json::json;
use torbil::analysis::{badset_measure, jacobian_det, recurrence_residuals, tangent_launch, BadSetConfig, RecurrenceOptions};
use torbil::engine::{angular_momentum, run_cycles};
use torbil::grazing::{classify, formal_directions, inflection_directions_with, normal_curvature};
use torbil::ortho::{run_identity_suite, AnnulusChart, SuiteConfig};
use torbil::{Budget, Direction, Domain, Error, State, Vec3f};

use crate::config::{DirectionConfig, RunConfig};
use crate::error::CliError;
use crate::output::Emitter;

fn curve_record(cfg: &RunConfig) -> serde_json::Value {
    serde_json::to_value(&cfg.curve).unwrap_or_default()
}

pub fn simulate(cfg: &RunConfig) -> Result<(), CliError> {
    let domain = cfg.curve.build()?;
    let sim = &cfg.simulate;
    let state = State::new(Vec3f::from_f64(sim.x), Vec3f::from_f64(sim.v), sim.t);
    let direction = match sim.direction {
        DirectionConfig::Forward => Direction::Forward,
        DirectionConfig::Backward => Direction::Backward,
    };
    let budget = match sim.time {
        Some(t) => Budget::Time(t),
        None => Budget::Length(sim.length),
    };
    let phi = sim.phi.unwrap_or_else(|| state.x.azimuth());
    let traj = run_cycles(&domain, state, phi, direction, budget, cfg.caps()).map_err(|e| CliError::numeric(e, state))?;

    let mut out = Emitter::new(cfg, "simulate", false)?;
    out.side_record(json!({
        "record": "header",
        "curve": curve_record(cfg),
        "direction": sim.direction,
        "origin": { "x": sim.x, "v": sim.v, "t": sim.t, "phi": phi },
    }))?;
    for e in &traj.events {
        out.row(json!({
            "record": "event",
            "k": e.k,
            "t": e.t,
            "x": e.x.to_f64(),
            "tau": e.tau,
            "phi_unwrapped": e.phi,
            "v_in": e.v_in.to_f64(),
            "v_out": e.v_out.to_f64(),
            "normal_dot": e.normal_dot,
            "graze": e.graze.as_str(),
        }))?;
    }
    out.side_record(json!({
        "record": "summary",
        "status": traj.status.as_str(),
        "bounces": traj.events.len(),
        "winding": traj.winding,
        "total_length": traj.total_length,
        "end": { "x": traj.end.x.to_f64(), "v": traj.end.v.to_f64(), "t": traj.end.t, "phi": traj.end_phi },
        "speed_drift": traj.diagnostics.speed_drift,
        "omega_drift": traj.diagnostics.omega_drift,
    }))?;
    out.finish()
}

/// Unit tangent at `σ(τ, φ)` making angle `theta` with `φ̂` toward the meridian tangent.
fn tangent_dir(domain: &Domain, tau: f64, phi: f64, theta: f64) -> Vec3f {
    Domain::phi_hat(phi) * theta.cos() + domain.meridian_tangent(tau, phi) * theta.sin()
}

pub fn classify_boundary(cfg: &RunConfig) -> Result<(), CliError> {
    let domain = cfg.curve.build()?;
    let c = cfg.classify;
    if c.n_tau == 0 || c.n_dir == 0 {
        return Err(CliError::Config("classify.n_tau and classify.n_dir must be positive".into()));
    }
    let period = domain.profile().period();
    let mut out = Emitter::new(cfg, "classify-boundary", true)?;
    for i in 0..c.n_tau {
        let tau = period * i as f64 / c.n_tau as f64;
        let x = domain.sigma(tau, c.phi);
        for j in 0..c.n_dir {
            let theta = TAU * j as f64 / c.n_dir as f64;
            let w = tangent_dir(&domain, tau, c.phi, theta);
            let kappa = normal_curvature(&domain, tau, c.phi, w).map_err(|e| CliError::numeric(e, (tau, theta)))?;
            let class = match classify(&domain, x, w) {
                Ok(g) => g.as_str(),
                Err(Error::GrazingAmbiguous { .. }) => "ambiguous",
                Err(e) => return Err(CliError::numeric(e, (tau, theta))),
            };
            out.row(json!({ "tau": tau, "theta_dir": theta, "class": class, "kappa_n": kappa }))?;
        }
    }
    out.finish()
}

pub fn inflection_map(cfg: &RunConfig) -> Result<(), CliError> {
    let domain = cfg.curve.build()?;
    let m = cfg.inflection_map;
    if m.n_tau < 2 {
        return Err(CliError::Config("inflection_map.n_tau must be at least 2".into()));
    }
    let markers = domain.markers();
    let (a, b) = (markers.tau1_star, markers.tau2_star);
    let mut out = Emitter::new(cfg, "inflection-map", true)?;
    // Open interior grid: the endpoints carry no inflection pair.
    for i in 1..=m.n_tau {
        let tau = a + (b - a) * i as f64 / (m.n_tau + 1) as f64;
        let row = match inflection_directions_with(&domain, tau, m.phi, cfg.tolerances.z_h_band) {
            Ok(d) => json!({
                "tau": tau,
                "theta": d.theta,
                "omega_I": angular_momentum(domain.sigma(tau, m.phi), d.i1),
                "status": "ok",
            }),
            Err(Error::UndefinedInflection { reason, .. }) => {
                let (theta, plus, _) = formal_directions(&domain, tau, m.phi).map_err(|e| CliError::numeric(e, tau))?;
                json!({
                    "tau": tau,
                    "theta": theta,
                    "omega_I": angular_momentum(domain.sigma(tau, m.phi), plus),
                    "status": if reason.contains("Z_h") { "z_h_band" } else { "unresolved" },
                })
            }
            Err(e) => return Err(CliError::numeric(e, tau)),
        };
        out.row(row)?;
    }
    out.finish()
}

pub fn badset(cfg: &RunConfig) -> Result<(), CliError> {
    let domain = cfg.curve.build()?;
    let b = &cfg.badset;
    let mut out = Emitter::new(cfg, "badset", true)?;
    for &eps in &b.eps {
        let bc = BadSetConfig {
            x: Vec3f::from_f64(b.x),
            phi: b.phi,
            eps_graze: eps,
            length: b.length,
            n_samples: b.samples,
            seed: cfg.seed,
            speed_band: b.speed_band.map(|[lo, hi]| (lo, hi)),
            rings: b.rings.clone(),
            caps: cfg.caps(),
            workers: cfg.workers,
        };
        let r = badset_measure(&domain, &bc).map_err(|e| match e {
            Error::Precondition(msg) => CliError::Config(format!("badset: {msg}")),
            e => CliError::numeric(e, (b.x, eps)),
        })?;
        out.row(json!({
            "delta": eps,
            "samples": r.n_samples,
            "bad": r.bad,
            "fraction": r.fraction,
            "ci95": r.ci95,
            "near_grazing": r.breakdown.near_grazing,
            "ring_excluded": r.breakdown.ring_excluded,
            "inflection_stop": r.breakdown.inflection_stop,
            "max_bounces": r.breakdown.max_bounces,
            "numeric_failure": r.breakdown.numeric_failure,
            "max_bounces_good": r.max_bounces_good,
        }))?;
    }
    out.finish()
}

pub fn jacobian(cfg: &RunConfig) -> Result<(), CliError> {
    let domain = cfg.curve.build()?;
    let j = &cfg.jacobian;
    let state = State::new(Vec3f::from_f64(j.x), Vec3f::from_f64(j.v), j.t);
    let r = jacobian_det(&domain, state, j.s, j.h, cfg.caps()).map_err(|e| CliError::numeric(e, (state, j.s)))?;
    let mut out = Emitter::new(cfg, "jacobian", true)?;
    out.row(json!({
        "s": j.s,
        "h": j.h,
        "det": r.det,
        "det_half": r.det_half,
        "rel_spread": r.rel_spread,
        "bounces": r.bounces,
    }))?;
    out.finish()
}

pub fn recurrence_check(cfg: &RunConfig) -> Result<(), CliError> {
    let domain = cfg.curve.build()?;
    let r = &cfg.recurrence;
    let state = tangent_launch(&domain, r.tau, r.phi, r.alpha, r.beta);
    let traj = run_cycles(&domain, state, r.phi, Direction::Forward, Budget::Length(r.length), cfg.caps())
        .map_err(|e| CliError::numeric(e, state))?;
    let opts = RecurrenceOptions { gate: r.gate, inner_only: r.inner_only, epsilon: r.epsilon };
    let records = recurrence_residuals(&domain, &traj, opts);
    let mut out = Emitter::new(cfg, "recurrence-check", true)?;
    out.side_record(json!({
        "record": "launch",
        "x": state.x.to_f64(),
        "v": state.v.to_f64(),
        "bounces": traj.events.len(),
        "status": traj.status.as_str(),
        "kept_steps": records.len(),
    }))?;
    for rec in records {
        out.row(json!({
            "index": rec.index,
            "d_tau": rec.d_tau,
            "d_phi": rec.d_phi,
            "d_tau_next": rec.d_tau_next,
            "d_phi_next": rec.d_phi_next,
            "r1": rec.r1,
            "r2": rec.r2,
        }))?;
    }
    out.finish()
}

pub fn coords_check(cfg: &RunConfig) -> Result<(), CliError> {
    let c = cfg.chart;
    let chart = AnnulusChart::new(c.height, c.r_inner, c.r_outer).map_err(|e| CliError::Config(format!("chart: {e}")))?;
    let suite = SuiteConfig { step: c.step, ..SuiteConfig::default() };
    let rows = run_identity_suite(&chart, &suite).map_err(|e| CliError::Identity(e.to_string()))?;
    let mut out = Emitter::new(cfg, "coords-check", true)?;
    let mut failed = Vec::new();
    for row in &rows {
        if !row.pass {
            failed.push(row.check.clone());
        }
        out.row(json!({ "check": row.check, "value": row.value, "threshold": row.threshold, "pass": row.pass }))?;
    }
    out.finish()?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Identity(failed.join("; ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn tangent_grid_directions_are_tangent() {
        let d = Domain::circle_torus(2.0, 1.0).unwrap();
        for theta in [0.0, 0.3, PI / 2.0, 2.0] {
            let w = tangent_dir(&d, 1.0, 0.4, theta);
            assert!((w.norm() - 1.0).abs() < 1e-14);
            assert!(d.outward_normal(1.0, 0.4).dot(w).abs() < 1e-14);
        }
    }
}
