use std::sync::Arc;

use anyhow::{bail, Result};
use blowup_geometry::gauge_mode;
use cone_evolution::{evolve, ConeTrajectory, GaugeRepresenter, Mode};
use diagnostics::{norm_report, write_norm_trace_csv};
use numerics_core::{build_grid, StatePair};
use serde::Serialize;

use crate::{run_criterion, Artifacts, Check, LabConfig};

pub const SCENARIOS: [&str; 10] = [
    "verify-profile",
    "spectrum",
    "scan-modes",
    "connection",
    "evolve",
    "modulate",
    "strichartz",
    "exterior",
    "delta-scaling",
    "all",
];

pub fn criteria_for(name: &str) -> Option<&'static [u8]> {
    Some(match name {
        "verify-profile" => &[1, 2],
        "spectrum" => &[3],
        "scan-modes" => &[4],
        "connection" => &[5, 6, 7],
        "evolve" => &[8, 9],
        "modulate" => &[10],
        "strichartz" => &[13, 14],
        "exterior" => &[12],
        "delta-scaling" => &[11],
        _ => return None,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub scenario: String,
    pub passed: bool,
    pub config: LabConfig,
    pub checks: Vec<Check>,
    pub artifacts: Vec<String>,
}

/// Gauge-free bump evolved nonlinearly over the configured horizon; the
/// sample trajectory behind the evolve and strichartz artifacts.
fn sample_trajectory(cfg: &LabConfig) -> Result<ConeTrajectory> {
    let g = Arc::new(build_grid(cfg.n)?);
    let bump = StatePair::from_real_fn(g.clone(), |x| 1e-3 * (1.0 - x * x).powi(2) * (-4.0 * x * x).exp(), |x| {
        1e-3 * (-3.0 * x * x).exp()
    });
    let rep = GaugeRepresenter::new(g.clone())?;
    let gm = StatePair::from_real_fn(g, |x| gauge_mode(x).0, |x| gauge_mode(x).1);
    let u0 = bump.axpy(-rep.amplitude(&bump)?, &gm);
    let traj = evolve(&u0, cfg.tau_max, cfg.dt(), Mode::Nonlinear)?;
    let parity = traj.states.iter().map(|s| s.parity_residual()).fold(0.0, f64::max);
    if parity > cfg.parity_tol {
        bail!("evolved states lost parity: residual {parity:e} > {:e}", cfg.parity_tol);
    }
    Ok(traj)
}

fn extras(name: &str, cfg: &LabConfig, art: &mut Artifacts) -> Result<()> {
    if !art.enabled() {
        return Ok(());
    }
    match name {
        "evolve" => {
            let traj = sample_trajectory(cfg)?;
            let rep = GaugeRepresenter::new(traj.states[0].grid.clone())?;
            art.write("trajectory.csv", |w| traj.write_csv(w))?;
            art.write("norms.csv", |w| write_norm_trace_csv(&traj, w))?;
            let alphas = traj.states.iter().map(|s| rep.amplitude(s)).collect::<Result<Vec<_>, _>>()?;
            art.write("gauge.csv", |w| {
                writeln!(w, "tau,re_alpha,im_alpha")?;
                for (tau, a) in traj.taus.iter().zip(&alphas) {
                    writeln!(w, "{tau:.16e},{:.16e},{:.16e}", a.re, a.im)?;
                }
                Ok(())
            })?;
        }
        "strichartz" => {
            let traj = sample_trajectory(cfg)?;
            art.json("norms.json", &norm_report(&traj, "gauge-free bump, amplitude 1e-3")?.to_json())?;
            art.write("trace.csv", |w| write_norm_trace_csv(&traj, w))?;
        }
        _ => {}
    }
    Ok(())
}

fn summary_json(s: &Summary, art: &mut Artifacts) -> Result<()> {
    art.json("summary.json", &serde_json::to_value(s)?)
}

fn run_one(name: &str, cfg: &LabConfig, log: &mut dyn FnMut(&Check)) -> Result<Summary> {
    let ids = criteria_for(name).expect("caller checked the name");
    let mut art = Artifacts::new(cfg.out_dir.clone(), name)?;
    let mut checks = vec![];
    for &id in ids {
        let c = run_criterion(id, cfg, &mut art);
        log(&c);
        checks.push(c);
    }
    extras(name, cfg, &mut art)?;
    let mut artifacts = art.written.clone();
    artifacts.push(format!("{name}.summary.json"));
    let s = Summary { scenario: name.into(), passed: checks.iter().all(|c| c.passed), config: cfg.clone(), checks, artifacts };
    summary_json(&s, &mut art)?;
    Ok(s)
}

/// Runs a scenario (or every scenario for `all`), writing artifacts and
/// `<scenario>.summary.json` under `cfg.out_dir`. `log` sees each check as
/// it completes.
pub fn run_scenario(name: &str, cfg: &LabConfig, log: &mut dyn FnMut(&Check)) -> Result<Summary> {
    if !SCENARIOS.contains(&name) {
        bail!("unknown scenario {name:?}; expected one of {}", SCENARIOS.join(", "));
    }
    cfg.validate()?;
    if name != "all" {
        return run_one(name, cfg, log);
    }
    let mut checks = vec![];
    let mut artifacts = vec![];
    for sub in SCENARIOS.iter().filter(|s| **s != "all") {
        let s = run_one(sub, cfg, log)?;
        checks.extend(s.checks);
        artifacts.extend(s.artifacts);
    }
    checks.sort_by_key(|c| c.criterion);
    artifacts.push("all.summary.json".into());
    let s = Summary { scenario: "all".into(), passed: checks.iter().all(|c| c.passed), config: cfg.clone(), checks, artifacts };
    summary_json(&s, &mut Artifacts::new(cfg.out_dir.clone(), "all")?)?;
    Ok(s)
}
