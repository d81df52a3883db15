//! The fourteen acceptance checks. Each one computes its measurements, writes
//! its artifacts (if enabled) and returns a [`Check`]; tolerances are fixed
//! here, the config only chooses resolutions, horizons and seeds.

use std::io::Write;
use std::sync::Arc;

use anyhow::{anyhow, bail, Result};
use blowup_geometry::{gauge_mode, profile_physical, profile_physical_dt, BlowupParam, CorotationalData};
use cone_evolution::{
    duhamel_exterior, evolve, full_rhs, modulate_t, overlap_compare, profile_state, richardson, ExteriorCone,
    ExteriorOptions, ExteriorSolution, Mode, ModulationOptions,
};
use diagnostics::{
    cone_snapshot, delta_scaling_experiment, dissipativity_check, gauge_free_bump, nonlinearity_bound_report,
    norm_equivalence_report, random_samples, weighted_cone_norm, ConeNormSpec, ConeReference, Difference,
    ProfileField, ScalingOptions, TimeRule,
};
use linear_spectrum::{
    assemble_generator, eigenpairs, filter_physical, jordan_inconsistency, resolvent_solve, FilterConfig,
    SpectrumReport,
};
use numerics_core::{build_grid, htilde_inner, RadialGrid, StatePair, C64};
use rayon::prelude::*;
use resolvent_ode::{
    green_resolvent, hypergeom_c3, lambda1_green, mode_stability_function, paper_connection, winding_scan,
    write_scan_csv, ConnectionData, PaperConnection, PaperConnectionConfig, Rect,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::{Artifacts, LabConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    pub passed: bool,
    pub measured: Value,
    pub detail: String,
}

pub const CRITERIA: [(u8, &str); 14] = [
    (1, "profile stationarity"),
    (2, "gauge eigenrelation"),
    (3, "single unstable eigenvalue"),
    (4, "mode-stability winding"),
    (5, "hypergeometric cross-check"),
    (6, "connection asymptotics"),
    (7, "resolvent equivalence"),
    (8, "dissipativity"),
    (9, "norm equivalence"),
    (10, "blowup-time recovery"),
    (11, "nonlinear stability scaling"),
    (12, "exterior/interior consistency"),
    (13, "weighted-cone divergence"),
    (14, "nonlinearity bounds"),
];

pub fn criterion_name(id: u8) -> Option<&'static str> {
    CRITERIA.iter().find(|c| c.0 == id).map(|c| c.1)
}

/// Runs one criterion. An internal error becomes a failed check carrying the
/// error text, so a scenario always reports every check it owns.
pub fn run_criterion(id: u8, cfg: &LabConfig, art: &mut Artifacts) -> Check {
    let name = criterion_name(id).unwrap_or("unknown").to_string();
    let out = match id {
        1 => profile_stationarity(art),
        2 => gauge_eigenrelation(),
        3 => spectral_uniqueness(cfg, art),
        4 => mode_stability(cfg, art),
        5 => hypergeometric(art),
        6 => connection_asymptotics(cfg, art),
        7 => resolvent_equivalence(),
        8 => dissipativity(cfg),
        9 => norm_equivalence(cfg, art),
        10 => blowup_time(cfg, art),
        11 => delta_scaling(cfg, art),
        12 => exterior(art),
        13 => cone_divergence(art),
        14 => nonlinearity_bounds(cfg, art),
        _ => Err(anyhow!("no criterion {id}")),
    };
    match out {
        Ok((passed, measured, detail)) => Check { criterion: id, name, passed, measured, detail },
        Err(e) => Check { criterion: id, name, passed: false, measured: Value::Null, detail: format!("error: {e:#}") },
    }
}

type Outcome = Result<(bool, Value, String)>;

fn grid(n: usize) -> Result<Arc<RadialGrid>> {
    Ok(Arc::new(build_grid(n)?))
}

/// Least-squares slope of y against x.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn profile_stationarity(art: &mut Artifacts) -> Outcome {
    let ladder = [16usize, 24, 32, 48, 64];
    let residuals = ladder
        .iter()
        .map(|&n| Ok(full_rhs(&profile_state(grid(n)?))))
        .collect::<Result<Vec<StatePair>>>()?;
    art.write("residual.csv", |w| {
        writeln!(w, "n,rho,residual")?;
        for s in &residuals {
            for i in 0..s.n() {
                let v = s.phi1[i].norm().max(s.phi2[i].norm());
                writeln!(w, "{},{:.16e},{:.16e}", s.n(), s.grid.nodes[i], v)?;
            }
        }
        Ok(())
    })?;
    let norms: Vec<f64> = residuals.iter().map(|s| s.max_norm()).collect();
    let (r32, r64) = (norms[2], norms[4]);
    let passed = r64 <= 1e-9 && r32 >= 10.0 * r64;
    let measured = json!({ "n": ladder, "residual": norms, "decrease_32_64": r32 / r64 });
    Ok((passed, measured, format!("residual n=32 {r32:.3e}, n=64 {r64:.3e}, decrease {:.2}x (need <=1e-9 and >=10x)", r32 / r64)))
}

fn gauge_eigenrelation() -> Outcome {
    let g64 = grid(64)?;
    let op = assemble_generator(g64.clone(), true);
    let g = StatePair::from_real_fn(g64, |x| gauge_mode(x).0, |x| gauge_mode(x).1);
    let rel = op.apply(&g).axpy(C64::new(-1.0, 0.0), &g).max_norm() / g.max_norm();
    Ok((rel <= 1e-8, json!({ "relative_residual": rel }), format!("|(M-1)g|/|g| = {rel:.3e} (need <=1e-8)")))
}

fn spectrum(n: usize, fc: FilterConfig) -> Result<SpectrumReport> {
    let (cg, fg) = (grid(n)?, grid(2 * n)?);
    let coarse = eigenpairs(&assemble_generator(cg.clone(), true))?;
    let fine = eigenpairs(&assemble_generator(fg.clone(), true))?;
    Ok(filter_physical(&cg, &coarse, &fg, &fine, true, fc)?)
}

fn spectral_uniqueness(cfg: &LabConfig, art: &mut Artifacts) -> Outcome {
    let fc = FilterConfig { match_tol: cfg.match_tol, residual_tol: cfg.residual_tol };
    let mut passed = true;
    let mut per_n = vec![];
    let mut detail = vec![];
    for n in [48usize, 64] {
        let rep = spectrum(n, fc)?;
        art.write(&format!("eigenvalues.n{n}.csv"), |w| rep.write_csv(w))?;
        let kept = rep.persistent_eigenvalues();
        let unstable: Vec<C64> = kept.iter().copied().filter(|z| z.re > 0.05).collect();
        let dist = unstable.first().map(|z| (z - 1.0).norm());
        let gap = kept.iter().filter(|z| z.re <= 0.05).map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let g = grid(n)?;
        let op = assemble_generator(g.clone(), true);
        let gm = StatePair::from_real_fn(g, |x| gauge_mode(x).0, |x| gauge_mode(x).1);
        let jordan = jordan_inconsistency(&op, C64::new(1.0, 0.0), &gm, 1e-9)?;
        let ok = unstable.len() == 1 && dist.is_some_and(|d| d <= 1e-6) && jordan >= 1e-3;
        passed &= ok;
        detail.push(format!(
            "n={n}: {} unstable, |lambda-1|={}, jordan {jordan:.3e}, stable gap {}",
            unstable.len(),
            dist.map_or("-".into(), |d| format!("{d:.2e}")),
            if gap.is_finite() { format!("{gap:.4}") } else { "none persistent".into() }
        ));
        per_n.push(json!({
            "n": n,
            "persistent": kept.len(),
            "unstable": unstable.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "distance_to_one": dist,
            "jordan_residual": jordan,
            "stable_gap": gap.is_finite().then_some(gap),
        }));
    }
    Ok((passed, Value::Array(per_n), detail.join("; ")))
}

fn boundary_csv(cert: &resolvent_ode::WindingCertificate) -> impl FnOnce(&mut dyn Write) -> std::io::Result<()> + '_ {
    move |w| {
        writeln!(w, "re_lambda,im_lambda,re_M,im_M")?;
        for b in &cert.boundary {
            writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e}", b[0], b[1], b[2], b[3])?;
        }
        Ok(())
    }
}

fn mode_stability(cfg: &LabConfig, art: &mut Artifacts) -> Outcome {
    let [a, b, c, d] = cfg.strip;
    let strip = Rect::new(a, b, c, d)?;
    let on = winding_scan(strip, 200, true)?;
    let off = winding_scan(strip, 200, false)?;
    let one = winding_scan(Rect::new(0.5, 1.5, -1.0, 1.0)?, 64, true)?;
    for (tag, cert) in [("on", &on), ("off", &off), ("unit", &one)] {
        art.write(&format!("boundary.{tag}.csv"), boundary_csv(cert))?;
        let v: Value = serde_json::from_str(&cert.to_json())?;
        art.json(&format!("certificate.{tag}.json"), &v)?;
    }
    if let Some(path) = art.path("heatmap.csv") {
        let (nr, ni) = (9usize, 161usize);
        let pts: Vec<C64> = (0..ni)
            .flat_map(|j| {
                (0..nr).map(move |i| {
                    C64::new(a + (b - a) * i as f64 / (nr - 1) as f64, c + (d - c) * j as f64 / (ni - 1) as f64)
                })
            })
            .collect();
        let rows: Vec<ConnectionData> =
            pts.par_iter().filter_map(|&l| mode_stability_function(l, true).ok()).collect();
        write_scan_csv(&rows, &path)?;
        art.record("heatmap.csv");
    }
    let passed = on.winding == 0 && off.winding == 0 && one.winding == 1;
    let measured = json!({
        "strip": cfg.strip,
        "winding_potential": on.winding,
        "winding_free": off.winding,
        "winding_around_one": one.winding,
        "max_phase_step": [on.max_phase_step, off.max_phase_step, one.max_phase_step],
    });
    Ok((
        passed,
        measured,
        format!("strip winding {} (potential) / {} (free), around 1: {} (need 0/0/1)", on.winding, off.winding, one.winding),
    ))
}

fn hypergeometric(art: &mut Artifacts) -> Outcome {
    let c0 = hypergeom_c3(0.0);
    let dev0 = (c0 - C64::new(-4.0, 0.0)).norm();
    let b = |w: f64| -> Result<C64> { Ok(mode_stability_function(C64::new(0.0, w), false)?.b) };
    let k = hypergeom_c3(1.0) / b(1.0)?;
    let ws = [1.0, 5.0, 10.0];
    let mut rows = vec![];
    for &w in &ws {
        let (bw, cw) = (b(w)?, hypergeom_c3(w));
        rows.push((w, bw * k, cw, (bw * k - cw).norm() / cw.norm()));
    }
    art.write("c3.csv", |w| {
        writeln!(w, "omega,re_c3,im_c3,re_BK,im_BK,relative_deviation")?;
        for (om, bk, c, dev) in &rows {
            writeln!(w, "{om:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{dev:.16e}", c.re, c.im, bk.re, bk.im)?;
        }
        Ok(())
    })?;
    let worst = max_of(rows.iter().map(|r| r.3));
    let passed = dev0 <= 1e-10 && worst <= 1e-6;
    let measured = json!({ "c3_0": [c0.re, c0.im], "K": [k.re, k.im], "deviations": rows.iter().map(|r| r.3).collect::<Vec<_>>() });
    Ok((passed, measured, format!("|c3(0)+4| = {dev0:.2e} (<=1e-10), max fitted deviation {worst:.2e} (<=1e-6)")))
}

fn connection_asymptotics(cfg: &LabConfig, art: &mut Artifacts) -> Outcome {
    if cfg.omega_max <= 10.0 {
        bail!("omega_max must exceed 10, got {}", cfg.omega_max);
    }
    let lim = PaperConnection::limit();
    let span = (cfg.omega_max / 10.0).ln();
    let ws: Vec<f64> = (0..10).map(|k| 10.0 * (span * k as f64 / 9.0).exp()).collect();
    let cs = ws
        .par_iter()
        .map(|&w| Ok(paper_connection(w, PaperConnectionConfig::default())?))
        .collect::<Result<Vec<_>>>()?;
    let errs: Vec<f64> = cs.iter().map(|c| (c.c13 - lim).norm()).collect();
    art.write("c13.csv", |w| {
        writeln!(w, "omega,re_c13,im_c13,re_c23,im_c23,error")?;
        for (c, e) in cs.iter().zip(&errs) {
            writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", c.omega, c.c13.re, c.c13.im, c.c23.re, c.c23.im, e)?;
        }
        Ok(())
    })?;
    let s = slope(&ws.iter().map(|w| w.ln()).collect::<Vec<_>>(), &errs.iter().map(|e| e.ln()).collect::<Vec<_>>());
    let modulus = cs.last().unwrap().c13.norm();
    let rel = (modulus / lim.norm() - 1.0).abs();
    let passed = s <= -0.8 && rel <= 0.03;
    let measured = json!({ "omega": ws, "error": errs, "slope": s, "modulus_at_max": modulus, "modulus_deviation": rel });
    Ok((passed, measured, format!("slope {s:.3} (<=-0.8), |c13({})| = {modulus:.7} off by {:.2}% (<=3%)", cfg.omega_max, 100.0 * rel)))
}

fn rhs_family(g: Arc<RadialGrid>) -> Vec<StatePair> {
    vec![
        StatePair::from_real_fn(g.clone(), |x| (x * x).cos() / (1.0 + x * x), |x| 1.0 - 0.5 * x * x + x.powi(4)),
        StatePair::from_real_fn(g.clone(), |x| (-x * x).exp(), |x| x * x),
        StatePair::from_fn(g, |x| C64::new(1.0 / (2.0 + x * x), 0.5 * x * x), |x| C64::new(x.cos(), -(x * x).sin())),
    ]
}

fn resolvent_equivalence() -> Outcome {
    let g = grid(48)?;
    let op = assemble_generator(g.clone(), true);
    let lambdas = [C64::new(0.1, 5.0), C64::new(0.2, 2.0), C64::new(0.05, -7.0)];
    let rhs = rhs_family(g.clone());
    let jobs: Vec<(usize, usize)> = (0..rhs.len()).flat_map(|i| (0..3).map(move |j| (i, j))).collect();
    let diffs = jobs
        .par_iter()
        .map(|&(i, j)| {
            let (l, f) = (lambdas[j], &rhs[i]);
            let col = resolvent_solve(&op, l, f)?;
            let green = green_resolvent(l, f, true)?;
            Ok(col.axpy(C64::new(-1.0, 0.0), &green).max_norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    let free = assemble_generator(g.clone(), false);
    let mut diffs1 = vec![];
    for f in &rhs {
        let d1 = g.diff1(&f.phi1);
        let big_f: Vec<C64> = (0..g.n).map(|i| f.phi2[i] + f.phi1[i] * 3.0 + d1[i] * g.nodes[i]).collect();
        let green = lambda1_green(&g, &big_f)?;
        let col = resolvent_solve(&free, C64::new(1.0, 0.0), f)?;
        diffs1.push(max_of(col.phi1.iter().zip(&green).map(|(a, b)| (a - b).norm())));
    }
    let (worst, worst1) = (max_of(diffs.iter().copied()), max_of(diffs1.iter().copied()));
    let passed = worst <= 1e-6 && worst1 <= 1e-7;
    let measured = json!({ "n": 48, "green_vs_collocation": diffs, "lambda_one_free": diffs1 });
    Ok((passed, measured, format!("max difference {worst:.2e} (<=1e-6), lambda=1 free {worst1:.2e} (<=1e-7)")))
}

fn dissipativity(cfg: &LabConfig) -> Outcome {
    let g = grid(32)?;
    let ratios = random_samples(cfg.seed, 100, 6, 1.0, true)
        .par_iter()
        .map(|s| {
            let u = s.state(g.clone());
            Ok(dissipativity_check(&u)? / htilde_inner(&u, &u)?.re)
        })
        .collect::<Result<Vec<f64>>>()?;
    let worst = max_of(ratios.iter().copied());
    Ok((worst <= 1e-8, json!({ "samples": 100, "max_ratio": worst }), format!("max Re(Lu,u)/(u,u) = {worst:.4} (<=1e-8)")))
}

/// Fixed a priori; the measured ratios only have to land inside.
const NORM_INTERVAL: (f64, f64) = (0.25, 4.0);

fn norm_equivalence(cfg: &LabConfig, art: &mut Artifacts) -> Outcome {
    let samples = random_samples(cfg.seed.wrapping_add(1), 100, 6, 1.0, true);
    let r = norm_equivalence_report(&samples, 32, 48)?;
    art.write("norm_ratios.csv", |w| {
        writeln!(w, "sample,ratio_n32,ratio_n48")?;
        for (k, (a, b)) in r.ratios_coarse.iter().zip(&r.ratios_fine).enumerate() {
            writeln!(w, "{k},{a:.16e},{b:.16e}")?;
        }
        Ok(())
    })?;
    let passed = r.ratios_coarse.len() == 100
        && r.min >= NORM_INTERVAL.0
        && r.max <= NORM_INTERVAL.1
        && r.refinement_change <= 0.05;
    let measured = json!({ "min": r.min, "max": r.max, "interval": [NORM_INTERVAL.0, NORM_INTERVAL.1], "refinement_change": r.refinement_change });
    Ok((
        passed,
        measured,
        format!("ratios in [{:.4}, {:.4}] within [{}, {}], refinement change {:.1e} (<=5%)", r.min, r.max, NORM_INTERVAL.0, NORM_INTERVAL.1, r.refinement_change),
    ))
}

fn modulation_options(cfg: &LabConfig) -> ModulationOptions {
    ModulationOptions { n: cfg.n, dt: Some(cfg.dt()), ..Default::default() }
}

fn blowup_time(cfg: &LabConfig, art: &mut Artifacts) -> Outcome {
    let targets = [0.95, 1.05];
    let runs = targets
        .iter()
        .map(|&tp| {
            let data = CorotationalData::exact_family(grid(32)?, 0.1, BlowupParam::new(tp)?)?;
            Ok(modulate_t(&data, 1.0, cfg.tau_max, &modulation_options(cfg))?)
        })
        .collect::<Result<Vec<_>>>()?;
    art.write("gauge.csv", |w| {
        writeln!(w, "t_prime,tau,re_alpha,im_alpha")?;
        for (tp, r) in targets.iter().zip(&runs) {
            for (tau, a) in &r.gauge_history {
                writeln!(w, "{tp:.16e},{tau:.16e},{:.16e},{:.16e}", a.re, a.im)?;
            }
        }
        Ok(())
    })?;
    let errs: Vec<f64> = targets.iter().zip(&runs).map(|(tp, r)| (r.t_star - tp).abs()).collect();
    let passed = runs.iter().all(|r| r.converged) && errs.iter().all(|&e| e <= 1e-3);
    let measured = json!({
        "t_prime": targets,
        "t_star": runs.iter().map(|r| r.t_star).collect::<Vec<_>>(),
        "iterations": runs.iter().map(|r| r.iterations).collect::<Vec<_>>(),
        "error": errs,
    });
    Ok((passed, measured, format!("|T*-T'| = {:.2e}, {:.2e} (<=1e-3)", errs[0], errs[1])))
}

fn scaling_bump(n: usize, opts: &ScalingOptions) -> Result<StatePair> {
    Ok(gauge_free_bump(
        grid(n)?,
        1.0 + opts.data_delta,
        opts.modulation.n,
        |r| (-4.0 * r * r).exp(),
        |r| r * r * (-4.0 * r * r).exp(),
    )?)
}

fn delta_scaling(cfg: &LabConfig, art: &mut Artifacts) -> Outcome {
    let opts = ScalingOptions { tau_max: cfg.tau_max, modulation: modulation_options(cfg), ..Default::default() };
    let rep = delta_scaling_experiment(&scaling_bump(32, &opts)?, &cfg.deltas, &opts)?;
    art.write("ratios.csv", |w| {
        writeln!(w, "delta,converged,t_star,s_2_12,s_2_4_1,ratio_2_12,ratio_2_4_1")?;
        for e in &rep.entries {
            let f = |v: Option<f64>| v.map_or("nan".to_string(), |x| format!("{x:.16e}"));
            writeln!(
                w,
                "{:.16e},{},{},{},{},{},{}",
                e.delta,
                e.converged as u8,
                f(e.t_star),
                f(e.s_2_12),
                f(e.s_2_4_1),
                f(e.s_2_12.map(|s| s / e.delta)),
                f(e.s_2_4_1.map(|s| s / e.delta))
            )?;
        }
        Ok(())
    })?;
    let within = |s: Option<f64>| s.is_some_and(|s| s - 1.0 <= 0.25);
    let passed = rep.all_converged() && within(rep.spread_2_12) && within(rep.spread_2_4_1);
    let detail = format!(
        "converged {}/{}, spread (2,12) {}, (2,4,1) {} (max/min <=1.25)",
        rep.entries.iter().filter(|e| e.converged).count(),
        rep.entries.len(),
        rep.spread_2_12.map_or("-".into(), |s| format!("{s:.5}")),
        rep.spread_2_4_1.map_or("-".into(), |s| format!("{s:.5}")),
    );
    Ok((passed, rep.to_json(), detail))
}

fn family_exterior(cone: ExteriorCone, k: usize) -> Result<ExteriorSolution> {
    let t1 = BlowupParam { t: 1.0 };
    let f = move |r: f64| profile_physical(0.0, r, t1).map(|v| v.0).unwrap_or(f64::NAN);
    let g = move |r: f64| profile_physical_dt(0.0, r, t1).unwrap_or(f64::NAN);
    Ok(duhamel_exterior(&f, &g, cone, &ExteriorOptions { k, ..Default::default() })?)
}

fn exterior(art: &mut Artifacts) -> Outcome {
    let t1 = BlowupParam { t: 1.0 };
    let cone = ExteriorCone::new(0.0, 0.5, 2.0)?;
    let r = richardson(&family_exterior(cone, 32)?, &family_exterior(cone, 64)?)?;
    let pts = r.points();
    let exact = pts.iter().map(|&(t, x, _)| Ok(profile_physical(t, x, t1)?.0)).collect::<Result<Vec<f64>>>()?;
    art.write("lattice.csv", |w| {
        writeln!(w, "t,r,u,u_exact")?;
        for ((t, x, u), e) in pts.iter().zip(&exact) {
            writeln!(w, "{t:.16e},{x:.16e},{u:.16e},{e:.16e}")?;
        }
        Ok(())
    })?;
    let err = max_of(pts.iter().zip(&exact).map(|(p, e)| (p.2 - e).abs()));

    let near = ExteriorCone::new(0.0, 0.3, 0.6)?;
    let ext = family_exterior(near, 32)?;
    let tau_max = (1.0f64 / 0.7).ln() + 0.05;
    let traj = evolve(&StatePair::zeros(grid(32)?), tau_max, 0.5 / 1024.0, Mode::Nonlinear)?;
    let ov = overlap_compare(&ext, &traj)?;
    let passed = err <= 1e-6 && ov.max_discrepancy <= 1e-4;
    let measured = json!({ "lattice_error": err, "overlap": ov.max_discrepancy, "overlap_points": ov.points, "interpolation": ov.interpolation });
    Ok((passed, measured, format!("lattice error {err:.2e} (<=1e-6), overlap {:.2e} over {} points (<=1e-4)", ov.max_discrepancy, ov.points)))
}

fn cone_divergence(art: &mut Artifacts) -> Outcome {
    let f = ProfileField { t: BlowupParam { t: 1.0 } };
    let spec = ConeNormSpec::zeroth(Difference::Chord);
    let ts: Vec<f64> = (0..12).map(|k| 1.0 - 0.5f64.powi(k)).collect();
    let snaps = ts
        .iter()
        .map(|&t| Ok(cone_snapshot(&f, ConeReference::Center, &spec, t, 1.0)?))
        .collect::<Result<Vec<f64>>>()?;
    let exponent = slope(&ts.iter().map(|t| (1.0 - t).ln()).collect::<Vec<_>>(), &snaps.iter().map(|v| v.ln()).collect::<Vec<_>>());
    let eps = [1e-1, 1e-2, 1e-3, 1e-4];
    let vals = eps
        .iter()
        .map(|&e| Ok(weighted_cone_norm(&f, ConeReference::Center, 1.0, &spec, e, &TimeRule::default())?))
        .collect::<Result<Vec<f64>>>()?;
    let growth = slope(&eps.iter().map(|e| (1.0 / e).ln().ln()).collect::<Vec<_>>(), &vals.iter().map(|v| v.ln()).collect::<Vec<_>>());
    art.write("snapshot.csv", |w| {
        writeln!(w, "t,snapshot,scaled")?;
        for (t, v) in ts.iter().zip(&snaps) {
            writeln!(w, "{t:.16e},{v:.16e},{:.16e}", v * (1.0 - t).sqrt())?;
        }
        Ok(())
    })?;
    art.write("divergence.csv", |w| {
        writeln!(w, "eps,norm")?;
        for (e, v) in eps.iter().zip(&vals) {
            writeln!(w, "{e:.16e},{v:.16e}")?;
        }
        Ok(())
    })?;
    let passed = (growth - 1.0).abs() <= 0.05 && (exponent + 0.5).abs() <= 0.02;
    let measured = json!({ "eps": eps, "norm": vals, "growth_slope": growth, "snapshot_exponent": exponent });
    Ok((passed, measured, format!("growth slope {growth:.4} (1+-0.05), snapshot exponent {exponent:.4} (-0.5+-0.02)")))
}

fn nonlinearity_bounds(cfg: &LabConfig, art: &mut Artifacts) -> Outcome {
    let samples = random_samples(cfg.seed.wrapping_add(2), 200, 5, 1.0, false);
    let amps = [0.05, 0.2, 0.5];
    let build = |n: usize| -> Result<Vec<(StatePair, StatePair)>> {
        let g = grid(n)?;
        Ok(samples
            .chunks(2)
            .enumerate()
            .map(|(k, p)| {
                let a = amps[k % 3];
                (p[0].scaled(a).state(g.clone()), p[1].scaled(a).state(g.clone()))
            })
            .collect())
    };
    let c = nonlinearity_bound_report(&build(32)?)?;
    let f = nonlinearity_bound_report(&build(48)?)?;
    art.json("nonlinearity.json", &json!({ "n32": c.to_json(), "n48": f.to_json() }))?;
    // constants calibrated at n=32 must bound every n=48 ratio up to 5%
    let g_ok = f.growth_ratios.iter().all(|&r| r <= 1.05 * c.growth_constant);
    let l_ok = f.lipschitz_ratios.iter().all(|&r| r <= 1.05 * c.lipschitz_constant);
    let passed = c.growth_ratios.len() == 200 && g_ok && l_ok && c.scaling_variation <= 0.1;
    let measured = json!({
        "growth_constant": c.growth_constant,
        "lipschitz_constant": c.lipschitz_constant,
        "growth_max_n48": f.growth_constant,
        "lipschitz_max_n48": f.lipschitz_constant,
        "scaling_variation": c.scaling_variation,
    });
    Ok((
        passed,
        measured,
        format!(
            "C_growth {:.4} (n=48 max {:.4}), C_lip {:.4} (n=48 max {:.4}), scaling variation {:.2e} (<=0.1)",
            c.growth_constant, f.growth_constant, c.lipschitz_constant, f.lipschitz_constant, c.scaling_variation
        ),
    ))
}
