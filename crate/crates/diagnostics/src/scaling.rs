use std::sync::Arc;

use blowup_geometry::{gauge_mode, profile_physical, profile_physical_dt, BlowupParam, CorotationalData, DEFAULT_DELTA};
use cone_evolution::{modulate_t, GaugeRepresenter, ModulationOptions};
use numerics_core::{build_grid, RadialGrid, StatePair, C64};
use serde::Serialize;

use crate::{strichartz_norm, DiagnosticsError, Result};

#[derive(Debug, Clone)]
pub struct ScalingOptions {
    pub tau_max: f64,
    pub t_init: f64,
    /// data live on the ball of radius 1 + data_delta
    pub data_delta: f64,
    pub projection_tol: f64,
    pub modulation: ModulationOptions,
}

impl Default for ScalingOptions {
    fn default() -> Self {
        Self {
            tau_max: 8.0,
            t_init: 1.0,
            data_delta: DEFAULT_DELTA,
            projection_tol: 1e-10,
            modulation: ModulationOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingEntry {
    pub delta: f64,
    pub converged: bool,
    pub t_star: Option<f64>,
    pub iterations: usize,
    /// (2, 12), order 0
    pub s_2_12: Option<f64>,
    /// (2, 4), order 1
    pub s_2_4_1: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub deltas: Vec<f64>,
    pub entries: Vec<ScalingEntry>,
    /// S(δ)/δ for the (2,12,0) and (2,4,1) norms, over converged δ > 0
    pub ratios_2_12: Vec<f64>,
    pub ratios_2_4_1: Vec<f64>,
    /// max/min of the ratios
    pub spread_2_12: Option<f64>,
    pub spread_2_4_1: Option<f64>,
    pub gauge_amplitude: f64,
}

impl ScalingReport {
    pub fn all_converged(&self) -> bool {
        self.entries.iter().all(|e| e.converged)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Restriction of data-ball samples (r = radius·ρ_i) to the unit cone grid.
fn restrict(bump: &StatePair, radius: f64, unit: Arc<RadialGrid>) -> StatePair {
    let g = &bump.grid;
    StatePair::from_fn(unit, |x| g.interpolate(&bump.phi1, x / radius), |x| g.interpolate(&bump.phi2, x / radius))
}

fn gauge_amplitude(bump: &StatePair, radius: f64, n: usize) -> Result<C64> {
    let unit = Arc::new(build_grid(n)?);
    let rep = GaugeRepresenter::new(unit.clone())?;
    Ok(rep.amplitude(&restrict(bump, radius, unit))?)
}

/// Samples (f, g) on `grid` scaled to `radius` and removes the gauge component
/// seen by the unit cone on an n-point grid.
pub fn gauge_free_bump(
    grid: Arc<RadialGrid>,
    radius: f64,
    n: usize,
    f: impl Fn(f64) -> f64,
    g: impl Fn(f64) -> f64,
) -> Result<StatePair> {
    let raw = StatePair::from_real_fn(grid.clone(), |x| f(radius * x), |x| g(radius * x));
    let alpha = gauge_amplitude(&raw, radius, n)?;
    let mode = StatePair::from_real_fn(grid, |x| gauge_mode(radius * x).0, |x| gauge_mode(radius * x).1);
    Ok(raw.axpy(-alpha, &mode))
}

fn entry(bump: &StatePair, delta: f64, opts: &ScalingOptions) -> Result<ScalingEntry> {
    let radius = 1.0 + opts.data_delta;
    let one = BlowupParam { t: 1.0 };
    let grid = bump.grid.clone();
    let mut f = Vec::with_capacity(grid.n);
    let mut g = Vec::with_capacity(grid.n);
    for (i, &x) in grid.nodes.iter().enumerate() {
        let r = radius * x;
        f.push(profile_physical(0.0, r, one)?.0 + delta * bump.phi1[i].re);
        g.push(profile_physical_dt(0.0, r, one)? + delta * bump.phi2[i].re);
    }
    let data = CorotationalData::new(grid, opts.data_delta, f, g)?;
    match modulate_t(&data, opts.t_init, opts.tau_max, &opts.modulation) {
        Ok(m) => Ok(ScalingEntry {
            delta,
            converged: true,
            t_star: Some(m.t_star),
            iterations: m.iterations,
            s_2_12: Some(strichartz_norm(&m.trajectory, 2.0, 12.0, 0)?),
            s_2_4_1: Some(strichartz_norm(&m.trajectory, 2.0, 4.0, 1)?),
            failure: None,
        }),
        Err(e) => Ok(ScalingEntry {
            delta,
            converged: false,
            t_star: None,
            iterations: 0,
            s_2_12: None,
            s_2_4_1: None,
            failure: Some(e.to_string()),
        }),
    }
}

fn spread(r: &[f64]) -> Option<f64> {
    if r.is_empty() {
        return None;
    }
    let max = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = r.iter().copied().fold(f64::INFINITY, f64::min);
    Some(max / min)
}

/// Modulated evolution of u_*^1[0] + δ·bump for each δ, with the Strichartz
/// norms of the converged trajectories. A failed δ is flagged, not fatal.
pub fn delta_scaling_experiment(bump: &StatePair, deltas: &[f64], opts: &ScalingOptions) -> Result<ScalingReport> {
    if deltas.is_empty() || deltas.iter().any(|&d| !(d >= 0.0)) || deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(DiagnosticsError::Config("deltas must be non-negative and strictly decreasing".into()));
    }
    let radius = 1.0 + opts.data_delta;
    let alpha = gauge_amplitude(bump, radius, opts.modulation.n)?.norm();
    if alpha > opts.projection_tol {
        return Err(DiagnosticsError::Precondition(format!(
            "bump has gauge amplitude {alpha:e} > {:e}",
            opts.projection_tol
        )));
    }
    let entries = deltas.iter().map(|&d| entry(bump, d, opts)).collect::<Result<Vec<_>>>()?;
    let ratios = |sel: fn(&ScalingEntry) -> Option<f64>| -> Vec<f64> {
        entries.iter().filter(|e| e.delta > 0.0).filter_map(|e| Some(sel(e)? / e.delta)).collect()
    };
    let ratios_2_12 = ratios(|e| e.s_2_12);
    let ratios_2_4_1 = ratios(|e| e.s_2_4_1);
    Ok(ScalingReport {
        deltas: deltas.to_vec(),
        spread_2_12: spread(&ratios_2_12),
        spread_2_4_1: spread(&ratios_2_4_1),
        ratios_2_12,
        ratios_2_4_1,
        entries,
        gauge_amplitude: alpha,
    })
}
