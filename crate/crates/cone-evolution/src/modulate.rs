use std::sync::Arc;

use blowup_geometry::{profile_similarity, BlowupParam, CorotationalData};
use numerics_core::{build_grid, RadialGrid, StatePair, C64};

use crate::{evolve_with, ConeTrajectory, EvolutionError, EvolveOptions, GaugeRepresenter, Mode, Result};

/// Φ_T(0)(ρ) = (T f(Tρ) − ψ*₁(ρ), T² g(Tρ) − ψ*₂(ρ))
pub fn data_map(data: &CorotationalData, t: f64, grid: Arc<RadialGrid>) -> Result<StatePair> {
    let mut phi1 = Vec::with_capacity(grid.n);
    let mut phi2 = Vec::with_capacity(grid.n);
    for &x in &grid.nodes {
        let (p1, p2) = profile_similarity(x);
        phi1.push(C64::new(t * data.f_at(t * x)? - p1, 0.0));
        phi2.push(C64::new(t * t * data.g_at(t * x)? - p2, 0.0));
    }
    Ok(StatePair::new(grid, phi1, phi2)?)
}

#[derive(Debug, Clone)]
pub struct ModulationOptions {
    pub n: usize,
    pub dt: Option<f64>,
    /// intermediate τ_max values solved first, each seeding the next
    pub ladder: Vec<f64>,
    pub tol: f64,
    pub max_iter: usize,
    pub seed_offset: f64,
    pub filter: bool,
}

impl Default for ModulationOptions {
    fn default() -> Self {
        Self { n: 32, dt: None, ladder: vec![2.0, 4.0, 6.0], tol: 1e-8, max_iter: 60, seed_offset: 0.02, filter: false }
    }
}

#[derive(Debug, Clone)]
pub struct ModulationResult {
    pub t_star: f64,
    pub gauge_history: Vec<(f64, C64)>,
    pub converged: bool,
    pub iterations: usize,
    pub final_objective: f64,
    pub trajectory: ConeTrajectory,
}

struct Objective<'a> {
    data: &'a CorotationalData,
    grid: Arc<RadialGrid>,
    rep: GaugeRepresenter,
    opts: &'a ModulationOptions,
    evals: usize,
}

impl Objective<'_> {
    fn trajectory(&mut self, t: f64, tau: f64) -> Result<ConeTrajectory> {
        self.evals += 1;
        let phi = data_map(self.data, t, self.grid.clone())?;
        let mut eo = EvolveOptions::new(self.grid.n, tau, Mode::Nonlinear);
        if let Some(dt) = self.opts.dt {
            eo.dt = dt;
        }
        eo.filter = self.opts.filter;
        eo.t = BlowupParam { t };
        evolve_with(&phi, &eo)
    }

    fn value(&mut self, t: f64, tau: f64) -> Result<f64> {
        let tr = self.trajectory(t, tau)?;
        Ok((-tau).exp() * self.rep.amplitude(tr.last())?.re)
    }
}

/// Secant search on T for the zero of h(T) = e^{−τ_max}·α(τ_max), where α is
/// the gauge amplitude of the nonlinear evolution of Φ_T(0).
pub fn modulate_t(
    data: &CorotationalData,
    t_init: f64,
    tau_max: f64,
    opts: &ModulationOptions,
) -> Result<ModulationResult> {
    let grid = Arc::new(build_grid(opts.n)?);
    let rep = GaugeRepresenter::new(grid.clone())?;
    let (lo, hi) = (1.0 - data.delta, 1.0 + data.delta);
    let mut obj = Objective { data, grid, rep, opts, evals: 0 };
    let fail = |m: String| EvolutionError::ModulationFailure(m);

    let mut stages: Vec<f64> = opts.ladder.iter().copied().filter(|&t| t < tau_max).collect();
    stages.push(tau_max);

    let mut centre = t_init;
    let mut spread = opts.seed_offset;
    let mut last_h = f64::NAN;
    for (si, &tau) in stages.iter().enumerate() {
        let final_stage = si + 1 == stages.len();
        let mut t0 = (centre - spread).max(lo);
        let mut t1 = (centre + spread).min(hi);
        let mut h0 = obj.value(t0, tau).map_err(|e| fail(format!("objective at T={t0}: {e}")))?;
        let mut h1 = obj.value(t1, tau).map_err(|e| fail(format!("objective at T={t1}: {e}")))?;
        loop {
            if h1.abs() <= opts.tol || (t1 - t0).abs() <= 1e-14 {
                break;
            }
            if obj.evals >= opts.max_iter {
                return Err(fail(format!("no convergence after {} objective evaluations", obj.evals)));
            }
            if h1 == h0 {
                return Err(fail(format!("objective independent of T near T={t1} (h={h1:e})")));
            }
            let mut t2 = t1 - h1 * (t1 - t0) / (h1 - h0);
            if !(lo..=hi).contains(&t2) {
                return Err(fail(format!("secant step left the admissible range: T={t2}")));
            }
            let mut h2 = obj.value(t2, tau);
            let mut retries = 0;
            while let Err(EvolutionError::Instability { .. }) = h2 {
                retries += 1;
                if retries > 6 {
                    return Err(fail(format!("evolution unstable near T={t2}")));
                }
                t2 = 0.5 * (t1 + t2);
                h2 = obj.value(t2, tau);
            }
            let h2 = h2.map_err(|e| fail(e.to_string()))?;
            (t0, h0, t1, h1) = (t1, h1, t2, h2);
        }
        if final_stage {
            last_h = h1;
        }
        spread = ((t1 - t0).abs() * 10.0).clamp(1e-7, opts.seed_offset);
        centre = t1;
    }
    if !(last_h.abs() <= opts.tol) {
        return Err(fail(format!("terminal objective {last_h:e} above tolerance {}", opts.tol)));
    }
    let trajectory = obj.trajectory(centre, tau_max)?;
    let gauge_history = trajectory
        .taus
        .iter()
        .zip(&trajectory.states)
        .map(|(&tau, s)| Ok((tau, obj.rep.amplitude(s)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ModulationResult {
        t_star: centre,
        gauge_history,
        converged: true,
        iterations: obj.evals,
        final_objective: last_h,
        trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn data_map_vanishes_on_matching_family_member() {
        let dg = Arc::new(build_grid(32).unwrap());
        let t = BlowupParam::new(1.05).unwrap();
        let data = CorotationalData::exact_family(dg, 0.1, t).unwrap();
        let phi = data_map(&data, 1.05, Arc::new(build_grid(24).unwrap())).unwrap();
        assert!(phi.max_norm() < 1e-12, "{}", phi.max_norm());
        let off = data_map(&data, 1.0, Arc::new(build_grid(24).unwrap())).unwrap();
        assert!(off.max_norm() > 1e-3);
    }
}
