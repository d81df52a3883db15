use std::f64::consts::PI;
use std::io::Write;
use blowup_geometry::BlowupParam;
use numerics_core::{RadialGrid, StatePair, C64};

use crate::{ConeRhs, EvolutionError, Mode, Result};

/// Largest admissible dt·n².
pub const CFL_MAX: f64 = 2.0;

#[derive(Debug, Clone)]
pub struct ConeTrajectory {
    pub t: BlowupParam,
    pub taus: Vec<f64>,
    pub states: Vec<StatePair>,
    pub dt: f64,
    pub mode: Mode,
}

impl ConeTrajectory {
    pub fn last(&self) -> &StatePair {
        self.states.last().expect("trajectory has at least the initial state")
    }

    pub fn tau_max(&self) -> f64 {
        *self.taus.last().unwrap()
    }

    /// Columns tau, rho, re_phi1, im_phi1, re_phi2, im_phi2.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "tau,rho,re_phi1,im_phi1,re_phi2,im_phi2")?;
        for (tau, s) in self.taus.iter().zip(&self.states) {
            for i in 0..s.n() {
                writeln!(
                    w,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    tau, s.grid.nodes[i], s.phi1[i].re, s.phi1[i].im, s.phi2[i].re, s.phi2[i].im
                )?;
            }
        }
        Ok(())
    }

    /// State at an arbitrary τ by four-point Lagrange interpolation between stamps.
    pub fn state_at(&self, tau: f64) -> Result<StatePair> {
        let k = self.taus.len();
        if tau < self.taus[0] - 1e-14 || tau > self.tau_max() + 1e-12 {
            return Err(EvolutionError::Usage(format!("tau {tau} outside trajectory")));
        }
        if k < 4 {
            let i = self.taus.iter().position(|&t| (t - tau).abs() < 1e-12);
            return i
                .map(|i| self.states[i].clone())
                .ok_or_else(|| EvolutionError::Usage("too few stamps to interpolate".into()));
        }
        let upper = self.taus.partition_point(|&t| t < tau).clamp(2, k - 2);
        let idx = [upper - 2, upper - 1, upper, upper + 1];
        let mut out = StatePair::zeros(self.states[0].grid.clone());
        for &a in &idx {
            let mut w = 1.0;
            for &b in &idx {
                if a != b {
                    w *= (tau - self.taus[b]) / (self.taus[a] - self.taus[b]);
                }
            }
            out = out.axpy(C64::new(w, 0.0), &self.states[a]);
        }
        Ok(out)
    }
}

/// Exponential damping of the top Chebyshev modes, exp(−36 (m/N)¹⁶).
#[derive(Debug, Clone)]
pub struct SpectralFilter {
    matrix: Vec<f64>,
    n: usize,
}

impl SpectralFilter {
    pub fn new(grid: &RadialGrid) -> Self {
        let n = grid.n;
        let big_n = (n - 1) as f64;
        let c = |k: usize| if k == 0 || k == n - 1 { 2.0 } else { 1.0 };
        // values -> coefficients: a_m = 2/(N c_m) Σ_i f_i cos(i m π/N)/c_i
        let mut matrix = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for m in 0..n {
                    let sigma = (-36.0 * (m as f64 / big_n).powi(16)).exp();
                    let to_coef = 2.0 / (big_n * c(m) * c(j)) * ((j * m) as f64 * PI / big_n).cos();
                    let to_val = ((i * m) as f64 * PI / big_n).cos();
                    s += to_val * sigma * to_coef;
                }
                matrix[i * n + j] = s;
            }
        }
        Self { matrix, n }
    }

    pub fn apply(&self, v: &mut [C64]) {
        let src = v.to_vec();
        for i in 0..self.n {
            let row = &self.matrix[i * self.n..(i + 1) * self.n];
            *v.get_mut(i).unwrap() = row.iter().zip(&src).map(|(a, b)| b * *a).sum();
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvolveOptions {
    pub tau_max: f64,
    pub dt: f64,
    pub mode: Mode,
    /// τ spacing of stored stamps (rounded to whole steps)
    pub save_interval: f64,
    pub filter: bool,
    pub t: BlowupParam,
}

impl EvolveOptions {
    pub fn new(n: usize, tau_max: f64, mode: Mode) -> Self {
        Self {
            tau_max,
            dt: 0.5 / (n * n) as f64,
            mode,
            save_interval: 0.05,
            filter: false,
            t: BlowupParam { t: 1.0 },
        }
    }
}

pub fn evolve(phi0: &StatePair, tau_max: f64, dt: f64, mode: Mode) -> Result<ConeTrajectory> {
    let mut opts = EvolveOptions::new(phi0.n(), tau_max, mode);
    opts.dt = dt;
    evolve_with(phi0, &opts)
}

/// Classical RK4 method of lines, no boundary condition at ρ = 1.
pub fn evolve_with(phi0: &StatePair, opts: &EvolveOptions) -> Result<ConeTrajectory> {
    let n = phi0.n();
    if !(opts.tau_max > 0.0) {
        return Err(EvolutionError::Config(format!("tau_max must be positive, got {}", opts.tau_max)));
    }
    if !(opts.dt > 0.0) || opts.dt * (n * n) as f64 > CFL_MAX {
        return Err(EvolutionError::Config(format!("dt = {} violates dt <= {CFL_MAX}/n^2", opts.dt)));
    }
    let steps = (opts.tau_max / opts.dt).ceil() as usize;
    let dt = opts.tau_max / steps as f64;
    let save_every = ((opts.save_interval / dt).round() as usize).max(1);
    let rhs = ConeRhs::new(phi0.grid.clone());
    let filter = opts.filter.then(|| SpectralFilter::new(&phi0.grid));

    let mut y: Vec<C64> = phi0.stacked();
    let zero = C64::new(0.0, 0.0);
    let mut k = [vec![zero; 2 * n], vec![zero; 2 * n], vec![zero; 2 * n], vec![zero; 2 * n]];
    let mut tmp = vec![zero; 2 * n];
    let mut taus = vec![0.0];
    let mut states = vec![phi0.clone()];
    let eval = |src: &[C64], dst: &mut [C64]| {
        let (o1, o2) = dst.split_at_mut(n);
        rhs.eval_into(&src[..n], &src[n..], opts.mode, o1, o2);
    };
    for step in 1..=steps {
        eval(&y, &mut k[0]);
        for (t, (a, b)) in tmp.iter_mut().zip(y.iter().zip(&k[0])) {
            *t = a + b * (0.5 * dt);
        }
        eval(&tmp, &mut k[1]);
        for (t, (a, b)) in tmp.iter_mut().zip(y.iter().zip(&k[1])) {
            *t = a + b * (0.5 * dt);
        }
        eval(&tmp, &mut k[2]);
        for (t, (a, b)) in tmp.iter_mut().zip(y.iter().zip(&k[2])) {
            *t = a + b * dt;
        }
        eval(&tmp, &mut k[3]);
        for i in 0..2 * n {
            y[i] += (k[0][i] + k[1][i] * 2.0 + k[2][i] * 2.0 + k[3][i]) * (dt / 6.0);
        }
        if let Some(f) = &filter {
            f.apply(&mut y[..n]);
            f.apply(&mut y[n..]);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(EvolutionError::Instability { tau: (step - 1) as f64 * dt });
        }
        if step % save_every == 0 || step == steps {
            taus.push(step as f64 * dt);
            states.push(StatePair::from_stacked(phi0.grid.clone(), &y)?);
        }
    }
    Ok(ConeTrajectory { t: opts.t, taus, states, dt, mode: opts.mode })
}
