use std::sync::Arc;

use blowup_geometry::profile_similarity;
use linear_spectrum::potential;
use numerics_core::{RadialGrid, StatePair, C64};

use crate::Mode;

const SERIES_CUT: f64 = 1e-2;

/// N(u)(ρ) = −(3 sin(2ρu) − 6ρu)/(2ρ³)
pub fn nonlinearity(rho: f64, u: f64) -> f64 {
    if (rho * u).abs() < SERIES_CUT {
        let (r2, u2) = (rho * rho, u * u);
        u * u2 * (2.0 - 0.4 * r2 * u2 + 4.0 / 105.0 * r2 * r2 * u2 * u2 - 2.0 / 945.0 * r2 * r2 * r2 * u2 * u2 * u2)
    } else {
        -(3.0 * (2.0 * rho * u).sin() - 6.0 * rho * u) / (2.0 * rho * rho * rho)
    }
}

/// Analytic continuation of [`nonlinearity`] to complex amplitudes.
pub fn nonlinearity_c(rho: f64, u: C64) -> C64 {
    if (u * rho).norm() < SERIES_CUT {
        let (r2, u2) = (rho * rho, u * u);
        u * u2 * (2.0 - u2 * (0.4 * r2) + u2 * u2 * (4.0 / 105.0 * r2 * r2) - u2 * u2 * u2 * (2.0 / 945.0 * r2 * r2 * r2))
    } else {
        let x = u * rho;
        -((x * 2.0).sin() * 3.0 - x * 6.0) / (2.0 * rho * rho * rho)
    }
}

/// Precomputed operators for the similarity system on one grid.
#[derive(Debug, Clone)]
pub struct ConeRhs {
    pub grid: Arc<RadialGrid>,
    psi1: Vec<f64>,
    n_star: Vec<C64>,
    potential: Vec<f64>,
    d1: Vec<f64>,
    lap: Vec<f64>,
    reg: Vec<f64>,
}

fn row_major(m: &nalgebra::DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(m[(i, j)]);
        }
    }
    out
}

fn matvec(a: &[f64], x: &[C64], out: &mut [C64]) {
    let n = x.len();
    for (i, o) in out.iter_mut().enumerate() {
        let row = &a[i * n..(i + 1) * n];
        let (mut re, mut im) = (0.0, 0.0);
        for (w, v) in row.iter().zip(x) {
            re += w * v.re;
            im += w * v.im;
        }
        *o = C64::new(re, im);
    }
}

impl ConeRhs {
    pub fn new(grid: Arc<RadialGrid>) -> Self {
        let psi1 = grid.nodes.iter().map(|&x| profile_similarity(x).0).collect();
        let pot = grid.nodes.iter().map(|&x| potential(x)).collect();
        let d1 = row_major(&grid.d1);
        let lap = row_major(&grid.radial_laplacian_matrix(5.0));
        let reg = grid.regularity_row();
        let n_star = grid
            .nodes
            .iter()
            .zip(&psi1)
            .map(|(&x, &p): (&f64, &f64)| nonlinearity_c(x, C64::new(p, 0.0)))
            .collect();
        Self { grid, psi1, n_star, potential: pot, d1, lap, reg }
    }

    fn project(&self, v: &mut [C64]) {
        v[0] = self.reg.iter().zip(v.iter()).skip(1).map(|(c, x)| x * c).sum();
    }

    /// Time derivative of the stacked state (φ₁, φ₂) written into `out`.
    pub fn eval_into(&self, phi1: &[C64], phi2: &[C64], mode: Mode, out1: &mut [C64], out2: &mut [C64]) {
        let n = self.grid.n;
        let mut p1 = phi1.to_vec();
        self.project(&mut p1);
        let mut dp1 = vec![C64::new(0.0, 0.0); n];
        let mut lp1 = vec![C64::new(0.0, 0.0); n];
        let mut dp2 = vec![C64::new(0.0, 0.0); n];
        matvec(&self.d1, &p1, &mut dp1);
        matvec(&self.lap, &p1, &mut lp1);
        matvec(&self.d1, phi2, &mut dp2);
        for i in 0..n {
            let x = self.grid.nodes[i];
            out1[i] = phi2[i] - p1[i] - dp1[i] * x;
            let forcing = match mode {
                Mode::Nonlinear => nonlinearity_c(x, p1[i] + self.psi1[i]) - self.n_star[i],
                Mode::Linearized => p1[i] * self.potential[i],
                Mode::Free => C64::new(0.0, 0.0),
            };
            out2[i] = lp1[i] - dp2[i] * x - phi2[i] * 2.0 + forcing;
        }
        self.project(out1);
    }

    pub fn eval(&self, u: &StatePair, mode: Mode) -> StatePair {
        let mut out = StatePair::zeros(self.grid.clone());
        self.eval_into(&u.phi1, &u.phi2, mode, &mut out.phi1, &mut out.phi2);
        out
    }
}

/// Right-hand side of the similarity system for the perturbation (nonlinear,
/// linearized) or the full state (free).
pub fn rhs(phi: &StatePair, mode: Mode) -> StatePair {
    ConeRhs::new(phi.grid.clone()).eval(phi, mode)
}

/// Right-hand side of the full nonlinear system in the unperturbed variable Ψ.
pub fn full_rhs(psi: &StatePair) -> StatePair {
    let g = &psi.grid;
    let n = g.n;
    let d1 = g.diff1(&psi.phi1);
    let lap = g.radial_laplacian(&psi.phi1, 5.0);
    let d2 = g.diff1(&psi.phi2);
    let mut out = StatePair::zeros(g.clone());
    for i in 0..n {
        let x = g.nodes[i];
        out.phi1[i] = psi.phi2[i] - psi.phi1[i] - d1[i] * x;
        out.phi2[i] = lap[i] - d2[i] * x - psi.phi2[i] * 2.0 + nonlinearity_c(x, psi.phi1[i]);
    }
    out
}

/// Samples of Ψ_*.
pub fn profile_state(grid: Arc<RadialGrid>) -> StatePair {
    StatePair::from_real_fn(grid, |x| profile_similarity(x).0, |x| profile_similarity(x).1)
}
