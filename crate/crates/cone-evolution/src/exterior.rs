use blowup_geometry::profile_similarity;
use numerics_core::quadrature::integrate_panels;
use numerics_core::C64;

use crate::{nonlinearity, ConeTrajectory, EvolutionError, Mode, Result};

/// Backward characteristic triangle with base [r₀−h, r₀+h] at t₀ and apex
/// (t₁, r₀), h = t₁ − t₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExteriorCone {
    pub t0: f64,
    pub t1: f64,
    pub r0: f64,
}

impl ExteriorCone {
    pub fn new(t0: f64, t1: f64, r0: f64) -> Result<Self> {
        let h = t1 - t0;
        if !(h > 0.0) || !(r0 - h > 0.0) {
            return Err(EvolutionError::Config(format!(
                "cone (t0={t0}, t1={t1}, r0={r0}) must satisfy t1 > t0 and r0 - (t1 - t0) > 0"
            )));
        }
        Ok(Self { t0, t1, r0 })
    }

    pub fn height(&self) -> f64 {
        self.t1 - self.t0
    }
}

#[derive(Debug, Clone)]
pub struct ExteriorOptions {
    /// lattice steps per cone height (Δr = Δt = h/k)
    pub k: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// drop Ñ entirely (pure d'Alembert)
    pub free: bool,
}

impl Default for ExteriorOptions {
    fn default() -> Self {
        Self { k: 64, tol: 1e-13, max_iter: 200, free: false }
    }
}

#[derive(Debug, Clone)]
pub struct ExteriorSolution {
    pub cone: ExteriorCone,
    pub k: usize,
    pub delta: f64,
    /// lattice[l][i]: u at t₀ + lΔ, r = r₀ − h + (l + i)Δ
    pub lattice: Vec<Vec<f64>>,
    pub picard_residual: f64,
    pub residual_history: Vec<f64>,
}

impl ExteriorSolution {
    pub fn t_at(&self, l: usize) -> f64 {
        self.cone.t0 + l as f64 * self.delta
    }

    pub fn r_at(&self, l: usize, i: usize) -> f64 {
        self.cone.r0 - self.cone.height() + (l + i) as f64 * self.delta
    }

    /// (t, r, u) over every lattice node.
    pub fn points(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::new();
        for (l, level) in self.lattice.iter().enumerate() {
            for (i, &u) in level.iter().enumerate() {
                out.push((self.t_at(l), self.r_at(l, i), u));
            }
        }
        out
    }
}

/// Ñ(u) = (5/r)∂r u + N(r, u) on one lattice level.
fn forcing(level: &[f64], r_start: f64, delta: f64) -> Vec<f64> {
    let m = level.len();
    if m < 3 {
        return vec![0.0; m];
    }
    (0..m)
        .map(|i| {
            let du = if i == 0 {
                (-3.0 * level[0] + 4.0 * level[1] - level[2]) / (2.0 * delta)
            } else if i == m - 1 {
                (3.0 * level[m - 1] - 4.0 * level[m - 2] + level[m - 3]) / (2.0 * delta)
            } else {
                (level[i + 1] - level[i - 1]) / (2.0 * delta)
            };
            let r = r_start + i as f64 * delta;
            5.0 / r * du + nonlinearity(r, level[i])
        })
        .collect()
}

/// Picard iteration of u = d'Alembert(f, g) + ½∬ Ñ(u) over the backward
/// characteristic triangle of each lattice node.
pub fn duhamel_exterior(
    f: &dyn Fn(f64) -> f64,
    g: &dyn Fn(f64) -> f64,
    cone: ExteriorCone,
    opts: &ExteriorOptions,
) -> Result<ExteriorSolution> {
    let k = opts.k;
    if k < 2 {
        return Err(EvolutionError::Config("exterior lattice needs k >= 2".into()));
    }
    let h = cone.height();
    let delta = h / k as f64;
    let base = cone.r0 - h;
    let gc = |y: f64| C64::new(g(y), 0.0);
    let free_term: Vec<Vec<f64>> = (0..=k)
        .map(|l| {
            let tp = l as f64 * delta;
            (0..=2 * (k - l))
                .map(|i| {
                    let r = base + (l + i) as f64 * delta;
                    let dal = 0.5 * (f(r + tp) + f(r - tp));
                    if l == 0 {
                        dal
                    } else {
                        dal + 0.5 * integrate_panels(&gc, r - tp, r + tp, 2, 20).re
                    }
                })
                .collect()
        })
        .collect();

    let mut u = free_term.clone();
    let mut history = Vec::new();
    if opts.free {
        return Ok(ExteriorSolution { cone, k, delta, lattice: u, picard_residual: 0.0, residual_history: history });
    }
    let mut growth_run = 0;
    for _ in 0..opts.max_iter {
        // trapezoid prefix sums of Ñ per level
        let prefix: Vec<Vec<f64>> = (0..=k)
            .map(|l| {
                let nl = forcing(&u[l], base + l as f64 * delta, delta);
                let mut p = vec![0.0; nl.len()];
                for i in 1..nl.len() {
                    p[i] = p[i - 1] + 0.5 * delta * (nl[i - 1] + nl[i]);
                }
                p
            })
            .collect();
        let mut next = free_term.clone();
        for l in 1..=k {
            for i in 0..next[l].len() {
                // global index of the node: j = l + i
                let j = l + i;
                let mut acc = 0.0;
                for (m, pm) in prefix.iter().enumerate().take(l) {
                    let half = l - m;
                    // indices within level m: (j ∓ half) − m
                    let inner = pm[j + half - m] - pm[j - half - m];
                    let w = if m == 0 { 0.5 } else { 1.0 };
                    acc += w * inner;
                }
                next[l][i] += 0.5 * delta * acc;
            }
        }
        let res = next
            .iter()
            .zip(&u)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max);
        if !res.is_finite() {
            return Err(EvolutionError::IterationFailure("non-finite iterate".into()));
        }
        if let Some(&prev) = history.last() {
            growth_run = if res > prev { growth_run + 1 } else { 0 };
            if growth_run >= 5 {
                return Err(EvolutionError::IterationFailure(format!(
                    "update grew over 5 consecutive iterations (last {res:e})"
                )));
            }
        }
        history.push(res);
        u = next;
        if res <= opts.tol {
            return Ok(ExteriorSolution { cone, k, delta, lattice: u, picard_residual: res, residual_history: history });
        }
    }
    Err(EvolutionError::IterationFailure(format!(
        "no convergence in {} iterations (last update {:e})",
        opts.max_iter,
        history.last().copied().unwrap_or(f64::NAN)
    )))
}

/// (4 u_{Δ/2} − u_Δ)/3 on the coarse lattice.
pub fn richardson(coarse: &ExteriorSolution, fine: &ExteriorSolution) -> Result<ExteriorSolution> {
    if fine.k != 2 * coarse.k || fine.cone != coarse.cone {
        return Err(EvolutionError::Usage("Richardson needs the same cone with k doubled".into()));
    }
    let lattice = coarse
        .lattice
        .iter()
        .enumerate()
        .map(|(l, level)| {
            level.iter().enumerate().map(|(i, &uc)| (4.0 * fine.lattice[2 * l][2 * i] - uc) / 3.0).collect()
        })
        .collect();
    Ok(ExteriorSolution {
        lattice,
        picard_residual: coarse.picard_residual.max(fine.picard_residual),
        residual_history: Vec::new(),
        ..coarse.clone()
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverlapReport {
    pub max_discrepancy: f64,
    pub points: usize,
    pub interpolation: String,
}

/// Compare exterior lattice values with the similarity-coordinate trajectory
/// at every lattice node inside the backward light cone of T.
pub fn overlap_compare(ext: &ExteriorSolution, traj: &ConeTrajectory) -> Result<OverlapReport> {
    let big_t = traj.t.t;
    let grid = traj.states[0].grid.clone();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (t, r, u) in ext.points() {
        let s = big_t - t;
        if !(s > 0.0) || r > s || t < 0.0 {
            continue;
        }
        let tau = (big_t / s).ln();
        if tau > traj.tau_max() {
            continue;
        }
        let rho = r / s;
        let state = traj.state_at(tau)?;
        let phi1 = grid.interpolate(&state.phi1, rho).re;
        let psi1 = match traj.mode {
            Mode::Free => phi1,
            _ => profile_similarity(rho).0 + phi1,
        };
        worst = worst.max((psi1 / s - u).abs());
        count += 1;
    }
    if count == 0 {
        return Err(EvolutionError::Usage("exterior lattice and trajectory do not overlap".into()));
    }
    Ok(OverlapReport {
        max_discrepancy: worst,
        points: count,
        interpolation: "rho: barycentric on the collocation grid; tau: 4-point Lagrange between stored stamps".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_data_zero_solution() {
        let cone = ExteriorCone::new(0.0, 0.5, 2.0).unwrap();
        let s = duhamel_exterior(&|_| 0.0, &|_| 0.0, cone, &ExteriorOptions { k: 16, ..Default::default() }).unwrap();
        assert!(s.points().iter().all(|p| p.2 == 0.0));
    }

    #[test]
    fn free_linear_data() {
        let cone = ExteriorCone::new(0.0, 0.5, 2.0).unwrap();
        let s = duhamel_exterior(&|r| r, &|_| 0.0, cone, &ExteriorOptions { k: 16, free: true, ..Default::default() })
            .unwrap();
        for (_, r, u) in s.points() {
            assert!((u - r).abs() < 1e-14);
        }
    }

    #[test]
    fn cone_must_avoid_origin() {
        assert!(ExteriorCone::new(0.0, 1.0, 0.9).is_err());
    }
}
