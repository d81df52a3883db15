use numerics_core::C64;

use crate::frobenius::{Endpoint, LocalSolution};
use crate::{ResolventError, Result};

/// Default relative tolerance of the continuation.
pub const RTOL: f64 = 1e-11;

type State = [C64; 2];

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Embedded Dormand–Prince 5(4) integrator for the (u, u′) system.
#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self { rtol: RTOL, max_steps: 200_000 }
    }
}

fn comb(y: &State, k: &[State; 7], coef: &[f64], h: f64) -> State {
    let mut out = *y;
    for (j, &a) in coef.iter().enumerate() {
        if a != 0.0 {
            out[0] += k[j][0] * (a * h);
            out[1] += k[j][1] * (a * h);
        }
    }
    out
}

impl Dopri5 {
    /// Integrate from (t0, y0) through `targets`, which must be ordered
    /// monotonically away from t0; returns the state at each target.
    pub fn integrate(&self, f: &dyn Fn(f64, &State) -> State, t0: f64, y0: State, targets: &[f64]) -> Result<Vec<State>> {
        let mut out = Vec::with_capacity(targets.len());
        let Some(&last) = targets.last() else { return Ok(out) };
        let dir = if last >= t0 { 1.0 } else { -1.0 };
        let mut t = t0;
        let mut y = y0;
        let mut h = 1e-3 * (last - t0).abs().max(1e-6);
        let mut k: [State; 7] = [[C64::new(0.0, 0.0); 2]; 7];
        let mut steps = 0;
        for &target in targets {
            while (target - t) * dir > 0.0 {
                steps += 1;
                if steps > self.max_steps {
                    return Err(ResolventError::Continuation { rho: t, reason: "too many steps".into() });
                }
                let remaining = (target - t).abs();
                let step = h.min(remaining);
                if step < 1e-15 * t.abs().max(1e-3) && step < remaining {
                    return Err(ResolventError::Continuation { rho: t, reason: "step size underflow".into() });
                }
                let hs = step * dir;
                k[0] = f(t, &y);
                for s in 1..7 {
                    let ys = comb(&y, &k, &A[s][..s], hs);
                    k[s] = f(t + C[s] * hs, &ys);
                }
                let ynew = comb(&y, &k, &A[6], hs);
                let yerr = {
                    let mut e = [C64::new(0.0, 0.0); 2];
                    for (j, &c) in E.iter().enumerate() {
                        e[0] += k[j][0] * (c * hs);
                        e[1] += k[j][1] * (c * hs);
                    }
                    e
                };
                let floor = 1e-6 * (y[0].norm() + y[1].norm());
                let mut err = 0.0f64;
                for i in 0..2 {
                    let sc = self.rtol * (y[i].norm().max(ynew[i].norm()) + floor);
                    err += (yerr[i].norm() / sc).powi(2);
                }
                let err = (0.5 * err).sqrt();
                if !err.is_finite() {
                    if step < 1e-15 {
                        return Err(ResolventError::Continuation { rho: t, reason: "non-finite state".into() });
                    }
                    h = 0.2 * step;
                    continue;
                }
                if err <= 1.0 {
                    t = if step == remaining { target } else { t + hs };
                    y = ynew;
                }
                let fac = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
                h = step * fac;
            }
            out.push(y);
        }
        Ok(out)
    }
}

/// Values (u, u′) of the solution fixed by `local` at arbitrary points in
/// (0, 1]: series inside the local domain, one continuation pass outside.
pub fn sample_solution(local: &LocalSolution, points: &[f64]) -> Result<Vec<(C64, C64)>> {
    sample_with(local, points, &Dopri5::default())
}

pub(crate) fn sample_with(local: &LocalSolution, points: &[f64], solver: &Dopri5) -> Result<Vec<(C64, C64)>> {
    let mut out = vec![(C64::new(0.0, 0.0), C64::new(0.0, 0.0)); points.len()];
    let edge = local.edge();
    let mut far: Vec<usize> = Vec::new();
    for (i, &p) in points.iter().enumerate() {
        if !(0.0..=1.0).contains(&p) {
            return Err(ResolventError::Domain(format!("ρ = {p} outside [0, 1]")));
        }
        if local.in_domain(p) {
            out[i] = local.eval(p);
        } else {
            let bad = match local.endpoint {
                Endpoint::Zero => p >= 1.0,
                Endpoint::One => p <= 0.0,
            };
            if bad {
                return Err(ResolventError::Continuation { rho: p, reason: "cannot continue onto the far endpoint".into() });
            }
            far.push(i);
        }
    }
    if far.is_empty() {
        return Ok(out);
    }
    far.sort_by(|&a, &b| (points[a] - edge).abs().partial_cmp(&(points[b] - edge).abs()).unwrap());
    let targets: Vec<f64> = far.iter().map(|&i| points[i]).collect();
    let ode = local.ode;
    let f = move |rho: f64, y: &State| -> State { [y[1], ode.second_derivative(rho, y[0], y[1], C64::new(0.0, 0.0))] };
    let (u0, du0) = local.eval(edge);
    let states = solver.integrate(&f, edge, [u0, du0], &targets)?;
    for (idx, st) in far.into_iter().zip(states) {
        out[idx] = (st[0], st[1]);
    }
    Ok(out)
}

/// (u, u′) at `to` for the solution defined by `local`.
pub fn continue_solution(local: &LocalSolution, to: f64) -> Result<(C64, C64)> {
    if !(to > 0.0 && to < 1.0) {
        return Err(ResolventError::Domain(format!("continuation target {to} must lie in (0, 1)")));
    }
    Ok(sample_solution(local, &[to])?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius::{basis_at_one, basis_at_zero, Branch};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn dopri_exponential() {
        let f = |_t: f64, y: &State| [y[1], y[0]];
        let out = Dopri5::default().integrate(&f, 0.0, [c(1.0), c(1.0)], &[0.5, 1.0, 2.0]).unwrap();
        for (y, t) in out.iter().zip([0.5f64, 1.0, 2.0]) {
            assert!((y[0].re - t.exp()).abs() < 1e-10 * t.exp());
        }
    }

    #[test]
    fn free_solution_continued() {
        let s = basis_at_zero(c(1.0), 40, false).unwrap();
        let (u, _) = continue_solution(&s, 0.5).unwrap();
        let psi1 = 1.0 / (1.0 + 0.75f64.sqrt()).powi(2);
        assert!((u.re - 4.0 * psi1).abs() < 1e-10);
    }

    #[test]
    fn eigenfunction_continued() {
        let s = basis_at_zero(c(1.0), 40, true).unwrap();
        for &r in &[0.6, 0.8] {
            let (u, du) = continue_solution(&s, r).unwrap();
            assert!((u.re - 2.0 / (2.0 + r * r)).abs() < 1e-10);
            assert!((du.re + 4.0 * r / (2.0 + r * r).powi(2)).abs() < 1e-9);
        }
    }

    #[test]
    fn weighted_wronskian_is_constant() {
        let lam = C64::new(0.2, 4.0);
        let a = basis_at_one(lam, Branch::Regular, 60, true).unwrap();
        let b = basis_at_one(lam, Branch::Singular, 60, true).unwrap();
        let pts: Vec<f64> = (0..=12).map(|k| 0.2 + 0.05 * k as f64).collect();
        let ua = sample_solution(&a, &pts).unwrap();
        let ub = sample_solution(&b, &pts).unwrap();
        for ((p, x), y) in pts.iter().zip(&ua).zip(&ub) {
            let w = x.0 * y.1 - x.1 * y.0;
            let ww = w * p.powi(5) * ((lam - 0.5) * (1.0 - p * p).ln()).exp();
            assert!((ww - c(2.0)).norm() < 2e-9, "{p}: {ww}");
        }
    }
}
