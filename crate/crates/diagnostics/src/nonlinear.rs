use std::f64::consts::SQRT_2;

use cone_evolution::nonlinearity;
use linear_spectrum::potential;
use numerics_core::{h_norm, StatePair, C64};
use rayon::prelude::*;
use serde::Serialize;

use crate::{DiagnosticsError, LqRule, Result};

const SERIES_REACH: f64 = 4.0;

/// n(ρ, x) = N(ψ*₁ + x) − N(ψ*₁) − 48x/(ρ² + 2)², evaluated without
/// cancellation for small x through its Taylor form with integral remainder.
pub fn remainder(rho: f64, x: f64) -> f64 {
    let b = 2.0 * rho * x;
    if b.abs() > SERIES_REACH {
        let psi = profile_value(rho);
        return nonlinearity(rho, psi + x) - nonlinearity(rho, psi) - potential(rho) * x;
    }
    let r2 = rho * rho;
    let theta = 4.0 * (rho / SQRT_2).atan();
    let quad = 12.0 * SQRT_2 * (2.0 - r2) / ((r2 + 2.0) * (r2 + 2.0)) * x * x;
    // 6∫₀^x cos(θ + 2ρt)(x − t)² dt = 12x³ Σ_k (2ρx)^k cos(θ + kπ/2)/(k+3)!
    let (c, s) = (theta.cos(), theta.sin());
    let cyc = [c, -s, -c, s];
    let mut term = 1.0 / 6.0;
    let mut sum = 0.0;
    for k in 0..60 {
        sum += term * cyc[k % 4];
        term *= b / (k as f64 + 4.0);
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    quad + 12.0 * x * x * x * sum
}

fn profile_value(rho: f64) -> f64 {
    blowup_geometry::profile_similarity(rho).0
}

/// N(u) = (0, n(ρ, Re u₁)).
pub fn nonlinear_remainder(u: &StatePair) -> StatePair {
    let mut out = StatePair::zeros(u.grid.clone());
    for (i, &x) in u.grid.nodes.iter().enumerate() {
        out.phi2[i] = C64::new(remainder(x, u.phi1[i].re), 0.0);
    }
    out
}

fn real_part(v: &[C64]) -> Vec<C64> {
    v.iter().map(|z| C64::new(z.re, 0.0)).collect()
}

struct Pieces {
    l12: f64,
    l9: f64,
    l8: f64,
    l36_5: f64,
    l6: f64,
    d4: f64,
}

fn pieces(u: &StatePair, rule: &LqRule) -> Pieces {
    let f = real_part(&u.phi1);
    let n = rule.norms(&f, &[12.0, 9.0, 8.0, 36.0 / 5.0, 6.0]);
    let d4 = rule.norm(&u.grid.diff1(&f), 4.0);
    Pieces { l12: n[0], l9: n[1], l8: n[2], l36_5: n[3], l6: n[4], d4 }
}

/// ‖u₁‖²_{L¹²} + ‖u₁‖³_{L⁹} + ‖u₁‖⁴_{L⁸} + ‖u₁′‖²_{L⁴}
pub fn growth_bound_rhs(u: &StatePair, rule: &LqRule) -> f64 {
    let p = pieces(u, rule);
    p.l12.powi(2) + p.l9.powi(3) + p.l8.powi(4) + p.d4.powi(2)
}

/// Right-hand side of the Lipschitz estimate for N(u) − N(v).
pub fn lipschitz_bound_rhs(u: &StatePair, v: &StatePair, rule: &LqRule) -> Result<f64> {
    let d = u.axpy(C64::new(-1.0, 0.0), v);
    let (pu, pv, pd) = (pieces(u, rule), pieces(v, rule), pieces(&d, rule));
    let first = pu.l12
        + pv.l12
        + pu.l8.powi(2)
        + pv.l8.powi(2)
        + pu.d4 * (1.0 + pu.l6 + pv.l6)
        + pu.l36_5.powi(3)
        + pv.l36_5.powi(3);
    Ok(pd.l12 * first + pd.d4 * (pv.l12 + pv.l8.powi(2)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonlinearityReport {
    pub samples: usize,
    pub growth_ratios: Vec<f64>,
    pub lipschitz_ratios: Vec<f64>,
    pub skipped_growth: usize,
    pub skipped_lipschitz: usize,
    /// max LHS/RHS of the growth estimate
    pub growth_constant: f64,
    pub lipschitz_constant: f64,
    pub scaling_amplitudes: [f64; 2],
    /// ‖N(s·u)‖_H/s² at both amplitudes, per sample
    pub scaling_ratios: Vec<[f64; 2]>,
    pub skipped_scaling: usize,
    /// max over samples of |ratio(s₀)/ratio(s₁) − 1|
    pub scaling_variation: f64,
}

impl NonlinearityReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

fn ratio(lhs: f64, rhs: f64) -> Option<f64> {
    (rhs > 0.0).then(|| lhs / rhs)
}

/// Empirical constants of both nonlinear estimates over the sample pairs.
pub fn nonlinearity_bound_report(samples: &[(StatePair, StatePair)]) -> Result<NonlinearityReport> {
    if samples.is_empty() {
        return Err(DiagnosticsError::Config("empty sample set".into()));
    }
    let grid = samples[0].0.grid.clone();
    if samples.iter().any(|(u, v)| !u.grid.same_as(&grid) || !v.grid.same_as(&grid)) {
        return Err(DiagnosticsError::Config("samples live on different grids".into()));
    }
    let rule = LqRule::new(&grid)?;
    let amps = [1e-2, 1e-3];
    let per: Vec<_> = samples
        .par_iter()
        .map(|(u, v)| {
            let (nu, nv) = (nonlinear_remainder(u), nonlinear_remainder(v));
            let g = [ratio(h_norm(&nu), growth_bound_rhs(u, &rule)), ratio(h_norm(&nv), growth_bound_rhs(v, &rule))];
            let diff = nu.axpy(C64::new(-1.0, 0.0), &nv);
            let l = lipschitz_bound_rhs(u, v, &rule).ok().and_then(|r| ratio(h_norm(&diff), r));
            let sc = amps.map(|s| h_norm(&nonlinear_remainder(&u.scale(C64::new(s, 0.0)))) / (s * s));
            (g, l, sc)
        })
        .collect();
    let mut rep = NonlinearityReport {
        samples: samples.len(),
        growth_ratios: vec![],
        lipschitz_ratios: vec![],
        skipped_growth: 0,
        skipped_lipschitz: 0,
        growth_constant: 0.0,
        lipschitz_constant: 0.0,
        scaling_amplitudes: amps,
        scaling_ratios: vec![],
        skipped_scaling: 0,
        scaling_variation: 0.0,
    };
    for (g, l, sc) in per {
        for r in g {
            match r {
                Some(r) => rep.growth_ratios.push(r),
                None => rep.skipped_growth += 1,
            }
        }
        match l {
            Some(r) => rep.lipschitz_ratios.push(r),
            None => rep.skipped_lipschitz += 1,
        }
        if sc[1] > 0.0 {
            rep.scaling_variation = rep.scaling_variation.max((sc[0] / sc[1] - 1.0).abs());
            rep.scaling_ratios.push(sc);
        } else {
            rep.skipped_scaling += 1;
        }
    }
    rep.growth_constant = rep.growth_ratios.iter().copied().fold(0.0, f64::max);
    rep.lipschitz_constant = rep.lipschitz_ratios.iter().copied().fold(0.0, f64::max);
    Ok(rep)
}
