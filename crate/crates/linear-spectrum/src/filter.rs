use std::f64::consts::PI;
use std::io::Write;

use numerics_core::{RadialGrid, C64};
use serde::Serialize;

use crate::{potential, EigenPair, Result, SpectrumError};

#[derive(Debug, Clone, Copy)]
pub struct FilterConfig {
    pub match_tol: f64,
    pub residual_tol: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self { match_tol: 1e-4, residual_tol: 1e-5 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub n: usize,
    #[serde(serialize_with = "ser_complex")]
    pub eigenvalues: Vec<C64>,
    pub residual: Vec<f64>,
    pub persistent: Vec<bool>,
}

fn ser_complex<S: serde::Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

impl SpectrumReport {
    pub fn persistent_eigenvalues(&self) -> Vec<C64> {
        self.eigenvalues.iter().zip(&self.persistent).filter(|(_, p)| **p).map(|(z, _)| *z).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,re,im,residual,persistent")?;
        for i in 0..self.eigenvalues.len() {
            let z = self.eigenvalues[i];
            writeln!(
                w,
                "{},{:.16e},{:.16e},{:.16e},{}",
                self.n, z.re, z.im, self.residual[i], self.persistent[i] as u8
            )?;
        }
        Ok(())
    }
}

/// Relative residual of the first component in the spectral ODE
/// −(1−ρ²)u″ + (2(λ+2)ρ − 5/ρ)u′ + ((λ+2)(λ+1) − P)u = 0,
/// after interpolating the samples onto `eval` and differentiating there.
pub fn spectral_ode_residual(
    lambda: C64,
    u: &[C64],
    grid: &RadialGrid,
    eval: &RadialGrid,
    with_potential: bool,
) -> f64 {
    let mut u = u.to_vec();
    grid.regularize(&mut u);
    let vals: Vec<C64> = if grid.same_as(eval) {
        u
    } else {
        eval.nodes.iter().map(|&x| grid.interpolate(&u, x)).collect()
    };
    let d1 = eval.diff1(&vals);
    let d2 = eval.diff2(&vals);
    let mu = (lambda + 2.0) * (lambda + 1.0);
    let mut res: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 1..eval.n - 1 {
        let x = eval.nodes[i];
        let v = if with_potential { potential(x) } else { 0.0 };
        let a = d2[i] * (-(1.0 - x * x));
        let b = d1[i] * ((lambda + 2.0) * (2.0 * x) - 5.0 / x);
        let c = vals[i] * (mu - v);
        res = res.max((a + b + c).norm());
        scale = scale.max(a.norm() + b.norm() + c.norm());
    }
    if scale == 0.0 {
        f64::INFINITY
    } else {
        res / scale
    }
}

/// Size of the trailing quarter of Chebyshev coefficients relative to the
/// largest one: small for samples of functions smooth up to ρ = 1, large when
/// a (1−ρ)^s branch with non-integer s is present.
pub fn chebyshev_tail(u: &[C64]) -> f64 {
    let n = u.len();
    let big_n = n - 1;
    let coeffs: Vec<f64> = (0..n)
        .map(|k| {
            let mut s = C64::new(0.0, 0.0);
            for (i, v) in u.iter().enumerate() {
                let w = if i == 0 || i == big_n { 0.5 } else { 1.0 };
                s += v * (w * ((i * k) as f64 * PI / big_n as f64).cos());
            }
            s.norm() * 2.0 / big_n as f64
        })
        .collect();
    let top = coeffs.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0.0;
    }
    coeffs[3 * n / 4..].iter().cloned().fold(0.0, f64::max) / top
}

/// Keep eigenvalues of the coarse problem that reappear at the fine
/// resolution and whose eigenvector solves the spectral ODE between nodes.
pub fn filter_physical(
    coarse_grid: &RadialGrid,
    coarse: &[EigenPair],
    fine_grid: &RadialGrid,
    fine: &[EigenPair],
    with_potential: bool,
    cfg: FilterConfig,
) -> Result<SpectrumReport> {
    if fine_grid.n <= coarse_grid.n {
        return Err(SpectrumError::Usage("fine grid must be larger than the coarse grid".into()));
    }
    let n = coarse_grid.n;
    let mut eigenvalues = Vec::with_capacity(coarse.len());
    let mut residual = Vec::with_capacity(coarse.len());
    let mut persistent = Vec::with_capacity(coarse.len());
    for p in coarse {
        let dist = fine.iter().map(|q| (q.lambda - p.lambda).norm()).fold(f64::INFINITY, f64::min);
        let r = spectral_ode_residual(p.lambda, &p.right[..n], coarse_grid, fine_grid, with_potential);
        eigenvalues.push(p.lambda);
        residual.push(r);
        persistent.push(dist <= cfg.match_tol && r <= cfg.residual_tol);
    }
    Ok(SpectrumReport { n, eigenvalues, residual, persistent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use numerics_core::build_grid;

    #[test]
    fn gauge_solves_spectral_ode() {
        let g = build_grid(32).unwrap();
        let fine = build_grid(64).unwrap();
        let u: Vec<C64> = g.nodes.iter().map(|x| C64::new(1.0 / (2.0 + x * x), 0.0)).collect();
        assert!(spectral_ode_residual(C64::new(1.0, 0.0), &u, &g, &fine, true) < 1e-8);
        assert!(spectral_ode_residual(C64::new(1.3, 0.0), &u, &g, &fine, true) > 1e-3);
    }

    #[test]
    fn tail_detects_endpoint_branch() {
        let g = build_grid(48).unwrap();
        let smooth: Vec<C64> = g.nodes.iter().map(|x| C64::new(1.0 / (2.0 + x * x), 0.0)).collect();
        let rough: Vec<C64> = g.nodes.iter().map(|x| C64::new((1.0 - x).powf(1.3), 0.0)).collect();
        assert!(chebyshev_tail(&smooth) < 1e-12);
        assert!(chebyshev_tail(&rough) > 1e-6);
    }

    #[test]
    fn unmatched_value_rejected() {
        let g = build_grid(16).unwrap();
        let fine = build_grid(32).unwrap();
        let u: Vec<C64> = g.nodes.iter().map(|x| C64::new(1.0 / (2.0 + x * x), 0.0)).collect();
        let mut right = u.clone();
        right.extend(u.iter().map(|_| C64::new(0.0, 0.0)));
        let coarse = vec![EigenPair { lambda: C64::new(1.0, 0.0), right: right.clone(), left: right.clone() }];
        let far = vec![EigenPair { lambda: C64::new(-3.0, 7.0), right: right.clone(), left: right }];
        let rep = filter_physical(&g, &coarse, &fine, &far, true, FilterConfig::default()).unwrap();
        assert_eq!(rep.persistent, vec![false]);
        let rep = filter_physical(&g, &coarse, &fine, &coarse, true, FilterConfig::default()).unwrap();
        assert_eq!(rep.persistent, vec![true]);
        let json = rep.to_json();
        assert_eq!(json["eigenvalues"][0][0], 1.0);
    }
}
