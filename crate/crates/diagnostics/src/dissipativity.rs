use std::sync::Arc;

use numerics_core::{build_grid, h_norm, htilde_inner, StatePair};
use rayon::prelude::*;
use serde::Serialize;

use crate::{RandomSmooth, Result};

/// L̃Φ = (φ₂ − φ₁ − ρφ₁′, Δφ₁ − ρφ₂′ − 2φ₂), the potential-free generator.
pub fn free_generator(u: &StatePair) -> StatePair {
    let g = &u.grid;
    let d1 = g.diff1(&u.phi1);
    let lap = g.radial_laplacian(&u.phi1, 5.0);
    let d2 = g.diff1(&u.phi2);
    let mut out = StatePair::zeros(g.clone());
    for i in 0..g.n {
        let x = g.nodes[i];
        out.phi1[i] = u.phi2[i] - u.phi1[i] - d1[i] * x;
        out.phi2[i] = lap[i] - d2[i] * x - u.phi2[i] * 2.0;
    }
    out
}

/// Re (L̃Φ, Φ)_H̃
pub fn dissipativity_check(phi: &StatePair) -> Result<f64> {
    Ok(htilde_inner(&free_generator(phi), phi)?.re)
}

/// ‖u‖_H̃ / ‖u‖_H, `None` for the zero state.
pub fn norm_ratio(u: &StatePair) -> Result<Option<f64>> {
    let h = h_norm(u);
    if h == 0.0 {
        return Ok(None);
    }
    Ok(Some(htilde_inner(u, u)?.re.max(0.0).sqrt() / h))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormEquivalenceReport {
    pub n_coarse: usize,
    pub n_fine: usize,
    pub ratios_coarse: Vec<f64>,
    pub ratios_fine: Vec<f64>,
    pub min: f64,
    pub max: f64,
    /// max over samples of |r_fine/r_coarse − 1|
    pub refinement_change: f64,
}

/// H̃/H ratios for every sample on two resolutions.
pub fn norm_equivalence_report(
    samples: &[RandomSmooth],
    n_coarse: usize,
    n_fine: usize,
) -> Result<NormEquivalenceReport> {
    let gc = Arc::new(build_grid(n_coarse)?);
    let gf = Arc::new(build_grid(n_fine)?);
    let pairs = samples
        .par_iter()
        .map(|s| Ok((norm_ratio(&s.state(gc.clone()))?, norm_ratio(&s.state(gf.clone()))?)))
        .collect::<Result<Vec<_>>>()?;
    let (ratios_coarse, ratios_fine): (Vec<f64>, Vec<f64>) =
        pairs.into_iter().filter_map(|(a, b)| Some((a?, b?))).unzip();
    let all = ratios_coarse.iter().chain(&ratios_fine);
    let min = all.clone().copied().fold(f64::INFINITY, f64::min);
    let max = all.copied().fold(0.0, f64::max);
    let refinement_change =
        ratios_coarse.iter().zip(&ratios_fine).map(|(a, b)| (b / a - 1.0).abs()).fold(0.0, f64::max);
    Ok(NormEquivalenceReport { n_coarse, n_fine, ratios_coarse, ratios_fine, min, max, refinement_change })
}

#[cfg(test)]
mod tests {
    use super::*;
    use numerics_core::C64;

    #[test]
    fn constants_give_boundary_term() {
        let g = Arc::new(build_grid(16).unwrap());
        let one = StatePair::from_real_fn(g.clone(), |_| 1.0, |_| 1.0);
        let l = free_generator(&one);
        assert!(l.phi1.iter().all(|v| v.norm() < 1e-13));
        let dev = l.phi2.iter().map(|v| (v - C64::new(-2.0, 0.0)).norm()).fold(0.0, f64::max);
        assert!(dev < 1e-10, "{dev}");
        assert!((dissipativity_check(&one).unwrap() + 2.0).abs() < 1e-12);
        assert_eq!(dissipativity_check(&StatePair::zeros(g.clone())).unwrap(), 0.0);
        assert_eq!(norm_ratio(&StatePair::zeros(g)).unwrap(), None);
    }
}
