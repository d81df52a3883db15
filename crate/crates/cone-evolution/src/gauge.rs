use std::sync::Arc;

use blowup_geometry::gauge_mode;
use linear_spectrum::gauge_left_vector;
use numerics_core::{RadialGrid, StatePair, C64};

use crate::{EvolutionError, Result};

/// Left eigenvector of the discrete generator at its eigenvalue near 1.
#[derive(Debug, Clone)]
pub struct GaugeRepresenter {
    pub lambda: C64,
    pub w: StatePair,
}

impl GaugeRepresenter {
    pub fn new(grid: Arc<RadialGrid>) -> Result<Self> {
        let (lambda, w) = gauge_left_vector(grid)?;
        Ok(Self { lambda, w })
    }

    pub fn amplitude(&self, phi: &StatePair) -> Result<C64> {
        gauge_projection(phi, &self.w)
    }
}

fn pair(a: &StatePair, b: &StatePair) -> C64 {
    a.phi1.iter().zip(&b.phi1).chain(a.phi2.iter().zip(&b.phi2)).map(|(x, y)| x * y).sum()
}

/// Amplitude α of the rank-one spectral projection P Φ = α g.
pub fn gauge_projection(phi: &StatePair, representer: &StatePair) -> Result<C64> {
    if !phi.grid.same_as(&representer.grid) {
        return Err(EvolutionError::Usage("representer lives on a different grid".into()));
    }
    let g = StatePair::from_real_fn(phi.grid.clone(), |x| gauge_mode(x).0, |x| gauge_mode(x).1);
    let norm = pair(representer, &g);
    if (norm - 1.0).norm() > 1e-8 {
        return Err(EvolutionError::Usage(format!("representer not normalized: <w, g> = {norm}")));
    }
    Ok(pair(representer, phi))
}
