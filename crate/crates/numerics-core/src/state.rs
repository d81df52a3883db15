use std::sync::Arc;

use crate::{NumericsError, RadialGrid, Result, C64};

/// Two-component field sampled on a grid.
#[derive(Debug, Clone)]
pub struct StatePair {
    pub grid: Arc<RadialGrid>,
    pub phi1: Vec<C64>,
    pub phi2: Vec<C64>,
}

impl StatePair {
    pub fn new(grid: Arc<RadialGrid>, phi1: Vec<C64>, phi2: Vec<C64>) -> Result<Self> {
        if phi1.len() != grid.n || phi2.len() != grid.n {
            return Err(NumericsError::Usage(format!(
                "sample length {} / {} does not match grid size {}",
                phi1.len(),
                phi2.len(),
                grid.n
            )));
        }
        if let Some(i) = phi1.iter().chain(phi2.iter()).position(|v| !v.is_finite()) {
            return Err(NumericsError::NonFinite(i % grid.n));
        }
        Ok(Self { grid, phi1, phi2 })
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let n = grid.n;
        Self { grid, phi1: vec![C64::new(0.0, 0.0); n], phi2: vec![C64::new(0.0, 0.0); n] }
    }

    pub fn from_fn(
        grid: Arc<RadialGrid>,
        f1: impl Fn(f64) -> C64,
        f2: impl Fn(f64) -> C64,
    ) -> Self {
        let phi1 = grid.nodes.iter().map(|&x| f1(x)).collect();
        let phi2 = grid.nodes.iter().map(|&x| f2(x)).collect();
        Self { grid, phi1, phi2 }
    }

    pub fn from_real_fn(
        grid: Arc<RadialGrid>,
        f1: impl Fn(f64) -> f64,
        f2: impl Fn(f64) -> f64,
    ) -> Self {
        Self::from_fn(grid, |x| C64::new(f1(x), 0.0), |x| C64::new(f2(x), 0.0))
    }

    pub fn n(&self) -> usize {
        self.grid.n
    }

    /// Stacked vector (phi1, phi2) of length 2n.
    pub fn stacked(&self) -> Vec<C64> {
        self.phi1.iter().chain(self.phi2.iter()).copied().collect()
    }

    pub fn from_stacked(grid: Arc<RadialGrid>, v: &[C64]) -> Result<Self> {
        let n = grid.n;
        if v.len() != 2 * n {
            return Err(NumericsError::Usage(format!("stacked length {} != 2n = {}", v.len(), 2 * n)));
        }
        Self::new(grid, v[..n].to_vec(), v[n..].to_vec())
    }

    /// |d1 phi1| at the origin; zero for an even, regular field.
    pub fn parity_residual(&self) -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..self.grid.n {
            acc += self.phi1[j] * self.grid.d1[(0, j)];
        }
        acc.norm()
    }

    pub fn check_parity(&self, tol: f64) -> Result<()> {
        let r = self.parity_residual();
        if r > tol {
            return Err(NumericsError::Domain(format!("odd component at origin: {r:e} > {tol:e}")));
        }
        Ok(())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            grid: self.grid.clone(),
            phi1: self.phi1.iter().map(|v| v * s).collect(),
            phi2: self.phi2.iter().map(|v| v * s).collect(),
        }
    }

    /// self + s * other
    pub fn axpy(&self, s: C64, other: &StatePair) -> Self {
        Self {
            grid: self.grid.clone(),
            phi1: self.phi1.iter().zip(&other.phi1).map(|(a, b)| a + b * s).collect(),
            phi2: self.phi2.iter().zip(&other.phi2).map(|(a, b)| a + b * s).collect(),
        }
    }

    pub fn max_norm(&self) -> f64 {
        self.phi1.iter().chain(self.phi2.iter()).map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.phi1.iter().chain(self.phi2.iter()).all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build_grid;

    #[test]
    fn length_checked() {
        let g = Arc::new(build_grid(8).unwrap());
        let bad = StatePair::new(g.clone(), vec![C64::new(0.0, 0.0); 7], vec![C64::new(0.0, 0.0); 8]);
        assert!(bad.is_err());
        let nan = StatePair::new(g, vec![C64::new(f64::NAN, 0.0); 8], vec![C64::new(0.0, 0.0); 8]);
        assert!(matches!(nan, Err(NumericsError::NonFinite(0))));
    }

    #[test]
    fn parity() {
        let g = Arc::new(build_grid(20).unwrap());
        let even = StatePair::from_real_fn(g.clone(), |x| 1.0 / (2.0 + x * x), |_| 0.0);
        assert!(even.parity_residual() < 1e-12);
        let odd = StatePair::from_real_fn(g, |x| x, |_| 0.0);
        assert!(odd.check_parity(1e-8).is_err());
    }
}
