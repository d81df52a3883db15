use std::sync::Arc;

use numerics_core::{RadialGrid, StatePair, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Even polynomial pair φ_j(ρ) = Σ_k c_{j,k} ρ^{2k}, reproducible on any grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomSmooth {
    pub c1: Vec<C64>,
    pub c2: Vec<C64>,
}

impl RandomSmooth {
    /// Coefficients uniform in the unit disc (or interval) scaled by amplitude/(1+k).
    pub fn draw(rng: &mut impl Rng, degree: usize, amplitude: f64, complex: bool) -> Self {
        let mut coeff = |k: usize| {
            let s = amplitude / (1.0 + k as f64);
            let re = rng.gen_range(-1.0..1.0);
            let im = if complex { rng.gen_range(-1.0..1.0) } else { 0.0 };
            C64::new(re, im) * s
        };
        let c1 = (0..=degree).map(&mut coeff).collect();
        let c2 = (0..=degree).map(&mut coeff).collect();
        Self { c1, c2 }
    }

    fn eval(c: &[C64], x: f64) -> C64 {
        let x2 = x * x;
        c.iter().rev().fold(C64::new(0.0, 0.0), |acc, v| acc * x2 + v)
    }

    pub fn state(&self, grid: Arc<RadialGrid>) -> StatePair {
        StatePair::from_fn(grid, |x| Self::eval(&self.c1, x), |x| Self::eval(&self.c2, x))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { c1: self.c1.iter().map(|c| c * s).collect(), c2: self.c2.iter().map(|c| c * s).collect() }
    }
}

/// `count` seeded samples of even degree ≤ 2·`degree`.
pub fn random_samples(seed: u64, count: usize, degree: usize, amplitude: f64, complex: bool) -> Vec<RandomSmooth> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| RandomSmooth::draw(&mut rng, degree, amplitude, complex)).collect()
}
