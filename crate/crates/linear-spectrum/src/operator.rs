use std::sync::Arc;

use nalgebra::DMatrix;
use numerics_core::{RadialGrid, StatePair, C64};

/// 48/(ρ²+2)², the linearization of the nonlinearity at the profile.
pub fn potential(rho: f64) -> f64 {
    let q = rho * rho + 2.0;
    48.0 / (q * q)
}

/// Dense 2n×2n collocation matrix of the generator acting on stacked (φ₁, φ₂).
///
/// The matrix is Π M Π where Π replaces φ₁(0) by the value that makes
/// ∂ρφ₁(0) = 0. Without it the limit row admits an origin-localized mode with
/// eigenvalue ≈ +1.4 n².
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub grid: Arc<RadialGrid>,
    pub entries: DMatrix<C64>,
    pub includes_potential: bool,
}

pub fn assemble_generator(grid: Arc<RadialGrid>, include_potential: bool) -> OperatorMatrix {
    let n = grid.n;
    let lap = grid.radial_laplacian_matrix(5.0);
    let mut m = DMatrix::<C64>::zeros(2 * n, 2 * n);
    let re = |v: f64| C64::new(v, 0.0);
    for i in 0..n {
        let x = grid.nodes[i];
        for j in 0..n {
            let transport = -x * grid.d1[(i, j)];
            m[(i, j)] = re(transport);
            m[(n + i, j)] = re(lap[(i, j)]);
            m[(n + i, n + j)] = re(transport);
        }
        m[(i, i)] -= 1.0;
        m[(i, n + i)] = re(1.0);
        m[(n + i, n + i)] -= 2.0;
        if include_potential {
            m[(n + i, i)] += potential(x);
        }
    }
    let reg = grid.regularity_row();
    // right factor: column 0 of φ₁ redistributed onto the other φ₁ columns
    for i in 0..2 * n {
        let c0 = m[(i, 0)];
        m[(i, 0)] = C64::new(0.0, 0.0);
        for j in 1..n {
            m[(i, j)] += c0 * reg[j];
        }
    }
    // left factor: row 0 of φ₁ becomes the regularity combination of rows
    for j in 0..2 * n {
        let mut acc = C64::new(0.0, 0.0);
        for i in 1..n {
            acc += m[(i, j)] * reg[i];
        }
        m[(0, j)] = acc;
    }
    OperatorMatrix { grid, entries: m, includes_potential: include_potential }
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn apply_vec(&self, v: &[C64]) -> Vec<C64> {
        let x = nalgebra::DVector::from_column_slice(v);
        (&self.entries * x).as_slice().to_vec()
    }

    pub fn apply(&self, u: &StatePair) -> StatePair {
        let out = self.apply_vec(&u.stacked());
        let n = self.grid.n;
        StatePair { grid: self.grid.clone(), phi1: out[..n].to_vec(), phi2: out[n..].to_vec() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use blowup_geometry::gauge_mode;
    use numerics_core::build_grid;

    #[test]
    fn constants_map_to_zero_minus_two() {
        let g = Arc::new(build_grid(24).unwrap());
        let op = assemble_generator(g.clone(), false);
        let out = op.apply(&StatePair::from_real_fn(g, |_| 1.0, |_| 1.0));
        for i in 1..23 {
            assert!(out.phi1[i].norm() < 1e-10);
            assert!((out.phi2[i] + 2.0).norm() < 1e-10);
        }
    }

    #[test]
    fn gauge_eigenrelation() {
        let g = Arc::new(build_grid(64).unwrap());
        let op = assemble_generator(g.clone(), true);
        let u = StatePair::from_real_fn(g, |x| gauge_mode(x).0, |x| gauge_mode(x).1);
        let out = op.apply(&u);
        let err = out
            .stacked()
            .iter()
            .zip(u.stacked())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn potential_only_changes_lower_left_block() {
        let g = Arc::new(build_grid(16).unwrap());
        let a = assemble_generator(g.clone(), false);
        let b = assemble_generator(g.clone(), true);
        let diff = &b.entries - &a.entries;
        for i in 0..32usize {
            for j in 0..32 {
                // diag(V) composed with the regularity projection on φ₁
                let reg = g.regularity_row();
                let expect = match (i.checked_sub(16), j < 16) {
                    (Some(0), true) => potential(0.0) * reg[j],
                    (Some(k), true) if k == j => potential(g.nodes[j]),
                    _ => 0.0,
                };
                let tol = 1e-14 * (1.0 + a.entries[(i, j)].norm());
                assert!((diff[(i, j)].re - expect).abs() < tol && diff[(i, j)].im == 0.0);
            }
        }
        assert_eq!(potential(0.0), 12.0);
        assert!((potential(1.0) - 16.0 / 3.0).abs() < 1e-15);
    }
}
