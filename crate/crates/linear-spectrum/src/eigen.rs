use std::sync::Arc;

use blowup_geometry::gauge_mode;
use nalgebra::{linalg::Schur, DMatrix};
use numerics_core::{RadialGrid, StatePair, C64};

use crate::{assemble_generator, OperatorMatrix, Result, SpectrumError};

/// Eigenvalue with right vector v (M v = λ v) and left vector w (wᵀ M = λ wᵀ),
/// scaled so that ‖v‖₂ = 1 and wᵀ v = 1.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub lambda: C64,
    pub right: Vec<C64>,
    pub left: Vec<C64>,
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn eigenpairs(m: &OperatorMatrix) -> Result<Vec<EigenPair>> {
    let dim = m.dim();
    if m.entries.iter().any(|v| !v.is_finite()) {
        return Err(SpectrumError::EigenFailure("non-finite matrix entry".into()));
    }
    let schur = Schur::try_new(m.entries.clone(), 1e-15, 100_000)
        .ok_or_else(|| SpectrumError::EigenFailure("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    let scale = t.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
    let tiny = f64::EPSILON * scale;
    let guard = |d: C64| if d.norm() < tiny { C64::new(tiny, 0.0) } else { d };

    let mut out = Vec::with_capacity(dim);
    for k in 0..dim {
        let lam = t[(k, k)];
        // T x = λ x, x upper part only
        let mut x = vec![C64::new(0.0, 0.0); dim];
        x[k] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = C64::new(0.0, 0.0);
            for j in i + 1..=k {
                s += t[(i, j)] * x[j];
            }
            x[i] = -s / guard(t[(i, i)] - lam);
        }
        // y T = λ y, y lower part only
        let mut y = vec![C64::new(0.0, 0.0); dim];
        y[k] = C64::new(1.0, 0.0);
        for j in k + 1..dim {
            let mut s = C64::new(0.0, 0.0);
            for i in k..j {
                s += y[i] * t[(i, j)];
            }
            y[j] = s / guard(lam - t[(j, j)]);
        }
        let right = mul(&q, &x, false);
        let left = mul(&q, &y, true);
        let nrm = right.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let right: Vec<C64> = right.iter().map(|v| v / nrm).collect();
        let wv = dot(&left, &right);
        if wv.norm() == 0.0 || !wv.is_finite() {
            return Err(SpectrumError::EigenFailure(format!("defective pair at λ = {lam}")));
        }
        let left = left.iter().map(|v| v / wv).collect();
        out.push(EigenPair { lambda: lam, right, left });
    }
    Ok(out)
}

/// Q x, or conj(Q) x when `conj` (left vectors: wᵀ = yᵀ Qᴴ).
fn mul(q: &DMatrix<C64>, x: &[C64], conj: bool) -> Vec<C64> {
    let n = q.nrows();
    (0..n)
        .map(|i| {
            let mut s = C64::new(0.0, 0.0);
            for (j, xj) in x.iter().enumerate() {
                if *xj != C64::new(0.0, 0.0) {
                    let qij = if conj { q[(i, j)].conj() } else { q[(i, j)] };
                    s += qij * xj;
                }
            }
            s
        })
        .collect()
}

/// Left eigenvector of the generator (with potential) at the eigenvalue
/// nearest 1, as a state pair scaled so that its bilinear pairing with the
/// sampled gauge mode is 1.
pub fn gauge_left_vector(grid: Arc<RadialGrid>) -> Result<(C64, StatePair)> {
    let op = assemble_generator(grid.clone(), true);
    let pairs = eigenpairs(&op)?;
    let best = pairs
        .into_iter()
        .min_by(|a, b| (a.lambda - 1.0).norm().partial_cmp(&(b.lambda - 1.0).norm()).unwrap())
        .ok_or_else(|| SpectrumError::EigenFailure("empty spectrum".into()))?;
    let g = StatePair::from_real_fn(grid.clone(), |x| gauge_mode(x).0, |x| gauge_mode(x).1);
    let wg = dot(&best.left, &g.stacked());
    let w: Vec<C64> = best.left.iter().map(|v| v / wg).collect();
    Ok((best.lambda, StatePair::from_stacked(grid, &w)?))
}
