use nalgebra::{DMatrix, DVector};
use numerics_core::{StatePair, C64};

use crate::{eigenpairs, OperatorMatrix, Result, SpectrumError};

/// Growth factor ‖u‖/‖F‖ beyond which the system is treated as singular.
const AMPLIFICATION_LIMIT: f64 = 1e9;

fn shifted(op: &OperatorMatrix, lambda: C64) -> DMatrix<C64> {
    let mut a = -op.entries.clone();
    for i in 0..op.dim() {
        a[(i, i)] += lambda;
    }
    a
}

fn max_abs(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Dense solve of (λ − M)u = F.
pub fn resolvent_solve(op: &OperatorMatrix, lambda: C64, f: &StatePair) -> Result<StatePair> {
    if !op.grid.same_as(&f.grid) {
        return Err(SpectrumError::Usage("right-hand side on a different grid".into()));
    }
    let rhs = f.stacked();
    let a = shifted(op, lambda);
    let sol = a.lu().solve(&DVector::from_column_slice(&rhs));
    let singular = match &sol {
        None => true,
        Some(u) => {
            let u = u.as_slice();
            u.iter().any(|v| !v.is_finite()) || max_abs(u) > AMPLIFICATION_LIMIT * max_abs(&rhs).max(f64::MIN_POSITIVE)
        }
    };
    if singular {
        let nearest = eigenpairs(op)?
            .into_iter()
            .map(|p| p.lambda)
            .min_by(|a, b| (a - lambda).norm().partial_cmp(&(b - lambda).norm()).unwrap())
            .unwrap_or(lambda);
        return Err(SpectrumError::ResolventSingular { nearest });
    }
    Ok(StatePair::from_stacked(op.grid.clone(), sol.unwrap().as_slice())?)
}

/// ‖(λ−M)u − F‖∞ / (‖λ−M‖∞‖u‖∞ + ‖F‖∞)
pub fn resolvent_backward_error(op: &OperatorMatrix, lambda: C64, u: &StatePair, f: &StatePair) -> f64 {
    let a = shifted(op, lambda);
    let uv = DVector::from_column_slice(&u.stacked());
    let r = &a * &uv - DVector::from_column_slice(&f.stacked());
    let anorm = (0..a.nrows())
        .map(|i| a.row(i).iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    max_abs(r.as_slice()) / (anorm * max_abs(uv.as_slice()) + max_abs(&f.stacked()))
}

/// Relative least-squares residual min‖(λ−M)v − g‖/‖g‖, with singular values
/// below `rcond`·σ_max truncated. Bounded away from zero when g is not in the
/// range of λ − M (no Jordan chain above g).
pub fn jordan_inconsistency(op: &OperatorMatrix, lambda: C64, g: &StatePair, rcond: f64) -> Result<f64> {
    let a = shifted(op, lambda);
    let rhs = DVector::from_column_slice(&g.stacked());
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let v = svd
        .solve(&rhs, rcond * smax)
        .map_err(|e| SpectrumError::EigenFailure(e.to_string()))?;
    let r = &a * v - &rhs;
    Ok(r.norm() / rhs.norm())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::assemble_generator;
    use blowup_geometry::gauge_mode;
    use numerics_core::build_grid;

    #[test]
    fn constructed_rhs_returns_gauge_multiple() {
        let grid = Arc::new(build_grid(32).unwrap());
        let op = assemble_generator(grid.clone(), true);
        let g = StatePair::from_real_fn(grid, |x| gauge_mode(x).0, |x| gauge_mode(x).1);
        let lam = C64::new(2.0, 0.0);
        let c = C64::new(0.7, -0.2);
        let mg = op.apply(&g);
        let f = StatePair::new(
            g.grid.clone(),
            g.phi1.iter().zip(&mg.phi1).map(|(a, b)| (lam * a - b) * c).collect(),
            g.phi2.iter().zip(&mg.phi2).map(|(a, b)| (lam * a - b) * c).collect(),
        )
        .unwrap();
        let u = resolvent_solve(&op, lam, &f).unwrap();
        for (a, b) in u.stacked().iter().zip(g.stacked()) {
            assert!((a - b * c).norm() < 1e-10);
        }
        assert!(resolvent_backward_error(&op, lam, &u, &f) < 1e-10);
    }

    #[test]
    fn singular_at_one() {
        let grid = Arc::new(build_grid(32).unwrap());
        let op = assemble_generator(grid.clone(), true);
        let f = StatePair::from_real_fn(grid, |x| x * x, |x| 1.0 + x * x);
        match resolvent_solve(&op, C64::new(1.0, 0.0), &f) {
            Err(SpectrumError::ResolventSingular { nearest }) => assert!((nearest - 1.0).norm() < 1e-6),
            other => panic!("expected singular, got {other:?}"),
        }
    }
}
