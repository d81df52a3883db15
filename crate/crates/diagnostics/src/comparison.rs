use numerics_core::{sobolev_norm, SobolevSpec, C64};
use blowup_geometry::CorotationalData;
use serde::Serialize;

use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormComparison {
    pub radius: f64,
    /// ‖|·|f‖_{H²(B⁴_R)}
    pub norm_4d: f64,
    /// ‖f‖_{H²(B⁶_R)}
    pub norm_6d: f64,
    /// norm_4d / norm_6d, absent for f = 0
    pub ratio: Option<f64>,
}

/// The 4D norm of the corotational angle r·f against the 6D norm of f on the
/// data ball.
pub fn norm_comparison_4d_6d(data: &CorotationalData) -> Result<NormComparison> {
    data.check_range()?;
    let g = &data.grid;
    let f: Vec<C64> = data.f.iter().map(|&v| C64::new(v, 0.0)).collect();
    let h: Vec<C64> = f.iter().zip(&g.nodes).map(|(v, x)| v * (x * data.radius)).collect();
    let norm_4d = sobolev_norm(&h, SobolevSpec::new(2, 4, data.radius)?, g);
    let norm_6d = sobolev_norm(&f, SobolevSpec::new(2, 6, data.radius)?, g);
    let ratio = (norm_6d > 0.0).then(|| norm_4d / norm_6d);
    Ok(NormComparison { radius: data.radius, norm_4d, norm_6d, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use numerics_core::build_grid;
    use std::sync::Arc;

    #[test]
    fn zero_data() {
        let g = Arc::new(build_grid(16).unwrap());
        let d = CorotationalData::from_fn(g, 0.1, |_| 0.0, |_| 0.0).unwrap();
        let c = norm_comparison_4d_6d(&d).unwrap();
        assert_eq!((c.norm_4d, c.norm_6d, c.ratio), (0.0, 0.0, None));
    }

    #[test]
    fn constant_data_closed_form() {
        let r: f64 = 1.1;
        let g = Arc::new(build_grid(24).unwrap());
        let d = CorotationalData::from_fn(g, r - 1.0, |_| 1.0, |_| 0.0).unwrap();
        let c = norm_comparison_4d_6d(&d).unwrap();
        // 4D: ∫r²r³ + ∫1·r³ + ∫(3/r)²r³ = R⁶/6 + R⁴/4 + 9R²/2
        let n4 = (r.powi(6) / 6.0 + r.powi(4) / 4.0 + 4.5 * r * r).sqrt();
        // 6D: ∫r⁵ = R⁶/6
        let n6 = (r.powi(6) / 6.0).sqrt();
        assert!((c.norm_4d - n4).abs() < 1e-12 * n4, "{} {}", c.norm_4d, n4);
        assert!((c.norm_6d - n6).abs() < 1e-12 * n6);
    }
}
