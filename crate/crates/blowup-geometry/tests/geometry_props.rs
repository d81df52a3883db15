use std::sync::Arc;

use blowup_geometry::*;
use numerics_core::build_grid;
use proptest::prelude::*;

fn poly(c: &[f64], r: f64) -> f64 {
    c.iter().enumerate().map(|(k, a)| a * (r * r).powi(k as i32)).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn lift_reduce_round_trip(
        cf in prop::collection::vec(-0.2f64..0.2, 5),
        cg in prop::collection::vec(-1.0f64..1.0, 5),
    ) {
        let grid = Arc::new(build_grid(32).unwrap());
        let d = CorotationalData::from_fn(grid, 0.1, |r| poly(&cf, r), |r| poly(&cg, r)).unwrap();
        let s = lift_corotational(&d).unwrap();
        let (n_def, t_def) = s.invariant_defects();
        prop_assert!(n_def <= 1e-12 && t_def <= 1e-12);
        let back = reduce_corotational(&s).unwrap();
        for i in 0..d.f.len() {
            prop_assert!((back.f[i] - d.f[i]).abs() <= 1e-12, "f at {}: {}", i, back.f[i] - d.f[i]);
            prop_assert!((back.g[i] - d.g[i]).abs() <= 1e-12, "g at {}: {}", i, back.g[i] - d.g[i]);
        }
    }

    #[test]
    fn cone_round_trip(t in 0.0f64..0.99, frac in 0.0f64..1.0, big in 0.5f64..1.5) {
        let bp = BlowupParam::new(big).unwrap();
        let t = t * big;
        let r = frac * (big - t);
        let (tau, rho) = to_similarity(t, r, bp).unwrap();
        let (t2, r2) = from_similarity(tau, rho, bp);
        prop_assert!((t2 - t).abs() <= 1e-14 && (r2 - r).abs() <= 1e-14);
    }

    #[test]
    fn family_scaling(t in 0.0f64..0.9, r in 0.0f64..3.0, lam in 0.5f64..1.5) {
        let one = BlowupParam::new(1.0).unwrap();
        let scaled = BlowupParam::new(lam).unwrap();
        let (a, _) = profile_physical(t, r, one).unwrap();
        let (b, _) = profile_physical(lam * t, lam * r, scaled).unwrap();
        prop_assert!((b - a / lam).abs() <= 1e-14 * a.abs().max(1.0));
    }
}
