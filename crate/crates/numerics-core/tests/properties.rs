use std::sync::Arc;

use numerics_core::{
    build_grid, cyl_bessel, h_norm, htilde_inner, sobolev_norm, BesselKind, SobolevSpec, StatePair, C64,
};
use proptest::prelude::*;

fn g1(x: f64) -> f64 {
    1.0 / (2.0 + x * x)
}

fn g2(x: f64) -> f64 {
    4.0 / ((2.0 + x * x) * (2.0 + x * x))
}

#[test]
fn gauge_mode_norms_match_quadrature_oracle() {
    // oracle: mpmath.quad with mpmath.diff at 30 digits
    let g = Arc::new(build_grid(40).unwrap());
    let f: Vec<C64> = g.nodes.iter().map(|&x| C64::new(g1(x), 0.0)).collect();
    let v = sobolev_norm(&f, SobolevSpec::new(2, 6, 1.0).unwrap(), &g);
    assert!((v - 0.583_377_423_377_864_26).abs() < 1e-8);

    let u = StatePair::from_real_fn(g, g1, g2);
    let h = htilde_inner(&u, &u).unwrap();
    assert!(h.im.abs() < 1e-14);
    assert!((h.re - 0.578_600_823_045_267_47).abs() < 1e-8);
}

fn poly_state(coef: &[(f64, f64)], n: usize) -> StatePair {
    let g = Arc::new(build_grid(n).unwrap());
    let half = coef.len() / 2;
    let (a, b) = coef.split_at(half);
    let eval = |c: &[(f64, f64)], x: f64| {
        c.iter().enumerate().fold(C64::new(0.0, 0.0), |acc, (k, &(re, im))| {
            acc + C64::new(re, im) * (x * x).powi(k as i32)
        })
    };
    StatePair::from_fn(g, |x| eval(a, x), |x| eval(b, x))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn htilde_conjugate_symmetric_and_positive(
        a in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8),
        b in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8),
    ) {
        let u = poly_state(&a, 24);
        let v = poly_state(&b, 24);
        let uv = htilde_inner(&u, &v).unwrap();
        let vu = htilde_inner(&v, &u).unwrap();
        prop_assert!((uv - vu.conj()).norm() <= 1e-12 * (1.0 + uv.norm()));
        let uu = htilde_inner(&u, &u).unwrap();
        prop_assert!(uu.re >= 0.0 && uu.im.abs() <= 1e-12 * (1.0 + uu.re));
    }

    #[test]
    fn norms_are_homogeneous(
        a in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8),
        s in -5.0f64..5.0,
    ) {
        let u = poly_state(&a, 24);
        let su = u.scale(C64::new(s, 0.0));
        prop_assert!((h_norm(&su) - s.abs() * h_norm(&u)).abs() <= 1e-12 * (1.0 + h_norm(&su)));
    }

    #[test]
    fn hankel_is_j_plus_iy(re in -90.0f64..90.0, im in 0.0f64..5.0) {
        let z = C64::new(re, im);
        prop_assume!(z.norm() > 1e-3);
        let j = cyl_bessel(BesselKind::J2, z).unwrap();
        let y = cyl_bessel(BesselKind::Y2, z).unwrap();
        let h = cyl_bessel(BesselKind::H1_2, z).unwrap();
        prop_assert!((h - j - C64::i() * y).norm() <= 1e-12 * j.norm().max(y.norm()));
    }

    #[test]
    fn bessel_wronskian(re in -60.0f64..60.0, im in 0.0f64..4.0) {
        let z = C64::new(re, im);
        prop_assume!(z.norm() > 0.3);
        let j = cyl_bessel(BesselKind::J2, z).unwrap();
        let y = cyl_bessel(BesselKind::Y2, z).unwrap();
        let jp = numerics_core::cyl_bessel_deriv(BesselKind::J2, z).unwrap();
        let yp = numerics_core::cyl_bessel_deriv(BesselKind::Y2, z).unwrap();
        let w = (j * yp - y * jp) * z;
        let scale = (j.norm() * yp.norm()).max(y.norm() * jp.norm()) * z.norm();
        prop_assert!((w - 2.0 / std::f64::consts::PI).norm() <= 1e-10 * scale.max(1.0));
    }
}
