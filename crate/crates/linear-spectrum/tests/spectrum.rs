use std::sync::Arc;

use blowup_geometry::gauge_mode;
use linear_spectrum::*;
use numerics_core::{build_grid, StatePair, C64};

fn report(n: usize, pot: bool) -> (SpectrumReport, Vec<EigenPair>) {
    let cg = Arc::new(build_grid(n).unwrap());
    let fg = Arc::new(build_grid(2 * n).unwrap());
    let coarse = eigenpairs(&assemble_generator(cg.clone(), pot)).unwrap();
    let fine = eigenpairs(&assemble_generator(fg.clone(), pot)).unwrap();
    let rep = filter_physical(&cg, &coarse, &fg, &fine, pot, FilterConfig::default()).unwrap();
    (rep, coarse)
}

#[test]
fn single_unstable_eigenvalue() {
    for n in [48, 64] {
        let (rep, _) = report(n, true);
        let kept = rep.persistent_eigenvalues();
        eprintln!("n={n} persistent: {kept:?}");
        let unstable: Vec<C64> = kept.iter().copied().filter(|z| z.re > 0.05).collect();
        assert_eq!(unstable.len(), 1);
        assert!((unstable[0] - 1.0).norm() <= 1e-6);
    }
}

#[test]
fn free_operator_has_no_growing_mode() {
    let (rep, _) = report(48, false);
    eprintln!("free persistent: {:?}", rep.persistent_eigenvalues());
    assert!(rep.persistent_eigenvalues().iter().all(|z| z.re <= 0.05));
}

#[test]
fn persistent_pairs_are_biorthogonal() {
    let (rep, pairs) = report(48, true);
    let kept: Vec<&EigenPair> =
        pairs.iter().zip(&rep.persistent).filter(|(_, p)| **p).map(|(e, _)| e).collect();
    for (i, a) in kept.iter().enumerate() {
        for (j, b) in kept.iter().enumerate() {
            let d: C64 = a.left.iter().zip(&b.right).map(|(x, y)| x * y).sum();
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!((d - expect).norm() <= 1e-8, "{i} {j} {d}");
        }
    }
}

#[test]
fn gauge_has_no_jordan_partner() {
    let grid = Arc::new(build_grid(48).unwrap());
    let op = assemble_generator(grid.clone(), true);
    let g = StatePair::from_real_fn(grid, |x| gauge_mode(x).0, |x| gauge_mode(x).1);
    let r = jordan_inconsistency(&op, C64::new(1.0, 0.0), &g, 1e-9).unwrap();
    eprintln!("jordan residual {r}");
    assert!(r >= 1e-3);
}

#[test]
fn gauge_representer_projects_gauge_to_one() {
    let grid = Arc::new(build_grid(32).unwrap());
    let (lam, w) = gauge_left_vector(grid.clone()).unwrap();
    assert!((lam - 1.0).norm() < 1e-6);
    let g = StatePair::from_real_fn(grid, |x| gauge_mode(x).0, |x| gauge_mode(x).1);
    let a: C64 = w.stacked().iter().zip(g.stacked()).map(|(x, y)| x * y).sum();
    assert!((a - 1.0).norm() < 1e-12);
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    fn data(g: Arc<numerics_core::RadialGrid>, a: [f64; 4]) -> StatePair {
        StatePair::from_fn(
            g,
            move |x| C64::new(a[0] + a[1] * x * x, a[2] * (x * x).sin()),
            move |x| C64::new(a[3] * (-x * x).exp(), a[0] * x.powi(4)),
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn resolvent_is_backward_stable(re in 0.1f64..0.45, im in -20.0f64..20.0,
                                         a in proptest::array::uniform4(-2.0f64..2.0)) {
            let g = Arc::new(build_grid(24).unwrap());
            let op = assemble_generator(g.clone(), true);
            let lam = C64::new(re, im);
            let f = data(g, a);
            let u = resolvent_solve(&op, lam, &f).unwrap();
            prop_assert!(resolvent_backward_error(&op, lam, &u, &f) <= 1e-12);
        }

        #[test]
        fn generator_is_linear(s in -3.0f64..3.0, t in -3.0f64..3.0,
                               a in proptest::array::uniform4(-2.0f64..2.0),
                               b in proptest::array::uniform4(-2.0f64..2.0)) {
            let g = Arc::new(build_grid(16).unwrap());
            let op = assemble_generator(g.clone(), true);
            let (u, v) = (data(g.clone(), a), data(g, b));
            let (cs, ct) = (C64::new(s, 0.0), C64::new(t, 0.0));
            let lhs = op.apply(&u.scale(cs).axpy(ct, &v));
            let rhs = op.apply(&u).scale(cs).axpy(ct, &op.apply(&v));
            let scale = 1.0 + op.apply(&u).max_norm() * s.abs() + op.apply(&v).max_norm() * t.abs();
            prop_assert!(lhs.axpy(C64::new(-1.0, 0.0), &rhs).max_norm() <= 1e-12 * scale);
        }
    }
}
