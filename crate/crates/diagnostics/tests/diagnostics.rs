use std::sync::Arc;

use blowup_geometry::{BlowupParam, CorotationalData};
use cone_evolution::{evolve, ConeTrajectory, Mode};
use diagnostics::*;
use numerics_core::{build_grid, htilde_inner, StatePair, C64};
use proptest::prelude::*;

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn small_trajectory(n: usize, amp: f64, tau_max: f64) -> ConeTrajectory {
    let g = Arc::new(build_grid(n).unwrap());
    let phi = StatePair::from_real_fn(g, |x| amp * (1.0 - x * x).powi(2), |x| amp * x * x);
    evolve(&phi, tau_max, 0.5 / (n * n) as f64, Mode::Nonlinear).unwrap()
}

#[test]
fn dissipativity_on_random_states() {
    let g = Arc::new(build_grid(32).unwrap());
    let mut worst = f64::NEG_INFINITY;
    for s in random_samples(11, 100, 6, 1.0, true) {
        let u = s.state(g.clone());
        let v = dissipativity_check(&u).unwrap();
        let norm = htilde_inner(&u, &u).unwrap().re;
        worst = worst.max(v / norm);
    }
    eprintln!("max Re(Lu,u)/(u,u) = {worst:e}");
    assert!(worst <= 1e-8);
}

#[test]
fn norm_equivalence_interval() {
    let samples = random_samples(12, 100, 6, 1.0, true);
    let r = norm_equivalence_report(&samples, 32, 48).unwrap();
    eprintln!("H~/H in [{}, {}], refinement change {:e}", r.min, r.max, r.refinement_change);
    assert_eq!(r.ratios_coarse.len(), 100);
    assert!(r.min > 0.1 && r.max < 10.0);
    assert!(r.refinement_change <= 0.05);
}

#[test]
fn nonlinearity_constants_are_refinement_stable() {
    let samples = random_samples(13, 200, 5, 1.0, false);
    let amps = [0.05, 0.2, 0.5];
    let build = |n: usize| {
        let g = Arc::new(build_grid(n).unwrap());
        samples
            .chunks(2)
            .enumerate()
            .map(|(k, p)| {
                let a = amps[k % 3];
                (p[0].scaled(a).state(g.clone()), p[1].scaled(a).state(g.clone()))
            })
            .collect::<Vec<_>>()
    };
    let c = nonlinearity_bound_report(&build(32)).unwrap();
    let f = nonlinearity_bound_report(&build(48)).unwrap();
    eprintln!(
        "growth C = {} / {}, lipschitz C = {} / {}, scaling variation {:e}",
        c.growth_constant, f.growth_constant, c.lipschitz_constant, f.lipschitz_constant, c.scaling_variation
    );
    assert_eq!(c.growth_ratios.len(), 200);
    assert!((f.growth_constant / c.growth_constant - 1.0).abs() <= 0.05);
    assert!((f.lipschitz_constant / c.lipschitz_constant - 1.0).abs() <= 0.05);
    assert!(c.scaling_variation <= 0.1);
}

#[test]
fn nonlinearity_ratio_for_rho_squared() {
    let ratio = |n: usize| {
        let g = Arc::new(build_grid(n).unwrap());
        let u = StatePair::from_real_fn(g, |x| x * x, |_| 0.0);
        let r = nonlinearity_bound_report(&[(u.clone(), u.scale(C64::new(0.5, 0.0)))]).unwrap();
        r.growth_ratios[0]
    };
    let (a, b) = (ratio(32), ratio(48));
    eprintln!("rho^2 growth ratio {a} / {b}");
    assert!(a.is_finite() && (b / a - 1.0).abs() <= 0.05);
}

#[test]
fn profile_snapshot_scaling_and_divergence() {
    let f = ProfileField { t: BlowupParam { t: 1.0 } };
    let spec = ConeNormSpec::zeroth(Difference::Chord);
    let ts: Vec<f64> = (0..12).map(|k| 1.0 - 0.5f64.powi(k)).collect();
    let snaps: Vec<f64> = ts.iter().map(|&t| cone_snapshot(&f, ConeReference::Center, &spec, t, 1.0).unwrap()).collect();
    let scaled: Vec<f64> = snaps.iter().zip(&ts).map(|(v, t)| v * (1.0 - t).sqrt()).collect();
    let (lo, hi) = scaled.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    let e = slope(&ts.iter().map(|t| (1.0 - t).ln()).collect::<Vec<_>>(), &snaps.iter().map(|v| v.ln()).collect::<Vec<_>>());
    eprintln!("snapshot·(T−t)^(1/2) in [{lo}, {hi}], exponent {e}");
    assert!(hi / lo - 1.0 <= 0.02);
    assert!((e + 0.5).abs() <= 0.02);

    let eps = [1e-1, 1e-2, 1e-3, 1e-4];
    let vals: Vec<f64> = eps
        .iter()
        .map(|&e| weighted_cone_norm(&f, ConeReference::Center, 1.0, &spec, e, &TimeRule::default()).unwrap())
        .collect();
    let x: Vec<f64> = eps.iter().map(|e| (1.0 / e).ln().ln()).collect();
    let y: Vec<f64> = vals.iter().map(|v| v.ln()).collect();
    let s = slope(&x, &y);
    eprintln!("divergence values {vals:?}, slope {s}");
    assert!((s - 1.0).abs() <= 0.05);
}

#[test]
fn lifted_trajectory_matches_similarity_strichartz() {
    let traj = small_trajectory(24, 1e-3, 2.0);
    let big_t = traj.t.t;
    let ts: Vec<f64> = traj.taus.iter().map(|tau| big_t * -(-tau).exp_m1()).collect();
    let eps = big_t - ts.last().unwrap();
    let lifted = LiftedTrajectory { traj: &traj };
    let reference = ProfileField { t: traj.t };
    let spec = ConeNormSpec::zeroth(Difference::Angle);
    let cone =
        weighted_cone_norm(&lifted, ConeReference::Field(&reference), big_t, &spec, eps, &TimeRule::Stamps(ts))
            .unwrap();
    let s = strichartz_norm(&traj, 2.0, 12.0, 0).unwrap();
    eprintln!("cone {cone:e} vs S^2 {:e}", s * s);
    assert!((cone / (s * s) - 1.0).abs() <= 1e-6);
}

#[test]
fn norm_comparison_refinement_and_interval() {
    let ratio = |n: usize| {
        let g = Arc::new(build_grid(n).unwrap());
        let d = CorotationalData::from_fn(g, 0.1, |r| 1.0 / (2.0 + r * r), |_| 0.0).unwrap();
        norm_comparison_4d_6d(&d).unwrap().ratio.unwrap()
    };
    let (a, b) = (ratio(32), ratio(48));
    eprintln!("4d/6d ratio {a} / {b}");
    assert!((b / a - 1.0).abs() <= 0.05);

    let g = Arc::new(build_grid(32).unwrap());
    let mut range = (f64::INFINITY, 0.0f64);
    for s in random_samples(14, 50, 5, 0.5, false) {
        let r = 1.1f64;
        let st = s.state(g.clone());
        let f: Vec<f64> = st.phi1.iter().map(|v| v.re).collect();
        let d = CorotationalData::new(g.clone(), r - 1.0, f, vec![0.0; 32]).unwrap();
        let c = norm_comparison_4d_6d(&d).unwrap().ratio.unwrap();
        range = (range.0.min(c), range.1.max(c));
    }
    eprintln!("4d/6d ratio interval [{}, {}]", range.0, range.1);
    assert!(range.0 > 0.5 && range.1 < 20.0);
}

#[test]
fn delta_scaling_spread() {
    let g = Arc::new(build_grid(32).unwrap());
    let opts = ScalingOptions::default();
    let bump =
        gauge_free_bump(g, 1.0 + opts.data_delta, opts.modulation.n, |r| (-4.0 * r * r).exp(), |r| r * r * (-4.0 * r * r).exp())
            .unwrap();
    let rep = delta_scaling_experiment(&bump, &[1e-2, 5e-3, 2.5e-3], &opts).unwrap();
    eprintln!("{}", rep.to_json());
    assert!(rep.all_converged());
    assert!(rep.spread_2_12.unwrap() - 1.0 <= 0.25);
    assert!(rep.spread_2_4_1.unwrap() - 1.0 <= 0.25);
}

#[test]
fn gauge_bump_rejected() {
    let g = Arc::new(build_grid(32).unwrap());
    let opts = ScalingOptions::default();
    let r = 1.0 + opts.data_delta;
    let bump = StatePair::from_real_fn(
        g,
        |x| blowup_geometry::gauge_mode(r * x).0,
        |x| blowup_geometry::gauge_mode(r * x).1,
    );
    assert!(matches!(
        delta_scaling_experiment(&bump, &[1e-2], &opts),
        Err(DiagnosticsError::Precondition(_))
    ));
    assert!(matches!(delta_scaling_experiment(&bump, &[1e-2, 2e-2], &opts), Err(DiagnosticsError::Config(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn norms_are_homogeneous(c in -5.0f64..5.0, seed in 0u64..1000) {
        let g = Arc::new(build_grid(16).unwrap());
        let s = random_samples(seed, 1, 4, 1.0, true).remove(0);
        let base = s.state(g.clone());
        let taus: Vec<f64> = (0..8).map(|k| k as f64 * 0.1).collect();
        let mk = |st: &StatePair| ConeTrajectory {
            t: BlowupParam { t: 1.0 },
            taus: taus.clone(),
            states: taus.iter().map(|t| st.scale(C64::new((-t).exp(), 0.0))).collect(),
            dt: 0.1,
            mode: Mode::Free,
        };
        let (a, b) = (mk(&base), mk(&base.scale(C64::new(c, 0.0))));
        for (field, p, q) in [(Field::Phi1, 2.0, 12.0), (Field::Phi1, f64::INFINITY, 6.0), (Field::DPhi1, 2.0, 4.0), (Field::Phi2, 2.0, 4.0)] {
            let (x, y) = (strichartz_field(&a, field, p, q).unwrap(), strichartz_field(&b, field, p, q).unwrap());
            prop_assert!((y - c.abs() * x).abs() <= 1e-12 * (1.0 + y.abs()));
        }
        let f: Vec<f64> = base.phi1.iter().map(|v| v.re * 0.2).collect();
        let d1 = CorotationalData::new(g.clone(), 0.1, f.clone(), vec![0.0; 16]).unwrap();
        let d2 = CorotationalData::new(g.clone(), 0.1, f.iter().map(|v| v * c * 0.2).collect(), vec![0.0; 16]).unwrap();
        let (n1, n2) = (norm_comparison_4d_6d(&d1).unwrap(), norm_comparison_4d_6d(&d2).unwrap());
        prop_assert!((n2.norm_6d - (0.2 * c).abs() * n1.norm_6d).abs() <= 1e-12 * (1.0 + n2.norm_6d));
        prop_assert!((n2.norm_4d - (0.2 * c).abs() * n1.norm_4d).abs() <= 1e-12 * (1.0 + n2.norm_4d));
    }

    #[test]
    fn dissipativity_never_positive(seed in 0u64..10_000) {
        let g = Arc::new(build_grid(24).unwrap());
        let u = random_samples(seed, 1, 5, 1.0, true).remove(0).state(g);
        let v = dissipativity_check(&u).unwrap();
        prop_assert!(v <= 1e-8 * htilde_inner(&u, &u).unwrap().re);
    }
}
