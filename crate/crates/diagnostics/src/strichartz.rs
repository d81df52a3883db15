use std::io::Write;

use cone_evolution::ConeTrajectory;
use numerics_core::quadrature::RadialWeightRule;
use numerics_core::{RadialGrid, C64};
use serde::Serialize;

use crate::{DiagnosticsError, Result};

/// The zeroth-order pairs used by the lab, all with 1/p + 6/q = 1.
pub const ZEROTH_ORDER_PAIRS: [(f64, f64); 5] =
    [(2.0, 12.0), (3.0, 9.0), (4.0, 8.0), (6.0, 36.0 / 5.0), (f64::INFINITY, 6.0)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Phi1,
    /// ∂ρ φ₁
    DPhi1,
    Phi2,
}

impl Field {
    pub fn name(&self) -> &'static str {
        match self {
            Field::Phi1 => "phi1",
            Field::DPhi1 => "dphi1",
            Field::Phi2 => "phi2",
        }
    }

    pub fn order(&self) -> u8 {
        match self {
            Field::DPhi1 => 1,
            _ => 0,
        }
    }
}

pub fn check_admissible(p: f64, q: f64, field: Field) -> Result<()> {
    let ok = match field {
        Field::Phi1 => {
            p >= 2.0 && (6.0..=12.0).contains(&q) && (1.0 / p + 6.0 / q - 1.0).abs() <= 1e-12
        }
        Field::DPhi1 | Field::Phi2 => p == 2.0 && q == 4.0,
    };
    if ok {
        Ok(())
    } else {
        Err(DiagnosticsError::Config(format!("(p, q) = ({p}, {q}) is not admissible for {}", field.name())))
    }
}

/// L^q(B⁶₁) norms with the radial weight ρ⁵, by Gauss–Jacobi quadrature on
/// the spectral interpolant.
#[derive(Debug, Clone)]
pub struct LqRule {
    rule: RadialWeightRule,
}

impl LqRule {
    pub fn new(grid: &RadialGrid) -> Result<Self> {
        let m = (8 * grid.n).max(64);
        Ok(Self { rule: RadialWeightRule::new(grid, 5, m)? })
    }

    pub fn norm(&self, f: &[C64], q: f64) -> f64 {
        self.rule.integrate_abs_pow(f, q).powf(1.0 / q)
    }

    /// Several exponents from one interpolation.
    pub fn norms(&self, f: &[C64], qs: &[f64]) -> Vec<f64> {
        let v = self.rule.values(f);
        qs.iter()
            .map(|&q| v.iter().zip(&self.rule.weights).map(|(x, w)| w * x.norm().powf(q)).sum::<f64>().powf(1.0 / q))
            .collect()
    }
}

fn field_samples(traj: &ConeTrajectory, k: usize, field: Field) -> Vec<C64> {
    let s = &traj.states[k];
    match field {
        Field::Phi1 => s.phi1.clone(),
        Field::DPhi1 => s.grid.diff1(&s.phi1),
        Field::Phi2 => s.phi2.clone(),
    }
}

/// ‖field(τ_k)‖_{L^q(B⁶₁)} at every stamp.
pub fn spatial_trace(traj: &ConeTrajectory, field: Field, q: f64) -> Result<Vec<f64>> {
    let rule = LqRule::new(&traj.states[0].grid)?;
    Ok((0..traj.states.len()).map(|k| rule.norm(&field_samples(traj, k, field), q)).collect())
}

fn time_norm(taus: &[f64], vals: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return vals.iter().copied().fold(0.0, f64::max);
    }
    let mut acc = 0.0;
    for k in 1..taus.len() {
        acc += 0.5 * (taus[k] - taus[k - 1]) * (vals[k].powf(p) + vals[k - 1].powf(p));
    }
    acc.powf(1.0 / p)
}

/// ‖field‖_{L^p_τ L^q(B⁶₁)} over the stamps of the trajectory.
pub fn strichartz_field(traj: &ConeTrajectory, field: Field, p: f64, q: f64) -> Result<f64> {
    check_admissible(p, q, field)?;
    let trace = spatial_trace(traj, field, q)?;
    Ok(time_norm(&traj.taus, &trace, p))
}

/// Order 0 measures φ₁, order 1 measures ∂ρ φ₁.
pub fn strichartz_norm(traj: &ConeTrajectory, p: f64, q: f64, order: u8) -> Result<f64> {
    let field = match order {
        0 => Field::Phi1,
        1 => Field::DPhi1,
        _ => return Err(DiagnosticsError::Config(format!("derivative order {order} not supported"))),
    };
    strichartz_field(traj, field, p, q)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormEntry {
    /// `None` stands for p = ∞.
    pub p: Option<f64>,
    pub q: f64,
    pub order: u8,
    pub field: Field,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormReport {
    pub pairs: Vec<NormEntry>,
    pub trajectory_id: String,
    pub tau_window: (f64, f64),
    pub notes: Vec<String>,
}

impl NormReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

fn standard_pairs() -> Vec<(Field, f64, f64)> {
    let mut out: Vec<_> = ZEROTH_ORDER_PAIRS.iter().map(|&(p, q)| (Field::Phi1, p, q)).collect();
    out.push((Field::DPhi1, 2.0, 4.0));
    out.push((Field::Phi2, 2.0, 4.0));
    out
}

/// Every zeroth-order pair plus L²Ẇ^{1,4} and the second-component L²L⁴.
pub fn norm_report(traj: &ConeTrajectory, trajectory_id: &str) -> Result<NormReport> {
    let pairs = standard_pairs()
        .into_iter()
        .map(|(field, p, q)| {
            Ok(NormEntry {
                p: p.is_finite().then_some(p),
                q,
                order: field.order(),
                field,
                value: strichartz_field(traj, field, p, q)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let n = traj.states[0].n();
    Ok(NormReport {
        pairs,
        trajectory_id: trajectory_id.to_string(),
        tau_window: (traj.taus[0], traj.tau_max()),
        notes: vec![format!("n = {n}, {} stamps, mode {}", traj.taus.len(), traj.mode.name())],
    })
}

/// Per-stamp spatial norms, one row per τ.
pub fn write_norm_trace_csv<W: Write>(traj: &ConeTrajectory, mut w: W) -> std::io::Result<()> {
    let to_io = |e: DiagnosticsError| std::io::Error::other(e.to_string());
    let rule = LqRule::new(&traj.states[0].grid).map_err(to_io)?;
    let qs = [12.0, 9.0, 8.0, 36.0 / 5.0, 6.0];
    writeln!(w, "tau,phi1_l12,phi1_l9,phi1_l8,phi1_l36_5,phi1_l6,dphi1_l4,phi2_l4")?;
    for (k, tau) in traj.taus.iter().enumerate() {
        let z = rule.norms(&field_samples(traj, k, Field::Phi1), &qs);
        let d = rule.norm(&field_samples(traj, k, Field::DPhi1), 4.0);
        let s = rule.norm(&field_samples(traj, k, Field::Phi2), 4.0);
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            tau, z[0], z[1], z[2], z[3], z[4], d, s
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use blowup_geometry::BlowupParam;
    use cone_evolution::Mode;
    use numerics_core::{build_grid, StatePair};
    use std::sync::Arc;

    fn constant_trajectory(c: f64, n: usize) -> ConeTrajectory {
        let grid = Arc::new(build_grid(n).unwrap());
        let taus: Vec<f64> = (0..=20).map(|k| k as f64 * 0.05).collect();
        let states = taus.iter().map(|_| StatePair::from_real_fn(grid.clone(), |_| c, |_| c)).collect();
        ConeTrajectory { t: BlowupParam { t: 1.0 }, taus, states, dt: 0.05, mode: Mode::Free }
    }

    #[test]
    fn admissibility_gate() {
        for &(p, q) in &ZEROTH_ORDER_PAIRS {
            check_admissible(p, q, Field::Phi1).unwrap();
        }
        assert!(check_admissible(2.0, 10.0, Field::Phi1).is_err());
        assert!(check_admissible(1.0, f64::INFINITY, Field::Phi1).is_err());
        check_admissible(2.0, 4.0, Field::DPhi1).unwrap();
        check_admissible(2.0, 4.0, Field::Phi2).unwrap();
        assert!(check_admissible(2.0, 12.0, Field::DPhi1).is_err());
        assert!(check_admissible(3.0, 4.0, Field::Phi2).is_err());
    }

    #[test]
    fn constant_field_sup_norm() {
        let traj = constant_trajectory(1.0, 16);
        let v = strichartz_norm(&traj, f64::INFINITY, 6.0, 0).unwrap();
        assert!((v - 6f64.powf(-1.0 / 6.0)).abs() < 1e-13, "{v}");
        let v = strichartz_norm(&traj, 2.0, 12.0, 0).unwrap();
        assert!((v - 6f64.powf(-1.0 / 12.0)).abs() < 1e-13, "{v}");
        assert!(strichartz_norm(&traj, 2.0, 4.0, 1).unwrap() < 1e-12);
    }

    #[test]
    fn zero_trajectory() {
        let traj = constant_trajectory(0.0, 16);
        let r = norm_report(&traj, "zero").unwrap();
        assert_eq!(r.pairs.len(), 7);
        assert!(r.pairs.iter().all(|e| e.value == 0.0));
        assert!(r.to_json()["pairs"][4]["p"].is_null());
    }

    #[test]
    fn trace_csv_rows() {
        let traj = constant_trajectory(1.0, 16);
        let mut buf = Vec::new();
        write_norm_trace_csv(&traj, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 22);
        assert_eq!(text.lines().nth(1).unwrap().split(',').count(), 8);
    }
}
