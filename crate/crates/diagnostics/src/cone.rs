use blowup_geometry::{profile_physical, profile_similarity, profile_similarity_deriv, BlowupParam};
use cone_evolution::ConeTrajectory;
use numerics_core::quadrature::gauss_legendre;

use crate::{DiagnosticsError, Result};

const SPACE_PANELS: usize = 8;
const SPACE_ORDER: usize = 20;

/// A corotational field u(t, r) in physical variables; the 4D map is
/// U = (sin(r u) x/r, cos(r u)).
pub trait PhysicalField: Sync {
    /// (u, ∂_r u) at time t for each radius.
    fn sample(&self, t: f64, radii: &[f64]) -> Result<Vec<(f64, f64)>>;
}

/// The exact blowup solution u_*^T.
#[derive(Debug, Clone, Copy)]
pub struct ProfileField {
    pub t: BlowupParam,
}

impl PhysicalField for ProfileField {
    fn sample(&self, t: f64, radii: &[f64]) -> Result<Vec<(f64, f64)>> {
        radii.iter().map(|&r| Ok(profile_physical(t, r, self.t)?)).collect()
    }
}

/// u = (T−t)^{-1}(ψ*₁ + Re φ₁)(τ, r/(T−t)) reconstructed from a similarity
/// trajectory of the perturbation.
#[derive(Debug, Clone, Copy)]
pub struct LiftedTrajectory<'a> {
    pub traj: &'a ConeTrajectory,
}

impl PhysicalField for LiftedTrajectory<'_> {
    fn sample(&self, t: f64, radii: &[f64]) -> Result<Vec<(f64, f64)>> {
        let big_t = self.traj.t.t;
        let s = big_t - t;
        if !(s > 0.0) || t < 0.0 {
            return Err(DiagnosticsError::Config(format!("t = {t} outside [0, {big_t})")));
        }
        let tau = (big_t / s).ln();
        let state = self.traj.state_at(tau)?;
        let d1 = state.grid.diff1(&state.phi1);
        radii
            .iter()
            .map(|&r| {
                let rho = r / s;
                if rho > 1.0 + 1e-12 {
                    return Err(DiagnosticsError::Config(format!("r = {r} outside the cone at t = {t}")));
                }
                let rho = rho.min(1.0);
                let p = state.grid.interpolate(&state.phi1, rho).re;
                let dp = state.grid.interpolate(&d1, rho).re;
                let u = (profile_similarity(rho).0 + p) / s;
                let ur = (profile_similarity_deriv(rho) + dp) / (s * s);
                Ok((u, ur))
            })
            .collect()
    }
}

#[derive(Clone, Copy)]
pub enum ConeReference<'a> {
    /// U(t, 0), the north pole for every corotational map
    Center,
    Field(&'a dyn PhysicalField),
}

/// How U − V is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Difference {
    /// the ℝ⁵ difference of the sphere-valued maps
    Chord,
    /// the scalar angle difference r(u − v)
    Angle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeNormSpec {
    pub weight: f64,
    pub q: f64,
    pub order: u8,
    pub difference: Difference,
}

impl ConeNormSpec {
    /// Accepts (−5/6, 12, 0) and (−1/2, 4, 1).
    pub fn new(weight: f64, q: f64, order: u8, difference: Difference) -> Result<Self> {
        let ok = match order {
            0 => (weight + 5.0 / 6.0).abs() < 1e-14 && q == 12.0,
            1 => (weight + 0.5).abs() < 1e-14 && q == 4.0,
            _ => false,
        };
        if !ok {
            return Err(DiagnosticsError::Config(format!(
                "unsupported weighted cone norm: weight {weight}, q {q}, order {order}"
            )));
        }
        Ok(Self { weight, q, order, difference })
    }

    pub fn zeroth(difference: Difference) -> Self {
        Self { weight: -5.0 / 6.0, q: 12.0, order: 0, difference }
    }

    pub fn first(difference: Difference) -> Self {
        Self { weight: -0.5, q: 4.0, order: 1, difference }
    }

    /// |D|^q r^{wq+3} at one radius, from (u, u_r) of both fields.
    fn integrand(&self, r: f64, a: (f64, f64), b: (f64, f64)) -> f64 {
        let (du, dur) = (a.0 - b.0, a.1 - b.1);
        let dth = r * du;
        let d = match self.order {
            0 => match self.difference {
                Difference::Angle => dth.abs(),
                Difference::Chord => 2.0 * (0.5 * dth).sin().abs(),
            },
            _ => {
                let dth_r = du + r * dur;
                match self.difference {
                    Difference::Angle => dth_r.abs(),
                    Difference::Chord => {
                        let (ta_r, tb_r) = (a.0 + r * a.1, b.0 + r * b.1);
                        let half = (0.5 * dth).sin();
                        // sin θ_a − sin θ_b = 2 cos(θ̄) sin(Δθ/2), θ̄ the mean angle
                        let mean = 0.5 * r * (a.0 + b.0);
                        let ang = 2.0 * mean.cos() * half / r;
                        (dth_r * dth_r + 4.0 * ta_r * tb_r * half * half + 3.0 * ang * ang).max(0.0).sqrt()
                    }
                }
            }
        };
        d.powf(self.q) * r.powf(self.weight * self.q + 3.0)
    }
}

/// ‖|x|^w D^{order}(U − V)(t)‖_{L^q(B⁴_{T−t})}, radial weight r³.
pub fn cone_snapshot(
    sol: &dyn PhysicalField,
    reference: ConeReference,
    spec: &ConeNormSpec,
    t: f64,
    big_t: f64,
) -> Result<f64> {
    let s = big_t - t;
    if !(s > 0.0) {
        return Err(DiagnosticsError::Config(format!("t = {t} is not before T = {big_t}")));
    }
    let (x, w) = gauss_legendre(SPACE_ORDER);
    let h = 1.0 / SPACE_PANELS as f64;
    let mut radii = Vec::with_capacity(SPACE_PANELS * SPACE_ORDER);
    let mut weights = Vec::with_capacity(radii.capacity());
    for p in 0..SPACE_PANELS {
        for (xi, wi) in x.iter().zip(&w) {
            radii.push(s * (p as f64 * h + 0.5 * h * (xi + 1.0)));
            weights.push(s * 0.5 * h * wi);
        }
    }
    let a = sol.sample(t, &radii)?;
    let b = match reference {
        ConeReference::Center => vec![(0.0, 0.0); radii.len()],
        ConeReference::Field(f) => f.sample(t, &radii)?,
    };
    let acc: f64 = (0..radii.len()).map(|i| weights[i] * spec.integrand(radii[i], a[i], b[i])).sum();
    Ok(acc.powf(1.0 / spec.q))
}

#[derive(Debug, Clone, PartialEq)]
pub enum TimeRule {
    /// Gauss–Legendre panels in σ = −ln(T − t), `panels_per_unit` per unit of σ
    Gauss { panels_per_unit: usize, order: usize },
    /// trapezoid in σ over the given times (increasing, inside [0, T − ε])
    Stamps(Vec<f64>),
}

impl Default for TimeRule {
    fn default() -> Self {
        TimeRule::Gauss { panels_per_unit: 2, order: 12 }
    }
}

/// ∫₀^{T−ε} ‖|x|^w D^{order}(U − V)(t)‖²_{L^q(B⁴_{T−t})} dt.
pub fn weighted_cone_norm(
    sol: &dyn PhysicalField,
    reference: ConeReference,
    big_t: f64,
    spec: &ConeNormSpec,
    eps: f64,
    rule: &TimeRule,
) -> Result<f64> {
    if !(eps > 0.0 && eps < big_t) {
        return Err(DiagnosticsError::Config(format!("cutoff ε = {eps} must lie in (0, T = {big_t})")));
    }
    // dt = (T − t) dσ
    let weighted = |sigma: f64| -> Result<f64> {
        let s = (-sigma).exp();
        let v = cone_snapshot(sol, reference, spec, big_t - s, big_t)?;
        Ok(v * v * s)
    };
    let (lo, hi) = (-big_t.ln(), -eps.ln());
    match rule {
        TimeRule::Gauss { panels_per_unit, order } => {
            let panels = (((hi - lo) * *panels_per_unit as f64).ceil() as usize).max(1);
            let (x, w) = gauss_legendre(*order);
            let h = (hi - lo) / panels as f64;
            let mut acc = 0.0;
            for p in 0..panels {
                for (xi, wi) in x.iter().zip(&w) {
                    acc += 0.5 * h * wi * weighted(lo + p as f64 * h + 0.5 * h * (xi + 1.0))?;
                }
            }
            Ok(acc)
        }
        TimeRule::Stamps(ts) => {
            if ts.len() < 2 || ts.windows(2).any(|w| w[1] <= w[0]) {
                return Err(DiagnosticsError::Config("time stamps must be increasing, at least two".into()));
            }
            if ts[0] < 0.0 || *ts.last().unwrap() > big_t - eps + 1e-12 {
                return Err(DiagnosticsError::Config("time stamps outside [0, T − ε]".into()));
            }
            let sig: Vec<f64> = ts.iter().map(|t| -(big_t - t).ln()).collect();
            let vals = sig.iter().map(|&x| weighted(x)).collect::<Result<Vec<_>>>()?;
            Ok((1..sig.len()).map(|k| 0.5 * (sig[k] - sig[k - 1]) * (vals[k] + vals[k - 1])).sum())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_gate() {
        ConeNormSpec::new(-5.0 / 6.0, 12.0, 0, Difference::Chord).unwrap();
        ConeNormSpec::new(-0.5, 4.0, 1, Difference::Chord).unwrap();
        assert!(ConeNormSpec::new(-0.5, 12.0, 0, Difference::Chord).is_err());
        assert!(ConeNormSpec::new(-5.0 / 6.0, 4.0, 1, Difference::Angle).is_err());
    }

    #[test]
    fn profile_about_itself_vanishes() {
        let f = ProfileField { t: BlowupParam { t: 1.0 } };
        for spec in [ConeNormSpec::zeroth(Difference::Chord), ConeNormSpec::first(Difference::Chord)] {
            let v = weighted_cone_norm(&f, ConeReference::Field(&f), 1.0, &spec, 1e-2, &TimeRule::default()).unwrap();
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn chord_and_angle_agree_for_small_angles() {
        let spec_c = ConeNormSpec::zeroth(Difference::Chord);
        let spec_a = ConeNormSpec::zeroth(Difference::Angle);
        let (a, b) = ((1.0, 0.3), (1.0 + 1e-5, 0.3));
        let r = 0.4;
        let (c, g) = (spec_c.integrand(r, a, b), spec_a.integrand(r, a, b));
        assert!((c / g - 1.0).abs() < 1e-9);
        // first order: |∇(U − V)| against central differences of the embedded maps
        let spec = ConeNormSpec::first(Difference::Chord);
        let (ua, uar, ub, ubr) = (1.3, -0.4, 0.7, 0.2);
        let lhs = spec.integrand(r, (ua, uar), (ub, ubr)).powf(0.25) / r.powf(0.25);
        let map = |x: [f64; 4], u0: f64, u1: f64| -> [f64; 5] {
            let rr = (x.iter().map(|v| v * v).sum::<f64>()).sqrt();
            let th = rr * (u0 + u1 * (rr - r));
            [th.sin() * x[0] / rr, th.sin() * x[1] / rr, th.sin() * x[2] / rr, th.sin() * x[3] / rr, th.cos()]
        };
        let x0 = [r * 0.5, r * 0.5, r * 0.5, r * 0.5];
        let h = 1e-5;
        let mut g2 = 0.0;
        for j in 0..4 {
            let (mut xp, mut xm) = (x0, x0);
            xp[j] += h;
            xm[j] -= h;
            let (ap, am) = (map(xp, ua, uar), map(xm, ua, uar));
            let (bp, bm) = (map(xp, ub, ubr), map(xm, ub, ubr));
            for k in 0..5 {
                let d = ((ap[k] - bp[k]) - (am[k] - bm[k])) / (2.0 * h);
                g2 += d * d;
            }
        }
        assert!((lhs - g2.sqrt()).abs() < 1e-8, "{lhs} vs {}", g2.sqrt());
    }
}
