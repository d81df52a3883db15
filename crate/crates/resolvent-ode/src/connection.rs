use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use numerics_core::{cyl_bessel, cyl_bessel_deriv, log_gamma, BesselKind, C64};
use rayon::prelude::*;
use serde::Serialize;

use crate::coeffs::{a_of, phi_map, transform_v};
use crate::dopri::sample_solution;
use crate::frobenius::{basis_at_one, basis_at_zero, Branch};
use crate::{ResolventError, Result};

/// Matching point for strip scans.
pub const MATCH_POINT: f64 = 0.6;
const TERMS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionData {
    pub lambda: C64,
    pub potential: bool,
    /// coefficient of the regular branch at 1
    pub a: C64,
    /// coefficient of the (1−ρ²)^{3/2−λ} branch
    pub b: C64,
    pub wronskian_drift: f64,
    pub matching_point: f64,
}

fn weighted_wronskian(lambda: C64, rho: f64, x: (C64, C64), y: (C64, C64)) -> C64 {
    let w = x.0 * y.1 - x.1 * y.0;
    w * rho.powi(5) * ((lambda - 0.5) * (1.0 - rho * rho).ln()).exp()
}

/// Decompose the solution analytic at 0 (value 1 there) into the branches
/// at 1: u_an = A·u_reg + B·u_sing. λ is an eigenvalue with an H² eigenfunction
/// exactly when B = 0.
pub fn mode_stability_function(lambda: C64, potential: bool) -> Result<ConnectionData> {
    let an = basis_at_zero(lambda, TERMS, potential)?;
    let reg = basis_at_one(lambda, Branch::Regular, TERMS, potential)?;
    let sing = basis_at_one(lambda, Branch::Singular, TERMS, potential)?;
    let pts = [MATCH_POINT, 0.45, 0.8];
    let ua = sample_solution(&an, &pts[..1])?[0];
    let ur = sample_solution(&reg, &pts)?;
    let us = sample_solution(&sing, &pts)?;
    let rho = MATCH_POINT;
    let w_rs = weighted_wronskian(lambda, rho, ur[0], us[0]);
    let a = weighted_wronskian(lambda, rho, ua, us[0]) / w_rs;
    let b = weighted_wronskian(lambda, rho, ur[0], ua) / w_rs;
    let drift = pts
        .iter()
        .zip(ur.iter().zip(&us))
        .map(|(&p, (x, y))| (weighted_wronskian(lambda, p, *x, *y) - 2.0).norm() / 2.0)
        .fold(0.0, f64::max);
    Ok(ConnectionData { lambda, potential, a, b, wronskian_drift: drift, matching_point: rho })
}

/// (λ − 1/2)·B(λ), analytic across the resonance of the regular branch at λ = 1/2.
pub fn stability_m(lambda: C64, potential: bool) -> Result<C64> {
    let an = basis_at_zero(lambda, TERMS, potential)?;
    let reg = basis_at_one(lambda, Branch::RegularScaled, TERMS, potential)?;
    let ua = sample_solution(&an, &[MATCH_POINT])?[0];
    let ur = sample_solution(&reg, &[MATCH_POINT])?[0];
    Ok(weighted_wronskian(lambda, MATCH_POINT, ur, ua) / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        if !(re_min < re_max && im_min < im_max) {
            return Err(ResolventError::Config("degenerate rectangle".into()));
        }
        Ok(Self { re_min, re_max, im_min, im_max })
    }

    fn perimeter(&self) -> f64 {
        2.0 * ((self.re_max - self.re_min) + (self.im_max - self.im_min))
    }

    /// Counterclockwise boundary point at arc length s ∈ [0, perimeter).
    fn at(&self, s: f64) -> C64 {
        let w = self.re_max - self.re_min;
        let h = self.im_max - self.im_min;
        if s < w {
            C64::new(self.re_min + s, self.im_min)
        } else if s < w + h {
            C64::new(self.re_max, self.im_min + (s - w))
        } else if s < 2.0 * w + h {
            C64::new(self.re_max - (s - w - h), self.im_max)
        } else {
            C64::new(self.re_min, self.im_max - (s - 2.0 * w - h))
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WindingCertificate {
    pub rect: Rect,
    pub potential: bool,
    pub winding: i64,
    pub total_phase: f64,
    pub max_phase_step: f64,
    pub evaluations: usize,
    /// [re λ, im λ, re M, im M] along the closed boundary
    pub boundary: Vec<[f64; 4]>,
}

impl WindingCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

/// Winding number of M(λ) = (λ − 1/2)B(λ) around the rectangle boundary,
/// refining until consecutive phase steps are below π/2.
pub fn winding_scan(rect: Rect, samples: usize, potential: bool) -> Result<WindingCertificate> {
    let per = rect.perimeter();
    let n0 = samples.max(16);
    // arc-length parameters, corners included
    let w = rect.re_max - rect.re_min;
    let h = rect.im_max - rect.im_min;
    let mut params: Vec<f64> = (0..n0).map(|k| per * k as f64 / n0 as f64).collect();
    params.extend([0.0, w, w + h, 2.0 * w + h]);
    params.sort_by(|a, b| a.partial_cmp(b).unwrap());
    params.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let eval = |ps: &[f64]| -> Result<Vec<C64>> { ps.par_iter().map(|&s| stability_m(rect.at(s), potential)).collect() };
    let mut values = eval(&params)?;
    let mut evaluations = values.len();
    let step = |a: C64, b: C64| (b / a).arg();
    for _ in 0..40 {
        let m = params.len();
        let bad: Vec<usize> = (0..m).filter(|&i| step(values[i], values[(i + 1) % m]).abs() >= PI / 2.0).collect();
        if bad.is_empty() {
            break;
        }
        let mids: Vec<f64> = bad
            .iter()
            .map(|&i| {
                let next = if i + 1 == m { per } else { params[i + 1] };
                0.5 * (params[i] + next)
            })
            .collect();
        if bad.iter().zip(&mids).any(|(&i, &mid)| (mid - params[i]).abs() < 1e-10 * per) {
            break;
        }
        let new_vals = eval(&mids)?;
        evaluations += new_vals.len();
        let mut merged: Vec<(f64, C64)> = params.iter().copied().zip(values.iter().copied()).collect();
        merged.extend(mids.into_iter().zip(new_vals));
        merged.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        params = merged.iter().map(|p| p.0).collect();
        values = merged.iter().map(|p| p.1).collect();
    }
    if values.iter().any(|v| v.norm() == 0.0 || !v.norm().is_finite()) {
        return Err(ResolventError::Inconclusive { step: f64::NAN });
    }
    let m = params.len();
    let steps: Vec<f64> = (0..m).map(|i| step(values[i], values[(i + 1) % m])).collect();
    let max_step = steps.iter().fold(0.0f64, |a, s| a.max(s.abs()));
    if max_step >= PI / 2.0 {
        return Err(ResolventError::Inconclusive { step: max_step });
    }
    let total: f64 = steps.iter().sum();
    let winding = (total / (2.0 * PI)).round() as i64;
    let boundary = params
        .iter()
        .zip(&values)
        .map(|(&s, v)| {
            let l = rect.at(s);
            [l.re, l.im, v.re, v.im]
        })
        .collect();
    Ok(WindingCertificate { rect, potential, winding, total_phase: total, max_phase_step: max_step, evaluations, boundary })
}

/// Scan rows `re_lambda,im_lambda,re_B,im_B,wronskian_drift`.
pub fn write_scan_csv(rows: &[ConnectionData], path: &Path) -> std::io::Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "re_lambda,im_lambda,re_B,im_B,wronskian_drift")?;
    for r in rows {
        writeln!(
            f,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.lambda.re, r.lambda.im, r.b.re, r.b.im, r.wronskian_drift
        )?;
    }
    f.flush()
}

/// Γ(3)Γ(a+b−c+1)/(Γ(a)Γ(b)) with a = (1+iω)/2, b = 1+iω/2, c = 3.
pub fn hypergeom_c3(omega: f64) -> C64 {
    let w = C64::new(0.0, omega);
    let lg = |z: C64| log_gamma(z).expect("arguments avoid the poles of Γ");
    let num = lg(C64::new(3.0, 0.0)) + lg(w - 0.5);
    let den = lg((w + 1.0) * 0.5) + lg(w * 0.5 + 1.0);
    (num - den).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaperConnectionConfig {
    pub r: f64,
    pub rho0: f64,
}

impl Default for PaperConnectionConfig {
    fn default() -> Self {
        Self { r: 1.0, rho0: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaperConnection {
    pub omega: f64,
    pub c13: C64,
    pub c23: C64,
    pub matching_point: f64,
}

impl PaperConnection {
    /// e^{5πi/4}√(π/2)
    pub fn limit() -> C64 {
        C64::from_polar((PI / 2.0).sqrt(), 1.25 * PI)
    }
}

/// Connection coefficients of the solution ~ a^{-1/2}(1−ρ)^{5/4−λ/2}(1+ρ)^{λ/2−1/4}
/// at 1 (first-order-free form) against the Bessel pair at 0, λ = iω.
pub fn paper_connection(omega: f64, cfg: PaperConnectionConfig) -> Result<PaperConnection> {
    if omega < 5.0 {
        return Err(ResolventError::Config(format!("paper_connection needs ω >= 5, got {omega}")));
    }
    let lambda = C64::new(0.0, omega);
    let a = a_of(lambda);
    let rho = (0.5 * (cfg.rho0 + 1.0)).min(2.0 * cfg.r / a.norm());
    let sol = basis_at_one(lambda, Branch::SingularScaled, TERMS, true)?;
    if !(rho > 0.0) || rho >= sol.edge() {
        return Err(ResolventError::Config(format!(
            "matching point {rho} collides with the series domain [{}, 1]",
            sol.edge()
        )));
    }
    let (u, du) = sample_solution(&sol, &[rho])?[0];
    let psi3 = transform_v(u, du, rho, lambda)?;

    let phi = phi_map(rho)?;
    let s2 = 1.0 - rho * rho;
    let q = s2 * phi;
    let s = q.sqrt();
    let ds = (1.0 - 2.0 * rho * phi) / (2.0 * s);
    let bessel = |kind| -> Result<(C64, C64)> {
        let z = a * phi;
        let zf = cyl_bessel(kind, z)?;
        let dzf = cyl_bessel_deriv(kind, z)?;
        Ok((zf * s, zf * ds + dzf * a * (s / s2)))
    };
    let b1 = bessel(BesselKind::J2)?;
    let b2 = bessel(BesselKind::Y2)?;
    let w = |x: (C64, C64), y: (C64, C64)| x.0 * y.1 - x.1 * y.0;
    let w12 = 2.0 / PI;
    Ok(PaperConnection { omega, c13: w(psi3, b2) / w12, c23: -w(psi3, b1) / w12, matching_point: rho })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn eigenvalue_one_has_vanishing_b() {
        let d = mode_stability_function(c(1.0), true).unwrap();
        assert!(d.b.norm() <= 1e-8 * d.a.norm(), "{:?}", d);
        assert!(d.wronskian_drift <= 1e-8);
        let f = mode_stability_function(c(1.0), false).unwrap();
        assert!(f.b.norm() > 1e-2 * f.a.norm(), "{:?}", f);
    }

    #[test]
    fn strip_point_is_not_an_eigenvalue() {
        let d = mode_stability_function(C64::new(0.1, 3.0), true).unwrap();
        assert!(d.b.norm() > 1e-3 * d.a.norm());
        assert!(d.wronskian_drift <= 1e-8, "{}", d.wronskian_drift);
    }

    #[test]
    fn c3_values() {
        assert!((hypergeom_c3(0.0) - c(-4.0)).norm() < 1e-12);
        // mpmath: 2*gamma(-0.5+1j)/(gamma(0.5+0.5j)*gamma(1+0.5j))
        let v = hypergeom_c3(1.0);
        let oracle = C64::new(-0.414_320_287_274_814_1, -0.918_222_796_144_947_5);
        assert!((v - oracle).norm() < 1e-10);
        let mut min = f64::INFINITY;
        for k in -500..=500 {
            min = min.min(hypergeom_c3(0.1 * k as f64).norm());
        }
        assert!(min > 0.0);
    }

    #[test]
    fn m_matches_b_away_from_resonance() {
        let lam = C64::new(0.2, 1.5);
        let d = mode_stability_function(lam, true).unwrap();
        let m = stability_m(lam, true).unwrap();
        assert!((m - d.b * (lam - 0.5)).norm() < 1e-9 * m.norm());
        assert!(stability_m(c(0.5), true).unwrap().norm().is_finite());
    }
}
