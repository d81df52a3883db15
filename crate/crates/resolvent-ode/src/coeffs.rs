use numerics_core::{cyl_bessel, cyl_bessel_deriv, BesselKind, C64};

use crate::{ResolventError, Result};

/// −48/(ρ²+2)², the potential term of the spectral ODE in its left-hand-side sign.
pub fn wave_map_potential(rho: f64) -> f64 {
    let q = rho * rho + 2.0;
    -48.0 / (q * q)
}

/// a(λ) = i(3−2λ)/2
pub fn a_of(lambda: C64) -> C64 {
    C64::i() * (C64::new(3.0, 0.0) - lambda * 2.0) * 0.5
}

/// Coefficients of −(1−ρ²)u″ + (2(λ+2)ρ − 5/ρ)u′ + ((λ+2)(λ+1) + V)u = F.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeCoefficients {
    pub lambda: C64,
    pub potential: bool,
}

pub fn ode_coefficients(lambda: C64, potential: bool) -> OdeCoefficients {
    OdeCoefficients { lambda, potential }
}

impl OdeCoefficients {
    pub fn kappa(&self) -> C64 {
        (self.lambda + 2.0) * (self.lambda + 1.0)
    }

    pub fn v(&self, rho: f64) -> f64 {
        if self.potential {
            wave_map_potential(rho)
        } else {
            0.0
        }
    }

    /// (a₂, a₁, a₀) multiplying (u″, u′, u).
    pub fn at(&self, rho: f64) -> (C64, C64, C64) {
        let a2 = C64::new(-(1.0 - rho * rho), 0.0);
        let a1 = (self.lambda + 2.0) * (2.0 * rho) - 5.0 / rho;
        let a0 = self.kappa() + self.v(rho);
        (a2, a1, a0)
    }

    /// Left-hand side minus `f`.
    pub fn residual(&self, rho: f64, u: C64, du: C64, d2u: C64, f: C64) -> C64 {
        let (a2, a1, a0) = self.at(rho);
        a2 * d2u + a1 * du + a0 * u - f
    }

    /// u″ solved from the equation with right-hand side `f`.
    pub fn second_derivative(&self, rho: f64, u: C64, du: C64, f: C64) -> C64 {
        let (a2, a1, a0) = self.at(rho);
        (f - a1 * du - a0 * u) / a2
    }
}

fn interior(rho: f64) -> Result<()> {
    if rho > 0.0 && rho < 1.0 {
        Ok(())
    } else {
        Err(ResolventError::Domain(format!("ρ = {rho} is an endpoint; use the series forms")))
    }
}

/// log of ρ^{5/2}(1−ρ²)^{λ/2−1/4} and its logarithmic derivative.
fn weight(rho: f64, lambda: C64) -> (C64, C64) {
    let e = lambda * 0.5 - 0.25;
    let log_m = C64::new(2.5 * rho.ln(), 0.0) + e * (1.0 - rho * rho).ln();
    let dlog = C64::new(2.5 / rho, 0.0) - e * (2.0 * rho / (1.0 - rho * rho));
    (log_m, dlog)
}

/// v = ρ^{5/2}(1−ρ²)^{λ/2−1/4}·u, which removes the first-order term.
pub fn transform_v(u: C64, du: C64, rho: f64, lambda: C64) -> Result<(C64, C64)> {
    interior(rho)?;
    let (log_m, dlog) = weight(rho, lambda);
    let m = log_m.exp();
    Ok((m * u, m * (du + dlog * u)))
}

pub fn inverse_transform_v(v: C64, dv: C64, rho: f64, lambda: C64) -> Result<(C64, C64)> {
    interior(rho)?;
    let (log_m, dlog) = weight(rho, lambda);
    let inv = (-log_m).exp();
    Ok((inv * v, inv * (dv - dlog * v)))
}

/// φ(ρ) = ½ log((1+ρ)/(1−ρ)) = artanh ρ
pub fn phi_map(rho: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&rho) {
        return Err(ResolventError::Domain(format!("φ needs ρ in [0, 1), got {rho}")));
    }
    Ok(rho.atanh())
}

/// Relative residual of √((1−ρ²)φ)·Z₂(a(λ)φ) in the Liouville–Green
/// comparison equation.
pub fn liouville_green_check(lambda: C64, rho: f64, kind: BesselKind) -> Result<f64> {
    interior(rho)?;
    let phi = phi_map(rho)?;
    let s2 = 1.0 - rho * rho;
    let dphi = 1.0 / s2;
    let d2phi = 2.0 * rho / (s2 * s2);
    let a = a_of(lambda);
    let z = a * phi;
    let zf = cyl_bessel(kind, z)?;
    let dzf = cyl_bessel_deriv(kind, z)?;
    let d2zf = -dzf / z - (C64::new(1.0, 0.0) - 4.0 / (z * z)) * zf;

    let q = s2 * phi;
    let dq = 1.0 - 2.0 * rho * phi;
    let d2q = -2.0 * phi - 2.0 * rho / s2;
    let s = q.sqrt();
    let ds = dq / (2.0 * s);
    let d2s = d2q / (2.0 * s) - dq * dq / (4.0 * q * s);

    let b = zf * s;
    let d2b = zf * d2s + dzf * a * (2.0 * ds * dphi + s * d2phi) + d2zf * a * a * (s * dphi * dphi);

    let coef = ((lambda * 12.0 - lambda * lambda * 4.0 - 9.0) / 4.0 - 15.0 / (4.0 * phi * phi) + 1.0) / (s2 * s2);
    let res = d2b + coef * b;
    Ok(res.norm() / (d2b.norm() + (coef * b).norm()))
}
