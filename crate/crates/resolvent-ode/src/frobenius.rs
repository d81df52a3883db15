use numerics_core::C64;

use crate::coeffs::{a_of, ode_coefficients, OdeCoefficients};
use crate::{ResolventError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Zero,
    One,
}

/// Branches at ρ = 1.
///
/// `Regular` is analytic with value 1 at ρ = 1. `RegularScaled` is the same
/// branch times (λ − 1/2), which stays finite through the resonance at
/// λ = 1/2. `Singular` behaves like (1−ρ²)^{3/2−λ}/(λ − 3/2), normalized so
/// that its weighted Wronskian with `Regular` equals 2 for every λ.
/// `SingularScaled` behaves like a(λ)^{-1/2}(1−ρ)^{3/2−λ}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Regular,
    RegularScaled,
    Singular,
    SingularScaled,
}

/// Truncated Frobenius expansion at one endpoint.
///
/// At 0: u = Σ c_k ρ^{2k}. At 1, with x = 1 − ρ: u = x^index Σ c_k x^k.
#[derive(Debug, Clone)]
pub struct LocalSolution {
    pub endpoint: Endpoint,
    pub index: C64,
    pub coeffs: Vec<C64>,
    pub domain: (f64, f64),
    pub ode: OdeCoefficients,
}

/// Radius (distance from the endpoint) up to which the series are used.
/// Shrinks like 1/|λ| because the coefficients first grow like (|λ|x)^k/k!.
pub fn series_edge(lambda: C64) -> f64 {
    (3.0 / (1.0 + lambda.norm())).min(0.3)
}

fn zero(z: C64) -> bool {
    z.norm() < 1e-300
}

pub fn basis_at_zero(lambda: C64, n_terms: usize, potential: bool) -> Result<LocalSolution> {
    if n_terms < 10 {
        return Err(ResolventError::Config(format!("n_terms must be >= 10, got {n_terms}")));
    }
    let ode = ode_coefficients(lambda, potential);
    let kappa = ode.kappa();
    // −48/(2+ρ²)² = −12 Σ (j+1)(−ρ²/2)^j
    let v: Vec<f64> = (0..n_terms)
        .map(|j| if potential { -12.0 * (j as f64 + 1.0) * (-0.5f64).powi(j as i32) } else { 0.0 })
        .collect();
    let mut c = vec![C64::new(1.0, 0.0)];
    for k in 1..n_terms {
        let kf = k as f64;
        let denom = 2.0 * kf * (2.0 * kf + 4.0);
        // index gap 4 with even steps: the denominator never vanishes
        assert!(denom != 0.0);
        let mut rest = (C64::new(2.0 * (kf - 1.0) * (2.0 * kf - 3.0), 0.0) + (lambda + 2.0) * (4.0 * (kf - 1.0)) + kappa)
            * c[k - 1];
        for j in 0..k {
            rest += c[k - 1 - j] * v[j];
        }
        c.push(rest / denom);
    }
    let hi = (3.0 / (1.0 + lambda.norm())).min(0.5);
    Ok(LocalSolution { endpoint: Endpoint::Zero, index: C64::new(0.0, 0.0), coeffs: c, domain: (0.0, hi), ode })
}

/// Taylor coefficients of (1−x)(κ + V(1−x)).
fn one_forcing_series(ode: &OdeCoefficients, n: usize) -> Vec<C64> {
    let mut p = vec![C64::new(0.0, 0.0); n];
    if ode.potential {
        // 1/q, q = 3 − 2x + x²
        let mut t = vec![0.0; n];
        for k in 0..n {
            let prev1 = if k >= 1 { t[k - 1] } else { 0.0 };
            let prev2 = if k >= 2 { t[k - 2] } else { 0.0 };
            t[k] = if k == 0 { 1.0 / 3.0 } else { (2.0 * prev1 - prev2) / 3.0 };
        }
        for k in 0..n {
            let w: f64 = (0..=k).map(|j| t[j] * t[k - j]).sum();
            p[k] = C64::new(-48.0 * w, 0.0);
        }
    }
    p[0] += ode.kappa();
    (0..n).map(|j| if j == 0 { p[0] } else { p[j] - p[j - 1] }).collect()
}

pub fn basis_at_one(lambda: C64, branch: Branch, n_terms: usize, potential: bool) -> Result<LocalSolution> {
    if n_terms < 10 {
        return Err(ResolventError::Config(format!("n_terms must be >= 10, got {n_terms}")));
    }
    let ode = ode_coefficients(lambda, potential);
    let sigma = match branch {
        Branch::Regular | Branch::RegularScaled => C64::new(0.0, 0.0),
        Branch::Singular | Branch::SingularScaled => C64::new(1.5, 0.0) - lambda,
    };
    let d0 = match branch {
        Branch::Regular => C64::new(1.0, 0.0),
        Branch::RegularScaled => lambda - 0.5,
        Branch::Singular => {
            if zero(lambda - 1.5) {
                return Err(ResolventError::Resonance(lambda));
            }
            (sigma * 2f64.ln()).exp() / (lambda - 1.5)
        }
        Branch::SingularScaled => a_of(lambda).sqrt().inv(),
    };
    let r = one_forcing_series(&ode, n_terms);
    let l2 = lambda + 2.0;
    let mut d = vec![d0];
    for k in 1..n_terms {
        let s = sigma + k as f64;
        let dm1 = d[k - 1];
        let dm2 = if k >= 2 { d[k - 2] } else { C64::new(0.0, 0.0) };
        let mut rest = (s - 1.0) * (s - 2.0) * 3.0 * dm1 - (s - 2.0) * (s - 3.0) * dm2 + l2 * (s - 1.0) * 4.0 * dm1
            - l2 * (s - 2.0) * 2.0 * dm2;
        for j in 0..k {
            rest += r[j] * d[k - 1 - j];
        }
        let denom = s * (s * 2.0 - 3.0 + lambda * 2.0);
        if branch == Branch::RegularScaled && k == 1 {
            // rest = r₀(λ − 1/2) and denom = 2(λ − 1/2): take the limit form
            d.push(r[0] * 0.5);
            continue;
        }
        if denom.norm() < 1e-13 {
            return Err(ResolventError::Resonance(lambda));
        }
        d.push(rest / denom);
    }
    let x = series_edge(lambda);
    Ok(LocalSolution { endpoint: Endpoint::One, index: sigma, coeffs: d, domain: (1.0 - x, 1.0), ode })
}

impl LocalSolution {
    pub fn lambda(&self) -> C64 {
        self.ode.lambda
    }

    /// Point where continuation away from the endpoint starts.
    pub fn edge(&self) -> f64 {
        match self.endpoint {
            Endpoint::Zero => self.domain.1,
            Endpoint::One => self.domain.0,
        }
    }

    pub fn in_domain(&self, rho: f64) -> bool {
        rho >= self.domain.0 && rho <= self.domain.1
    }

    /// S(x), S′(x), S″(x) with u = x^index·S(x), x = 1 − ρ (endpoint one only).
    pub fn factored(&self, rho: f64) -> (C64, C64, C64) {
        let x = 1.0 - rho;
        let (mut s, mut ds, mut d2s) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            let kf = k as f64;
            s = s * x + c;
            if k >= 1 {
                ds = ds * x + c * kf;
            }
            if k >= 2 {
                d2s = d2s * x + c * (kf * (kf - 1.0));
            }
        }
        (s, ds, d2s)
    }

    /// u, u′, u″ in ρ.
    pub fn eval2(&self, rho: f64) -> (C64, C64, C64) {
        match self.endpoint {
            Endpoint::Zero => {
                let r2 = rho * rho;
                let (mut u, mut du, mut d2u) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0));
                // Horner in ρ²; du and d2u carry the factors ρ^{-1}, ρ^{-2}
                for (k, &c) in self.coeffs.iter().enumerate().rev() {
                    let kf = k as f64;
                    u = u * r2 + c;
                    if k >= 1 {
                        du = du * r2 + c * (2.0 * kf);
                        d2u = d2u * r2 + c * (2.0 * kf * (2.0 * kf - 1.0));
                    }
                }
                // du currently holds Σ 2k c_k ρ^{2k-2}; d2u holds Σ 2k(2k-1) c_k ρ^{2k-2}
                (u, du * rho, d2u)
            }
            Endpoint::One => {
                let x = 1.0 - rho;
                let (s, ds, d2s) = self.factored(rho);
                if self.index == C64::new(0.0, 0.0) {
                    return (s, -ds, d2s);
                }
                if x == 0.0 {
                    let inf = C64::new(f64::INFINITY, f64::INFINITY);
                    return (C64::new(0.0, 0.0), inf, inf);
                }
                let sig = self.index;
                let p = (sig * x.ln()).exp();
                let u = p * s;
                let du = -(p * (sig * s / x + ds));
                let d2u = p * (sig * (sig - 1.0) * s / (x * x) + sig * 2.0 * ds / x + d2s);
                (u, du, d2u)
            }
        }
    }

    pub fn eval(&self, rho: f64) -> (C64, C64) {
        let (u, du, _) = self.eval2(rho);
        (u, du)
    }

    /// Relative residual of the truncated series in the homogeneous ODE.
    pub fn residual(&self, rho: f64) -> f64 {
        let (u, du, d2u) = self.eval2(rho);
        let (a2, a1, a0) = self.ode.at(rho);
        let scale = (a2 * d2u).norm() + (a1 * du).norm() + (a0 * u).norm();
        (a2 * d2u + a1 * du + a0 * u).norm() / scale
    }
}
