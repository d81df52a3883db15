//! Gauss rules and integrators for algebraic endpoint singularities.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::gamma::log_gamma;
use crate::{NumericsError, RadialGrid, Result, C64};

/// Gauss–Legendre nodes and weights on [-1, 1] (Newton on P_m).
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(m, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(m, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    (x, w)
}

fn legendre(m: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (1.0, 0.0);
    }
    let d = m as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Gauss–Jacobi rule for the weight (1-x)^alpha (1+x)^beta on [-1, 1]
/// (Golub–Welsch).
pub fn gauss_jacobi(m: usize, alpha: f64, beta: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if alpha <= -1.0 || beta <= -1.0 || m == 0 {
        return Err(NumericsError::Config(format!("bad Jacobi rule ({m}, {alpha}, {beta})")));
    }
    let ab = alpha + beta;
    let mut jm = DMatrix::<f64>::zeros(m, m);
    for k in 0..m {
        let kf = k as f64;
        let a = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        jm[(k, k)] = a;
        if k + 1 < m {
            let k1 = kf + 1.0;
            let num = 4.0 * k1 * (k1 + alpha) * (k1 + beta) * (k1 + ab);
            let t = 2.0 * k1 + ab;
            let den = t * t * (t + 1.0) * (t - 1.0);
            let b = (num / den).sqrt();
            jm[(k, k + 1)] = b;
            jm[(k + 1, k)] = b;
        }
    }
    let mu0 = ((ab + 1.0) * 2f64.ln()
        + log_gamma(Complex64::new(alpha + 1.0, 0.0))?.re
        + log_gamma(Complex64::new(beta + 1.0, 0.0))?.re
        - log_gamma(Complex64::new(ab + 2.0, 0.0))?.re)
        .exp();
    let eig = SymmetricEigen::new(jm);
    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(pairs.into_iter().unzip())
}

/// Quadrature for ∫₀¹ h(ρ) ρ^p dρ with h sampled on a collocation grid:
/// Gauss–Jacobi nodes plus the barycentric interpolation matrix.
#[derive(Debug, Clone)]
pub struct RadialWeightRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub interp: DMatrix<f64>,
}

impl RadialWeightRule {
    pub fn new(grid: &RadialGrid, power: u32, m: usize) -> Result<Self> {
        let (x, w) = gauss_jacobi(m, 0.0, power as f64)?;
        // rho = (1+x)/2, rho^p drho = 2^{-p-1} (1+x)^p dx
        let scale = 0.5f64.powi(power as i32 + 1);
        let nodes: Vec<f64> = x.iter().map(|v| 0.5 * (1.0 + v)).collect();
        let weights = w.iter().map(|v| v * scale).collect();
        let interp = grid.interp_matrix(&nodes);
        Ok(Self { nodes, weights, interp })
    }

    pub fn values(&self, f: &[C64]) -> Vec<C64> {
        (0..self.nodes.len())
            .map(|i| {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..f.len() {
                    acc += f[j] * self.interp[(i, j)];
                }
                acc
            })
            .collect()
    }

    /// ∫₀¹ |f|^q ρ^p dρ
    pub fn integrate_abs_pow(&self, f: &[C64], q: f64) -> f64 {
        self.values(f).iter().zip(&self.weights).map(|(v, w)| w * v.norm().powf(q)).sum()
    }
}

/// Composite Gauss–Legendre on [a, b] with `panels` equal panels.
pub fn integrate_panels(f: &dyn Fn(f64) -> C64, a: f64, b: f64, panels: usize, order: usize) -> C64 {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut acc = C64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            acc += f(lo + 0.5 * h * (xi + 1.0)) * (0.5 * h * wi);
        }
    }
    acc
}

/// ∫_a^b x^γ G(x) dx for 0 <= a < b, G smooth on [0, b], Re γ > −1.
///
/// Panels are graded geometrically toward x = 0. When a = 0 the innermost
/// panel [0, h] integrates x^γ exactly against the quadratic interpolant of G.
pub fn integrate_power_singular(g: &dyn Fn(f64) -> C64, gamma: C64, a: f64, b: f64) -> Result<C64> {
    if !(0.0..b).contains(&a) {
        return Err(NumericsError::Usage(format!("need 0 <= a < b, got [{a}, {b}]")));
    }
    if gamma.re <= -1.0 && a == 0.0 {
        return Err(NumericsError::Domain(format!("x^{gamma} not integrable at 0")));
    }
    let (gx, gw) = gauss_legendre(20);
    let f = |x: f64| g(x) * C64::new(x, 0.0).powc(gamma);
    let panel = |lo: f64, hi: f64| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (xi, wi) in gx.iter().zip(&gw) {
            acc += f(lo + 0.5 * (hi - lo) * (xi + 1.0)) * (0.5 * (hi - lo) * wi);
        }
        acc
    };
    let mut acc = C64::new(0.0, 0.0);
    let mut hi = b;
    let floor = if a > 0.0 { a } else { b * 2f64.powi(-48) };
    while hi > floor * 1.000_000_1 {
        let lo = (0.5 * hi).max(floor);
        acc += panel(lo, hi);
        hi = lo;
    }
    if a == 0.0 {
        let h = floor;
        let (g0, g1, g2) = (g(0.0), g(0.5 * h), g(h));
        // quadratic through (0, g0), (h/2, g1), (h, g2) in powers of x
        let c0 = g0;
        let c1 = (g1 * 4.0 - g0 * 3.0 - g2) / h;
        let c2 = (g2 + g0 - g1 * 2.0) * 2.0 / (h * h);
        let hp = |k: f64| C64::new(h, 0.0).powc(gamma + k + 1.0) / (gamma + k + 1.0);
        acc += c0 * hp(0.0) + c1 * hp(1.0) + c2 * hp(2.0);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build_grid;

    #[test]
    fn legendre_exactness() {
        let (x, w) = gauss_legendre(10);
        for deg in 0..20 {
            let s: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((s - exact).abs() < 1e-14, "deg {deg}");
        }
    }

    #[test]
    fn jacobi_moments() {
        let (x, w) = gauss_jacobi(12, 0.0, 5.0).unwrap();
        // ∫_{-1}^1 (1+x)^5 x^2 dx, by expanding in t = 1+x
        let exact = {
            let t8 = 2f64.powi(8) / 8.0_f64;
            let t7 = 2f64.powi(7) / 7.0;
            let t6 = 2f64.powi(6) / 6.0;
            t8 - 2.0 * t7 + t6
        };
        let s: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi * xi).sum();
        assert!((s - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn radial_rule_constant() {
        let g = build_grid(16).unwrap();
        let rule = RadialWeightRule::new(&g, 5, 40).unwrap();
        let one = vec![C64::new(1.0, 0.0); 16];
        assert!((rule.integrate_abs_pow(&one, 6.0) - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn power_singular_exact_cases() {
        let gamma = C64::new(-0.4, 3.0);
        let v = integrate_power_singular(&|_| C64::new(1.0, 0.0), gamma, 0.0, 0.5).unwrap();
        let exact = C64::new(0.5, 0.0).powc(gamma + 1.0) / (gamma + 1.0);
        assert!((v - exact).norm() < 1e-12 * exact.norm());
        let g = |x: f64| C64::new((2.0 * x).cos(), 0.0);
        let a = 0.013;
        let full = integrate_power_singular(&g, gamma, 0.0, 0.5).unwrap();
        let lower = integrate_power_singular(&g, gamma, 0.0, a).unwrap();
        let upper = integrate_power_singular(&g, gamma, a, 0.5).unwrap();
        assert!((full - lower - upper).norm() < 1e-12 * full.norm());
    }
}
