//! Radial Sobolev norms, the dissipative inner product and Hardy-type ratios.

use crate::{NumericsError, RadialGrid, Result, StatePair, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevSpec {
    pub k: u32,
    pub d: u32,
    pub r: f64,
}

impl SobolevSpec {
    pub fn new(k: u32, d: u32, r: f64) -> Result<Self> {
        if k > 2 || !(d == 4 || d == 6) || !(r > 0.0) {
            return Err(NumericsError::Config(format!("bad Sobolev spec k={k} d={d} R={r}")));
        }
        Ok(Self { k, d, r })
    }
}

fn weighted(grid: &RadialGrid, vals: impl Fn(usize) -> f64, power: i32) -> f64 {
    let f: Vec<f64> = (0..grid.n).map(|i| vals(i) * grid.nodes[i].powi(power)).collect();
    grid.integrate(&f)
}

/// The three radial seminorm integrals on the unit ball (ρ units):
/// ∫|f|²ρ^{d−1}, ∫|f'|²ρ^{d−1}, ∫|f''+(d−1)f'/ρ|²ρ^{d−1}.
fn radial_pieces(f: &[C64], d: u32, grid: &RadialGrid) -> [f64; 3] {
    let d1 = grid.diff1(f);
    let d2 = grid.diff2(f);
    let p = d as i32 - 1;
    let i0 = weighted(grid, |i| f[i].norm_sqr(), p);
    let i1 = weighted(grid, |i| d1[i].norm_sqr(), p);
    // (ρ f'' + (d−1) f')² ρ^{d−3}: no division at the origin
    let i2 = weighted(
        grid,
        |i| (d2[i] * grid.nodes[i] + d1[i] * (d as f64 - 1.0)).norm_sqr(),
        d as i32 - 3,
    );
    [i0, i1, i2]
}

pub fn sobolev_norm(f: &[C64], spec: SobolevSpec, grid: &RadialGrid) -> f64 {
    let pieces = radial_pieces(f, spec.d, grid);
    let mut s = 0.0;
    for j in 0..=spec.k as usize {
        s += spec.r.powi(spec.d as i32 - 2 * j as i32) * pieces[j];
    }
    s.sqrt()
}

/// ‖u‖_{H²×H¹(B⁶₁)}
pub fn h_norm(u: &StatePair) -> f64 {
    let g = &u.grid;
    let a = sobolev_norm(&u.phi1, SobolevSpec { k: 2, d: 6, r: 1.0 }, g);
    let b = sobolev_norm(&u.phi2, SobolevSpec { k: 1, d: 6, r: 1.0 }, g);
    (a * a + b * b).sqrt()
}

pub fn htilde_inner(u: &StatePair, v: &StatePair) -> Result<C64> {
    if !u.grid.same_as(&v.grid) {
        return Err(NumericsError::Usage("inner product of states on different grids".into()));
    }
    let g = &u.grid;
    let n = g.n;
    let (u1p, u1pp, u2p) = (g.diff1(&u.phi1), g.diff2(&u.phi1), g.diff1(&u.phi2));
    let (v1p, v1pp, v2p) = (g.diff1(&v.phi1), g.diff2(&v.phi1), g.diff1(&v.phi2));
    let integrand: Vec<C64> = (0..n)
        .map(|i| {
            let x = g.nodes[i];
            (u1pp[i] * v1pp[i].conj() * 2.0 + u2p[i] * v2p[i].conj() * 2.0) * x.powi(5)
                + u1p[i] * v1p[i].conj() * (10.0 * x.powi(3))
        })
        .collect();
    let last = n - 1;
    Ok(g.integrate_c(&integrand) + u.phi1[last] * v.phi1[last].conj() + u.phi2[last] * v.phi2[last].conj())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HardyVariant {
    /// ∫|f|²ρ dρ / ‖f‖²_{H²(B⁶_R)}
    L2WeightRho,
    /// ∫|f'|²ρ³ dρ / ‖f‖²_{H²(B⁶_R)}
    H1WeightRho3,
    /// ∫|f|² r dr / ‖f‖²_{H¹(B⁴_R)}
    D4,
    /// ∫|f|² r³ dr / ‖f‖²_{H¹(B⁶_R)}
    D6,
}

/// Ratio LHS/RHS of the Hardy-type bound for samples of f on the ball of
/// radius `r` (grid coordinate ρ = |x|/r).
pub fn hardy_ratio(f: &[C64], variant: HardyVariant, r: f64, grid: &RadialGrid) -> Result<f64> {
    let d1 = grid.diff1(f);
    let (num, den) = match variant {
        HardyVariant::L2WeightRho => (
            r * r * weighted(grid, |i| f[i].norm_sqr(), 1),
            sobolev_norm(f, SobolevSpec::new(2, 6, r)?, grid).powi(2),
        ),
        HardyVariant::H1WeightRho3 => (
            r * r * weighted(grid, |i| d1[i].norm_sqr(), 3) / (r * r),
            sobolev_norm(f, SobolevSpec::new(2, 6, r)?, grid).powi(2),
        ),
        HardyVariant::D4 => (
            r * r * weighted(grid, |i| f[i].norm_sqr(), 1),
            sobolev_norm(f, SobolevSpec::new(1, 4, r)?, grid).powi(2),
        ),
        HardyVariant::D6 => (
            r.powi(4) * weighted(grid, |i| f[i].norm_sqr(), 3),
            sobolev_norm(f, SobolevSpec::new(1, 6, r)?, grid).powi(2),
        ),
    };
    if den <= f64::MIN_POSITIVE {
        return Err(NumericsError::UndefinedRatio);
    }
    Ok(num / den)
}
