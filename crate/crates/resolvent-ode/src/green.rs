use std::sync::Arc;

use numerics_core::quadrature::{gauss_legendre, integrate_panels, integrate_power_singular};
use numerics_core::{RadialGrid, StatePair, C64};

use crate::connection::mode_stability_function;
use crate::dopri::sample_solution;
use crate::frobenius::{basis_at_one, basis_at_zero, Branch};
use crate::{ResolventError, Result};

const TERMS: usize = 60;
const GL_ORDER: usize = 20;
const MAX_PANEL: f64 = 0.05;

/// ψ₁ = (2−ρ²−2√(1−ρ²))/ρ⁴, evaluated without cancellation.
pub fn psi1_free(rho: f64) -> f64 {
    let p = 1.0 + (1.0 - rho * rho).sqrt();
    1.0 / (p * p)
}

/// ψ₂ = (2−ρ²)/ρ⁴
pub fn psi2_free(rho: f64) -> f64 {
    (2.0 - rho * rho) / rho.powi(4)
}

/// W(ψ₁, ψ₂) = −2/(ρ⁵√(1−ρ²))
pub fn wronskian_free(rho: f64) -> f64 {
    -2.0 / (rho.powi(5) * (1.0 - rho * rho).sqrt())
}

/// Smooth solution of the free λ = 1 equation with right-hand side F₁
/// (sampled on `grid`), by variation of constants against ψ₁, ψ₂.
pub fn lambda1_green(grid: &RadialGrid, f1: &[C64]) -> Result<Vec<C64>> {
    if f1.len() != grid.n {
        return Err(ResolventError::Config(format!("forcing has {} samples, grid has {}", f1.len(), grid.n)));
    }
    let force = |s: f64| grid.interpolate(f1, s);
    // s = 1 − w², so that √(1−s²) = w√(1+s) cancels against ds = −2w dw
    let outer = |w: f64| {
        let s = 1.0 - w * w;
        force(s) * (s * (2.0 - s * s) / (2.0 - w * w).sqrt())
    };
    let inner = |w: f64| {
        let s = 1.0 - w * w;
        force(s) * (s.powi(5) * psi1_free(s) / (2.0 - w * w).sqrt())
    };
    let mut out = Vec::with_capacity(grid.n);
    for &rho in &grid.nodes {
        let w0 = (1.0 - rho).sqrt();
        let ia = if w0 > 0.0 { integrate_panels(&outer, 0.0, w0, 8, GL_ORDER) } else { C64::new(0.0, 0.0) };
        let u = if rho == 0.0 {
            ia * psi1_free(0.0)
        } else {
            let ib = integrate_panels(&inner, w0, 1.0, 8, GL_ORDER);
            ia * psi1_free(rho) + ib * psi2_free(rho)
        };
        out.push(u);
    }
    Ok(out)
}

/// Forcing F = f₂ + (λ+2)f₁ + ρf₁′ and its derivative, interpolated from samples.
struct Forcing {
    grid: Arc<RadialGrid>,
    f: Vec<C64>,
    df: Vec<C64>,
}

impl Forcing {
    fn new(lambda: C64, f: &StatePair) -> Self {
        let g = f.grid.clone();
        let d1 = g.diff1(&f.phi1);
        let d2 = g.diff2(&f.phi1);
        let dphi2 = g.diff1(&f.phi2);
        let mut big_f = Vec::with_capacity(g.n);
        let mut big_df = Vec::with_capacity(g.n);
        for i in 0..g.n {
            let x = g.nodes[i];
            big_f.push(f.phi2[i] + (lambda + 2.0) * f.phi1[i] + d1[i] * x);
            big_df.push(dphi2[i] + (lambda + 3.0) * d1[i] + d2[i] * x);
        }
        Self { grid: g, f: big_f, df: big_df }
    }

    fn at(&self, s: f64) -> (C64, C64) {
        let row = self.grid.interp_row(s);
        let mut a = C64::new(0.0, 0.0);
        let mut b = C64::new(0.0, 0.0);
        for ((w, x), y) in row.iter().zip(&self.f).zip(&self.df) {
            a += x * *w;
            b += y * *w;
        }
        (a, b)
    }
}

/// Gauss nodes and weights on [a, b], split into panels of length ≤ MAX_PANEL.
fn panel_rule(a: f64, b: f64, gx: &[f64], gw: &[f64]) -> Vec<(f64, f64)> {
    let m = (((b - a) / MAX_PANEL).ceil() as usize).max(1);
    let h = (b - a) / m as f64;
    let mut out = Vec::with_capacity(m * gx.len());
    for p in 0..m {
        let lo = a + p as f64 * h;
        for (x, w) in gx.iter().zip(gw) {
            out.push((lo + 0.5 * h * (x + 1.0), 0.5 * h * w));
        }
    }
    out
}

/// H²-regular solution u₁ of the resolvent ODE with forcing built from `f`,
/// returned as (u₁, u₁′) at `points` ⊂ [0, 1].
pub fn green_resolvent_points(lambda: C64, f: &StatePair, potential: bool, points: &[f64]) -> Result<Vec<(C64, C64)>> {
    if points.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(ResolventError::Domain("evaluation points must lie in [0, 1]".into()));
    }
    let conn = mode_stability_function(lambda, potential)?;
    let (big_a, big_b) = (conn.a, conn.b);
    if big_b.norm() <= 1e-10 * big_a.norm().max(1.0) {
        return Err(ResolventError::EigenvalueCollision(lambda));
    }
    let rho_m = conn.matching_point;
    let an = basis_at_zero(lambda, TERMS, potential)?;
    let reg = basis_at_one(lambda, Branch::Regular, TERMS, potential)?;
    let sing = basis_at_one(lambda, Branch::Singular, TERMS, potential)?;
    let forcing = Forcing::new(lambda, f);
    let mu = lambda - 0.5;
    let sigma = sing.index;
    let e = lambda - 1.5;
    let (gx, gw) = gauss_legendre(GL_ORDER);
    let pw = |base: f64, ex: C64| (ex * base.ln()).exp();
    // F(s) s⁵ (1+s)^{λ−3/2} / 2
    let core = |s: f64, big_f: C64| big_f * (0.5 * s.powi(5)) * pw(1.0 + s, e);

    // ---- left zone [0, ρ_m]
    let mut left: Vec<f64> = points.iter().copied().filter(|&p| p <= rho_m).collect();
    left.push(0.0);
    left.push(rho_m);
    left.sort_by(|a, b| a.partial_cmp(b).unwrap());
    left.dedup();
    let segs: Vec<Vec<(f64, f64)>> = left.windows(2).map(|w| panel_rule(w[0], w[1], &gx, &gw)).collect();
    let qpts: Vec<f64> = segs.iter().flatten().map(|q| q.0).collect();
    let mut want = left.clone();
    want.extend(&qpts);
    let y_an = sample_solution(&an, &want)?;
    let pos: Vec<f64> = want.iter().copied().filter(|&p| p > 0.0).collect();
    let y_reg_pos = sample_solution(&reg, &pos)?;
    let mut y_reg = Vec::with_capacity(want.len());
    let mut it = y_reg_pos.into_iter();
    for &p in &want {
        y_reg.push(if p > 0.0 { it.next().unwrap() } else { (C64::new(f64::NAN, 0.0), C64::new(f64::NAN, 0.0)) });
    }
    let nl = left.len();
    // k(s) = F s⁵ (1−s²)^{λ−3/2} / (2B)
    let kern = |s: f64| {
        let (big_f, _) = forcing.at(s);
        core(s, big_f) * pw(1.0 - s, e) / big_b
    };
    let mut i1 = vec![C64::new(0.0, 0.0); nl];
    let mut kk = vec![C64::new(0.0, 0.0); nl];
    let mut cursor = nl;
    let mut seg_an = Vec::with_capacity(segs.len());
    let mut seg_reg = Vec::with_capacity(segs.len());
    for seg in &segs {
        let mut sa = C64::new(0.0, 0.0);
        let mut sr = C64::new(0.0, 0.0);
        for &(s, w) in seg {
            let k = kern(s);
            sa += y_an[cursor].0 * k * w;
            sr += y_reg[cursor].0 * k * w;
            cursor += 1;
        }
        seg_an.push(sa);
        seg_reg.push(sr);
    }
    for j in 1..nl {
        i1[j] = i1[j - 1] + seg_an[j - 1];
    }
    for j in (0..nl - 1).rev() {
        kk[j] = kk[j + 1] + seg_reg[j];
    }

    // ---- right zone [ρ_m, 1]
    let bstar = reg.edge().max(rho_m);
    let mut right: Vec<f64> = points.iter().copied().filter(|&p| p >= rho_m).collect();
    right.extend([rho_m, bstar, 1.0]);
    right.sort_by(|a, b| a.partial_cmp(b).unwrap());
    right.dedup();
    let nr = right.len();
    let rsegs: Vec<Vec<(f64, f64)>> = right.windows(2).map(|w| panel_rule(w[0], w[1], &gx, &gw)).collect();
    let mut rwant = right.clone();
    rwant.extend(rsegs.iter().flatten().map(|q| q.0));
    let r_reg = sample_solution(&reg, &rwant)?;
    // u_sing only where the series is not used directly
    let mid: Vec<f64> = rwant.iter().copied().filter(|&p| p < bstar).collect();
    let mid_sing = sample_solution(&sing, &mid)?;
    let mut r_sing = Vec::with_capacity(rwant.len());
    let mut it = mid_sing.into_iter();
    for &p in &rwant {
        r_sing.push(if p < bstar { Some(it.next().unwrap()) } else { None });
    }
    // B·u_sing·k, with the endpoint powers cancelled analytically in the series zone
    let ys_k = |idx: usize, s: f64| -> C64 {
        let (big_f, _) = forcing.at(s);
        match r_sing[idx] {
            Some((u, _)) => u * big_b * kern(s),
            None => sing.factored(s).0 * core(s, big_f),
        }
    };
    // g = u_reg F s⁵(1+s)^{λ−3/2}/(2B) and g′
    let g_of = |s: f64, u: C64, du: C64| -> (C64, C64) {
        let (big_f, big_df) = forcing.at(s);
        let base = core(s, C64::new(1.0, 0.0)) / big_b;
        let g = u * big_f * base;
        let dg = (du * big_f + u * big_df + u * big_f * (C64::new(5.0 / s, 0.0) + e / (1.0 + s))) * base;
        (g, dg)
    };
    let mut seg_p = Vec::with_capacity(rsegs.len());
    let mut seg_q = Vec::with_capacity(rsegs.len());
    let mut cursor = nr;
    for (j, seg) in rsegs.iter().enumerate() {
        let mut sp = C64::new(0.0, 0.0);
        let mut sq = C64::new(0.0, 0.0);
        let singular_seg = right[j] >= bstar;
        for &(s, w) in seg {
            sp += ys_k(cursor, s) * w;
            if !singular_seg {
                let (_, dg) = g_of(s, r_reg[cursor].0, r_reg[cursor].1);
                sq += pw(1.0 - s, mu) * dg * w;
            }
            cursor += 1;
        }
        seg_p.push(sp);
        seg_q.push(sq);
    }
    let series_dg = |x: f64| -> C64 {
        let s = 1.0 - x;
        let (u, du) = reg.eval(s);
        g_of(s, u, du).1
    };
    let mut q = vec![C64::new(0.0, 0.0); nr];
    for j in (0..nr - 1).rev() {
        q[j] = if right[j] >= bstar {
            integrate_power_singular(&series_dg, mu, 0.0, 1.0 - right[j])?
        } else {
            q[j + 1] + seg_q[j]
        };
    }
    // I₂ = finite part of ∫_ρ¹ u_reg k, via one integration by parts
    let i2_r: Vec<C64> = (0..nr)
        .map(|j| {
            let s = right[j];
            if s >= 1.0 {
                return C64::new(0.0, 0.0);
            }
            let (g, _) = g_of(s, r_reg[j].0, r_reg[j].1);
            (pw(1.0 - s, mu) * g + q[j]) / mu
        })
        .collect();
    let jm_left = left.iter().position(|&p| p == rho_m).unwrap();
    let i2_m = i2_r[0];
    let p0 = i1[jm_left] + big_a * i2_m;
    let mut p = vec![p0; nr];
    for j in 1..nr {
        p[j] = p[j - 1] + seg_p[j - 1];
    }

    let mut out = Vec::with_capacity(points.len());
    for &x in points {
        if x <= rho_m {
            let j = left.iter().position(|&p| p == x).unwrap();
            let i2 = i2_m + kk[j];
            let (ua, dua) = y_an[j];
            if x == 0.0 {
                out.push((ua * i2, C64::new(0.0, 0.0)));
            } else {
                let (ur, dur) = y_reg[j];
                out.push((ur * i1[j] + ua * i2, dur * i1[j] + dua * i2));
            }
        } else {
            let j = right.iter().position(|&p| p == x).unwrap();
            let (ur, dur) = r_reg[j];
            let (ys, dys) = match r_sing[j] {
                Some((u, du)) => (u * big_b * i2_r[j], du * big_b * i2_r[j]),
                None => {
                    let xx = 1.0 - x;
                    let (s_, ds_, _) = sing.factored(x);
                    let (g, _) = g_of(x, ur, dur);
                    // u_sing(1−ρ)^μ = x·S and u_sing′(1−ρ)^μ = −(σS + xS′)
                    let a1 = s_ * xx * g / mu;
                    let a2 = -(sigma * s_ + ds_ * xx) * g / mu;
                    let (b1, b2) = if xx == 0.0 {
                        (C64::new(0.0, 0.0), C64::new(0.0, 0.0))
                    } else {
                        let px = pw(xx, sigma);
                        (px * s_ * q[j] / mu, -(px * (sigma * s_ / xx + ds_)) * q[j] / mu)
                    };
                    ((a1 + b1) * big_b, (a2 + b2) * big_b)
                }
            };
            out.push((ur * p[j] + ys, dur * p[j] + dys));
        }
    }
    Ok(out)
}

/// Resolvent (λ − L)⁻¹f on the grid of `f`, assembled from the Green function.
pub fn green_resolvent(lambda: C64, f: &StatePair, potential: bool) -> Result<StatePair> {
    let g = f.grid.clone();
    let vals = green_resolvent_points(lambda, f, potential, &g.nodes)?;
    let u1: Vec<C64> = vals.iter().map(|v| v.0).collect();
    let u2: Vec<C64> = vals
        .iter()
        .zip(&g.nodes)
        .zip(&f.phi1)
        .map(|((v, &x), f1)| (lambda + 1.0) * v.0 + v.1 * x - f1)
        .collect();
    Ok(StatePair::new(g, u1, u2)?)
}
