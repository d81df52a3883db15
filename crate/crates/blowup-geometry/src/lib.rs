//! The explicit blowup family u_*^T, similarity coordinates, the gauge mode,
//! and the corotational lift between 4D sphere-valued maps and radial fields.

use std::f64::consts::SQRT_2;
use std::sync::Arc;

use numerics_core::{NumericsError, RadialGrid};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("point (t={t}, r={r}) lies outside the backward light cone of T={big_t}")]
    OutsideCone { t: f64, r: f64, big_t: f64 },
    #[error("range condition |r f| <= 3/2 violated: {0}")]
    Range(f64),
    #[error("reduction domain error: fifth component {0} not bounded away from zero")]
    Reduction(f64),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, GeometryError>;

/// Blowup time T.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowupParam {
    pub t: f64,
}

impl BlowupParam {
    pub fn new(t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(GeometryError::Domain(format!("blowup time must be positive, got {t}")));
        }
        Ok(Self { t })
    }

    /// Cone-interior computations assume T in [1/2, 3/2].
    pub fn check_cone_range(&self) -> Result<()> {
        if !(0.5..=1.5).contains(&self.t) {
            return Err(GeometryError::Domain(format!("T = {} outside [1/2, 3/2]", self.t)));
        }
        Ok(())
    }
}

const SERIES_CUT: f64 = 1e-3;

/// arctan(x)/x and its derivative.
fn atan_over_x(x: f64) -> (f64, f64) {
    if x.abs() < SERIES_CUT {
        let x2 = x * x;
        let a = 1.0 - x2 / 3.0 + x2 * x2 / 5.0 - x2 * x2 * x2 / 7.0 + x2 * x2 * x2 * x2 / 9.0;
        let da = x * (-2.0 / 3.0 + 4.0 * x2 / 5.0 - 6.0 * x2 * x2 / 7.0 + 8.0 * x2 * x2 * x2 / 9.0);
        (a, da)
    } else {
        let a = x.atan() / x;
        (a, (1.0 / (1.0 + x * x) - a) / x)
    }
}

/// u_*^T(t, r) = (2/r) arctan(r / (√2 (T − t))) and its r-derivative.
pub fn profile_physical(t: f64, r: f64, big_t: BlowupParam) -> Result<(f64, f64)> {
    let s = big_t.t - t;
    if !(s > 0.0) {
        return Err(GeometryError::Domain(format!("t = {t} is not before T = {}", big_t.t)));
    }
    if r < 0.0 {
        return Err(GeometryError::Domain(format!("negative radius {r}")));
    }
    let x = r / (SQRT_2 * s);
    let (a, da) = atan_over_x(x);
    Ok((SQRT_2 / s * a, da / (s * s)))
}

/// ∂_t u_*^T(t, r).
pub fn profile_physical_dt(t: f64, r: f64, big_t: BlowupParam) -> Result<f64> {
    let s = big_t.t - t;
    if !(s > 0.0) {
        return Err(GeometryError::Domain(format!("t = {t} is not before T = {}", big_t.t)));
    }
    Ok(2.0 * SQRT_2 / (2.0 * s * s + r * r))
}

/// (ψ*₁, ψ*₂)(ρ) = ((2/ρ) arctan(ρ/√2), 2√2/(ρ² + 2)).
pub fn profile_similarity(rho: f64) -> (f64, f64) {
    let (a, _) = atan_over_x(rho / SQRT_2);
    (SQRT_2 * a, 2.0 * SQRT_2 / (rho * rho + 2.0))
}

/// ∂ρ ψ*₁.
pub fn profile_similarity_deriv(rho: f64) -> f64 {
    let (_, da) = atan_over_x(rho / SQRT_2);
    da
}

/// The λ = 1 eigenfunction g = (1/(2+ρ²), 4/(2+ρ²)²).
pub fn gauge_mode(rho: f64) -> (f64, f64) {
    let q = 2.0 + rho * rho;
    (1.0 / q, 4.0 / (q * q))
}

/// τ = log(T/(T−t)), ρ = r/(T−t).
pub fn to_similarity(t: f64, r: f64, big_t: BlowupParam) -> Result<(f64, f64)> {
    let s = big_t.t - t;
    if t < 0.0 || !(s > 0.0) {
        return Err(GeometryError::Domain(format!("t = {t} outside [0, {})", big_t.t)));
    }
    if r < 0.0 || r > s {
        return Err(GeometryError::OutsideCone { t, r, big_t: big_t.t });
    }
    Ok(((big_t.t / s).ln(), r / s))
}

pub fn from_similarity(tau: f64, rho: f64, big_t: BlowupParam) -> (f64, f64) {
    let s = big_t.t * (-tau).exp();
    (-big_t.t * (-tau).exp_m1(), rho * s)
}

/// Radial data (f, g) sampled on a collocation grid scaled to the ball of
/// radius `radius` (sample i sits at r = radius·ρ_i).
#[derive(Debug, Clone)]
pub struct CorotationalData {
    pub grid: Arc<RadialGrid>,
    pub radius: f64,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub delta: f64,
}

pub const DEFAULT_DELTA: f64 = 0.1;

impl CorotationalData {
    pub fn new(grid: Arc<RadialGrid>, delta: f64, f: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        if f.len() != grid.n || g.len() != grid.n {
            return Err(NumericsError::Usage("data length does not match grid".into()).into());
        }
        let data = Self { radius: 1.0 + delta, grid, f, g, delta };
        data.check_range()?;
        Ok(data)
    }

    pub fn from_fn(
        grid: Arc<RadialGrid>,
        delta: f64,
        f: impl Fn(f64) -> f64,
        g: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let radius = 1.0 + delta;
        let fs = grid.nodes.iter().map(|&x| f(radius * x)).collect();
        let gs = grid.nodes.iter().map(|&x| g(radius * x)).collect();
        Self::new(grid, delta, fs, gs)
    }

    /// u_*^T[0] = (u_*^T(0,·), ∂_t u_*^T(0,·)).
    pub fn exact_family(grid: Arc<RadialGrid>, delta: f64, big_t: BlowupParam) -> Result<Self> {
        Self::from_fn(
            grid,
            delta,
            |r| profile_physical(0.0, r, big_t).map(|v| v.0).unwrap_or(f64::NAN),
            |r| profile_physical_dt(0.0, r, big_t).unwrap_or(f64::NAN),
        )
    }

    pub fn radii(&self) -> Vec<f64> {
        self.grid.nodes.iter().map(|x| x * self.radius).collect()
    }

    pub fn check_range(&self) -> Result<()> {
        for (r, f) in self.radii().iter().zip(&self.f) {
            if !f.is_finite() || (r * f).abs() > 1.5 {
                return Err(GeometryError::Range(r * f));
            }
        }
        Ok(())
    }

    /// f at radius r (spectral interpolation).
    pub fn f_at(&self, r: f64) -> Result<f64> {
        self.sample_at(&self.f, r)
    }

    pub fn g_at(&self, r: f64) -> Result<f64> {
        self.sample_at(&self.g, r)
    }

    fn sample_at(&self, v: &[f64], r: f64) -> Result<f64> {
        if r < 0.0 || r > self.radius * (1.0 + 1e-14) {
            return Err(GeometryError::Domain(format!("radius {r} outside data ball {}", self.radius)));
        }
        Ok(self.grid.interpolate_real(v, (r / self.radius).min(1.0)))
    }
}

/// Sphere-valued data along the ray x̂ = e₁: F(r e₁), G(r e₁) ∈ ℝ⁵.
#[derive(Debug, Clone)]
pub struct SphereData {
    pub grid: Arc<RadialGrid>,
    pub radius: f64,
    pub delta: f64,
    pub f_map: Vec<[f64; 5]>,
    pub g_map: Vec<[f64; 5]>,
}

impl SphereData {
    /// max over samples of ||F|² − 1| and |F·G|
    pub fn invariant_defects(&self) -> (f64, f64) {
        let mut norm_def: f64 = 0.0;
        let mut tan_def: f64 = 0.0;
        for (f, g) in self.f_map.iter().zip(&self.g_map) {
            let n2: f64 = f.iter().map(|v| v * v).sum();
            let dot: f64 = f.iter().zip(g).map(|(a, b)| a * b).sum();
            norm_def = norm_def.max((n2 - 1.0).abs());
            tan_def = tan_def.max(dot.abs());
        }
        (norm_def, tan_def)
    }
}

/// U = (sin(r f) x̂, cos(r f)), ∂_t U = r g (cos(r f) x̂, −sin(r f)).
pub fn lift_corotational(data: &CorotationalData) -> Result<SphereData> {
    data.check_range()?;
    let radii = data.radii();
    let mut f_map = Vec::with_capacity(radii.len());
    let mut g_map = Vec::with_capacity(radii.len());
    for ((r, f), g) in radii.iter().zip(&data.f).zip(&data.g) {
        let (s, c) = (r * f).sin_cos();
        let w = r * g;
        f_map.push([s, 0.0, 0.0, 0.0, c]);
        g_map.push([w * c, 0.0, 0.0, 0.0, -w * s]);
    }
    Ok(SphereData { grid: data.grid.clone(), radius: data.radius, delta: data.delta, f_map, g_map })
}

/// Inverse of the lift: θ = arctan(F₁/F₅), f = θ/r, g = θ_t/r, with the
/// origin values taken as r-derivatives of θ and θ_t.
pub fn reduce_corotational(data: &SphereData) -> Result<CorotationalData> {
    let min_c = data.f_map.iter().map(|f| f[4]).fold(f64::INFINITY, f64::min);
    if !(min_c > 1e-8) {
        return Err(GeometryError::Reduction(min_c));
    }
    let theta: Vec<f64> = data.f_map.iter().map(|f| f[0].atan2(f[4])).collect();
    let theta_t: Vec<f64> = data
        .f_map
        .iter()
        .zip(&data.g_map)
        .zip(&theta)
        .map(|((_, g), th)| {
            let (s, c) = th.sin_cos();
            g[0] * c - g[4] * s
        })
        .collect();
    let grid = &data.grid;
    let d_theta = grid.diff1_real(&theta);
    let d_theta_t = grid.diff1_real(&theta_t);
    let radii: Vec<f64> = grid.nodes.iter().map(|x| x * data.radius).collect();
    let f = (0..grid.n)
        .map(|i| if i == 0 { d_theta[0] / data.radius } else { theta[i] / radii[i] })
        .collect();
    let g = (0..grid.n)
        .map(|i| if i == 0 { d_theta_t[0] / data.radius } else { theta_t[i] / radii[i] })
        .collect();
    CorotationalData::new(data.grid.clone(), data.delta, f, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use numerics_core::build_grid;

    const T1: BlowupParam = BlowupParam { t: 1.0 };

    #[test]
    fn profile_values() {
        let (u, _) = profile_physical(0.0, 1e-9, T1).unwrap();
        assert!((u - SQRT_2).abs() < 1e-15);
        let (u, _) = profile_physical(0.0, 1.0, T1).unwrap();
        assert!((u - 1.230_959_417_340_774_7).abs() < 1e-14);
        assert!(profile_physical(1.0, 0.3, T1).is_err());
    }

    #[test]
    fn self_similarity() {
        let (t, r) = (0.5, 0.25);
        let (a, _) = profile_physical(t, r, T1).unwrap();
        let (b, _) = profile_physical(0.0, r / (1.0 - t), T1).unwrap();
        assert!((a - b / (1.0 - t)).abs() < 1e-14);
    }

    #[test]
    fn derivative_by_differences() {
        for &(t, r) in &[(0.2, 0.3), (0.0, 1e-4), (0.7, 2.0)] {
            let h = 1e-5;
            let f = |x: f64| profile_physical(t, x, T1).unwrap().0;
            let fd = (f(r + h) - f(r - h)) / (2.0 * h);
            let (_, d) = profile_physical(t, r, T1).unwrap();
            assert!((d - fd).abs() < 1e-8);
            let g = |s: f64| profile_physical(s, r, T1).unwrap().0;
            let ft = (g(t + h) - g(t - h)) / (2.0 * h);
            assert!((profile_physical_dt(t, r, T1).unwrap() - ft).abs() < 1e-7);
        }
    }

    #[test]
    fn similarity_profile() {
        let (a, b) = profile_similarity(0.0);
        assert!((a - SQRT_2).abs() < 1e-15 && (b - SQRT_2).abs() < 1e-15);
        let (a, b) = profile_similarity(1.0);
        assert!((a - 1.230_959_417_340_774_7).abs() < 1e-14);
        assert!((b - 0.942_809_041_582_063_4).abs() < 1e-15);
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            let (p1, p2) = profile_similarity(x);
            assert!((p2 - p1 - x * profile_similarity_deriv(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn gauge_values() {
        assert_eq!(gauge_mode(0.0), (0.5, 1.0));
        let (a, b) = gauge_mode(1.0);
        assert!((a - 1.0 / 3.0).abs() < 1e-16 && (b - 4.0 / 9.0).abs() < 1e-16);
    }

    #[test]
    fn similarity_coordinates() {
        assert_eq!(to_similarity(0.0, 0.0, T1).unwrap(), (0.0, 0.0));
        let e = (-1.0f64).exp();
        let (tau, rho) = to_similarity(1.0 - e, 0.5 * e, T1).unwrap();
        assert!((tau - 1.0).abs() < 1e-14 && (rho - 0.5).abs() < 1e-14);
        assert!(matches!(to_similarity(0.5, 0.6, T1), Err(GeometryError::OutsideCone { .. })));
    }

    #[test]
    fn lift_zero_and_profile() {
        let g = Arc::new(build_grid(16).unwrap());
        let zero = CorotationalData::from_fn(g.clone(), 0.1, |_| 0.0, |_| 0.0).unwrap();
        let s = lift_corotational(&zero).unwrap();
        assert!(s.f_map.iter().all(|f| *f == [0.0, 0.0, 0.0, 0.0, 1.0]));
        assert!(s.g_map.iter().all(|v| v.iter().all(|x| *x == 0.0)));

        let ex = CorotationalData::exact_family(g, 0.0, T1).unwrap();
        let s = lift_corotational(&ex).unwrap();
        let last = s.f_map.last().unwrap();
        assert!((last[4] - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn range_violation() {
        let g = Arc::new(build_grid(16).unwrap());
        assert!(matches!(
            CorotationalData::from_fn(g, 0.1, |_| 2.0, |_| 0.0),
            Err(GeometryError::Range(_))
        ));
    }

    #[test]
    fn reduction_domain() {
        let g = Arc::new(build_grid(16).unwrap());
        let d = CorotationalData::from_fn(g, 0.1, |_| 0.5, |_| 0.0).unwrap();
        let mut s = lift_corotational(&d).unwrap();
        s.f_map[5] = [1.0, 0.0, 0.0, 0.0, 0.0];
        assert!(matches!(reduce_corotational(&s), Err(GeometryError::Reduction(_))));
    }
}
