//! Flat `key = value` configuration. Blank lines and `#` comments are
//! ignored; lists are comma separated.
//!
//! | key | meaning | default |
//! |---|---|---|
//! | `n` | collocation points for evolution and modulation | 32 |
//! | `dt_factor` | time step is dt_factor/n² | 0.5 |
//! | `tau_max` | similarity-time horizon | 8 |
//! | `deltas` | perturbation sizes, strictly decreasing | 0.01,0.005,0.0025 |
//! | `omega_max` | largest ω in the connection fit | 100 |
//! | `strip` | re_min,re_max,im_min,im_max of the mode scan | 0,0.25,-20,20 |
//! | `parity_tol` | allowed odd part of evolved states | 1e-8 |
//! | `match_tol` | eigenvalue match between resolutions | 1e-4 |
//! | `residual_tol` | eigenvector ODE residual | 1e-5 |
//! | `out_dir` | artifact directory | out |
//! | `seed` | seed for random sample sets | 20240611 |
//! | `workers` | worker threads, 0 for one per core | 0 |

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabConfig {
    pub n: usize,
    pub dt_factor: f64,
    pub tau_max: f64,
    pub deltas: Vec<f64>,
    pub omega_max: f64,
    pub strip: [f64; 4],
    pub parity_tol: f64,
    pub match_tol: f64,
    pub residual_tol: f64,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub workers: usize,
}

impl Default for LabConfig {
    fn default() -> Self {
        Self {
            n: 32,
            dt_factor: 0.5,
            tau_max: 8.0,
            deltas: vec![1e-2, 5e-3, 2.5e-3],
            omega_max: 100.0,
            strip: [0.0, 0.25, -20.0, 20.0],
            parity_tol: 1e-8,
            match_tol: 1e-4,
            residual_tol: 1e-5,
            out_dir: PathBuf::from("out"),
            seed: 20240611,
            workers: 0,
        }
    }
}

fn floats(v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|s| s.trim().parse::<f64>().with_context(|| format!("bad number {s:?}"))).collect()
}

impl LabConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').with_context(|| format!("line {}: expected key = value", i + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let ctx = || format!("line {}: key {key}", i + 1);
            match key {
                "n" => cfg.n = value.parse().with_context(ctx)?,
                "dt_factor" => cfg.dt_factor = value.parse().with_context(ctx)?,
                "tau_max" => cfg.tau_max = value.parse().with_context(ctx)?,
                "deltas" => cfg.deltas = floats(value).with_context(ctx)?,
                "omega_max" => cfg.omega_max = value.parse().with_context(ctx)?,
                "strip" => {
                    let v = floats(value).with_context(ctx)?;
                    if v.len() != 4 {
                        bail!("line {}: strip needs four numbers", i + 1);
                    }
                    cfg.strip = [v[0], v[1], v[2], v[3]];
                }
                "parity_tol" => cfg.parity_tol = value.parse().with_context(ctx)?,
                "match_tol" => cfg.match_tol = value.parse().with_context(ctx)?,
                "residual_tol" => cfg.residual_tol = value.parse().with_context(ctx)?,
                "out_dir" => cfg.out_dir = PathBuf::from(value),
                "seed" => cfg.seed = value.parse().with_context(ctx)?,
                "workers" => cfg.workers = value.parse().with_context(ctx)?,
                other => bail!("line {}: unknown key {other:?}", i + 1),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 16 {
            bail!("n must be at least 16, got {}", self.n);
        }
        for (name, v) in [
            ("dt_factor", self.dt_factor),
            ("tau_max", self.tau_max),
            ("omega_max", self.omega_max),
            ("parity_tol", self.parity_tol),
            ("match_tol", self.match_tol),
            ("residual_tol", self.residual_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                bail!("{name} must be positive, got {v}");
            }
        }
        if self.deltas.is_empty() || self.deltas.iter().any(|&d| !(d > 0.0)) {
            bail!("deltas must be positive");
        }
        if self.deltas.windows(2).any(|w| w[1] >= w[0]) {
            bail!("deltas must be strictly decreasing");
        }
        let [a, b, c, d] = self.strip;
        if !(a < b && c < d) {
            bail!("strip rectangle is degenerate");
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.dt_factor / (self.n * self.n) as f64
    }
}
