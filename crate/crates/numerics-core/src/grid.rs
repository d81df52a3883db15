use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::{NumericsError, Result, C64};

/// Chebyshev–Gauss–Lobatto collocation grid on [0, 1].
#[derive(Debug, Clone)]
pub struct RadialGrid {
    pub n: usize,
    pub nodes: Vec<f64>,
    pub d1: DMatrix<f64>,
    pub d2: DMatrix<f64>,
    pub quad_weights: Vec<f64>,
    bary: Vec<f64>,
}

pub fn build_grid(n: usize) -> Result<RadialGrid> {
    RadialGrid::new(n)
}

impl RadialGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 {
            return Err(NumericsError::Config(format!("grid needs n >= 8, got {n}")));
        }
        let big_n = n - 1;
        let h = PI / (2.0 * big_n as f64);
        // rho_i = sin^2(i*pi/(2N)) avoids cancellation near the origin
        let nodes: Vec<f64> = (0..n)
            .map(|i| {
                if i == big_n {
                    1.0
                } else {
                    let s = (i as f64 * h).sin();
                    s * s
                }
            })
            .collect();

        let c = |i: usize| if i == 0 || i == big_n { 2.0 } else { 1.0 };
        // x_i - x_j for x_i = cos(i*pi/N), via product formula
        let dx = |i: usize, j: usize| -> f64 {
            -2.0 * (((i + j) as f64) * h).sin() * (((i as f64) - (j as f64)) * h).sin()
        };

        let mut dx1 = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                    dx1[(i, j)] = c(i) / c(j) * sign / dx(i, j);
                }
            }
        }
        negative_sum_diagonal(&mut dx1);

        let mut dx2 = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    dx2[(i, j)] = 2.0 * dx1[(i, j)] * (dx1[(i, i)] - 1.0 / dx(i, j));
                }
            }
        }
        negative_sum_diagonal(&mut dx2);

        // rho = (1 - x)/2, so d/drho = -2 d/dx
        let d1 = dx1 * -2.0;
        let d2 = dx2 * 4.0;

        let quad_weights = clenshaw_curtis(big_n).into_iter().map(|w| 0.5 * w).collect();
        let bary = (0..n)
            .map(|j| {
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                if j == 0 || j == big_n {
                    0.5 * s
                } else {
                    s
                }
            })
            .collect();

        Ok(Self { n, nodes, d1, d2, quad_weights, bary })
    }

    pub fn diff1(&self, f: &[C64]) -> Vec<C64> {
        apply(&self.d1, f)
    }

    pub fn diff2(&self, f: &[C64]) -> Vec<C64> {
        apply(&self.d2, f)
    }

    pub fn diff1_real(&self, f: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.d1[(i, j)] * f[j]).sum()).collect()
    }

    /// `f'' + (m/rho) f'`, with the row at rho = 0 replaced by `(m+1) f''(0)`.
    pub fn radial_laplacian(&self, f: &[C64], m: f64) -> Vec<C64> {
        let f1 = self.diff1(f);
        let f2 = self.diff2(f);
        (0..self.n)
            .map(|i| {
                if i == 0 {
                    f2[0] * (m + 1.0)
                } else {
                    f2[i] + f1[i] * (m / self.nodes[i])
                }
            })
            .collect()
    }

    /// Matrix form of [`radial_laplacian`](Self::radial_laplacian).
    pub fn radial_laplacian_matrix(&self, m: f64) -> DMatrix<f64> {
        let mut out = self.d2.clone();
        for j in 0..self.n {
            out[(0, j)] = (m + 1.0) * self.d2[(0, j)];
        }
        for i in 1..self.n {
            let s = m / self.nodes[i];
            for j in 0..self.n {
                out[(i, j)] += s * self.d1[(i, j)];
            }
        }
        out
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.quad_weights.iter().zip(f).map(|(w, v)| w * v).sum()
    }

    pub fn integrate_c(&self, f: &[C64]) -> C64 {
        self.quad_weights.iter().zip(f).map(|(w, v)| v * *w).sum()
    }

    /// Barycentric row for evaluating the interpolant at `x`.
    pub fn interp_row(&self, x: f64) -> Vec<f64> {
        let mut row = vec![0.0; self.n];
        for (j, &xj) in self.nodes.iter().enumerate() {
            if x == xj {
                row[j] = 1.0;
                return row;
            }
        }
        let mut denom = 0.0;
        for j in 0..self.n {
            let t = self.bary[j] / (x - self.nodes[j]);
            row[j] = t;
            denom += t;
        }
        for r in row.iter_mut() {
            *r /= denom;
        }
        row
    }

    pub fn interp_matrix(&self, xs: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::<f64>::zeros(xs.len(), self.n);
        for (i, &x) in xs.iter().enumerate() {
            for (j, v) in self.interp_row(x).into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn interpolate(&self, f: &[C64], x: f64) -> C64 {
        self.interp_row(x).iter().zip(f).map(|(w, v)| v * *w).sum()
    }

    pub fn interpolate_real(&self, f: &[f64], x: f64) -> f64 {
        self.interp_row(x).iter().zip(f).map(|(w, v)| v * w).sum()
    }

    /// Weights c_j (c_0 = 0) with f(0) = Σ c_j f_j whenever (d1 f)(0) = 0.
    pub fn regularity_row(&self) -> Vec<f64> {
        let d00 = self.d1[(0, 0)];
        let mut row: Vec<f64> = (0..self.n).map(|j| -self.d1[(0, j)] / d00).collect();
        row[0] = 0.0;
        row
    }

    /// Overwrite f(0) so that the interpolant has zero slope at the origin.
    pub fn regularize(&self, f: &mut [C64]) {
        let d00 = self.d1[(0, 0)];
        let mut acc = C64::new(0.0, 0.0);
        for j in 1..self.n {
            acc += f[j] * self.d1[(0, j)];
        }
        f[0] = -acc / d00;
    }

    pub fn same_as(&self, other: &RadialGrid) -> bool {
        self.n == other.n
    }
}

fn negative_sum_diagonal(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        let mut off: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| m[(i, j)]).collect();
        off.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap());
        m[(i, i)] = -off.iter().sum::<f64>();
    }
}

fn apply(m: &DMatrix<f64>, f: &[C64]) -> Vec<C64> {
    let n = m.nrows();
    (0..n)
        .map(|i| {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..m.ncols() {
                acc += f[j] * m[(i, j)];
            }
            acc
        })
        .collect()
}

/// Clenshaw–Curtis weights on [-1, 1] at x_k = cos(k*pi/N).
fn clenshaw_curtis(big_n: usize) -> Vec<f64> {
    let nf = big_n as f64;
    (0..=big_n)
        .map(|k| {
            let theta = k as f64 * PI / nf;
            let ck = if k == 0 || k == big_n { 1.0 } else { 2.0 };
            let mut s = 0.0;
            for j in 1..=big_n / 2 {
                let bj = if 2 * j == big_n { 1.0 } else { 2.0 };
                let jf = j as f64;
                s += bj / (4.0 * jf * jf - 1.0) * (2.0 * jf * theta).cos();
            }
            ck / nf * (1.0 - s)
        })
        .collect()
}
