//! Reference solutions for the boundary-value problem: the separation-of-variables
//! Fourier series and an independent 5-point SOR solver.
//!
//! Both use the same boundary data as training: `u = 1` on the open top side,
//! `u = 0` on the other sides and at the two top corners.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sampling::EXCITATION;

/// Scalar field on the `n × n` uniform grid over the unit square.
///
/// `values[j * n + i]` is the value at `x = i / (n - 1)`, `y = j / (n - 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    n: usize,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config(format!("grid size must be at least 2, got {n}")));
        }
        if values.len() != n * n {
            return Err(Error::SizeMismatch {
                left: values.len(),
                right: n * n,
            });
        }
        Ok(GridField { n, values })
    }

    /// Fills the grid by evaluating `f(x, y)` at every node, in parallel.
    pub fn from_fn(n: usize, f: impl Fn(f64, f64) -> f64 + Sync) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config(format!("grid size must be at least 2, got {n}")));
        }
        let mut values = vec![0.0; n * n];
        values.par_chunks_mut(n).enumerate().for_each(|(j, row)| {
            let y = grid_coord(j, n);
            for (i, v) in row.iter_mut().enumerate() {
                *v = f(grid_coord(i, n), y);
            }
        });
        Ok(GridField { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.n + i]
    }

    /// Coordinate of grid line `k`.
    pub fn coord(&self, k: usize) -> f64 {
        grid_coord(k, self.n)
    }
}

pub(crate) fn grid_coord(k: usize, n: usize) -> f64 {
    k as f64 / (n - 1) as f64
}

/// Truncated Fourier series of the exact solution using the first `n_terms`
/// odd harmonics.
///
/// Points on the boundary return the boundary datum, so `y = 1` gives 1 for
/// `0 < x < 1` and the side walls (including the top corners) give 0.
pub fn series_solution(x: f64, y: f64, n_terms: usize) -> f64 {
    if x <= 0.0 || x >= 1.0 || y <= 0.0 {
        return 0.0;
    }
    if y >= 1.0 {
        return EXCITATION;
    }
    let mut sum = 0.0;
    for k in 0..n_terms {
        let n = (2 * k + 1) as f64;
        let a = n * PI;
        // sinh(a y) / sinh(a) = e^{a(y-1)} (1 - e^{-2ay}) / (1 - e^{-2a})
        let ratio = (a * (y - 1.0)).exp() * (-(-2.0 * a * y).exp_m1()) / (-(-2.0 * a).exp_m1());
        sum += 4.0 / a * (a * x).sin() * ratio;
    }
    EXCITATION * sum
}

pub fn oracle_grid(n: usize, n_terms: usize) -> Result<GridField> {
    GridField::from_fn(n, |x, y| series_solution(x, y, n_terms))
}

/// Solves the 5-point discrete Laplace system by row-major SOR with the
/// optimal relaxation factor for the square, stopping once the largest nodal
/// update in a sweep is at most `tol`.
pub fn fd_solve(n: usize, max_sweeps: usize, tol: f64) -> Result<GridField> {
    if n < 3 {
        return Err(Error::Config(format!("fd_solve needs n >= 3, got {n}")));
    }
    if !(tol >= 0.0) {
        return Err(Error::Config(format!("tolerance must be non-negative, got {tol}")));
    }
    let mut u = vec![0.0; n * n];
    let top = (n - 1) * n;
    for v in &mut u[top + 1..top + n - 1] {
        *v = EXCITATION;
    }
    let omega = 2.0 / (1.0 + (PI / (n - 1) as f64).sin());
    let mut residual = f64::INFINITY;
    for _ in 0..max_sweeps {
        residual = 0.0;
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                let k = j * n + i;
                let gs = 0.25 * (u[k - 1] + u[k + 1] + u[k - n] + u[k + n]);
                let delta = omega * (gs - u[k]);
                u[k] += delta;
                residual = f64::max(residual, delta.abs());
            }
        }
        if residual <= tol {
            return GridField::new(n, u);
        }
    }
    Err(Error::NonConvergence {
        sweeps: max_sweeps,
        residual,
    })
}
