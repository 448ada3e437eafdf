//! Uniform Lagrangian mesh on `[0, 1]` and the finite-difference stencils
//! built on it.
//!
//! Two first-derivative operators are provided:
//!
//! * [`Grid1D::ddx`] is the solver operator: central differences inside and
//!   the first-order one-sided closure at the two boundary nodes. Paired with
//!   the trapezoidal weights of [`Grid1D::trapz`] it satisfies the
//!   summation-by-parts identity
//!   `sum w_i (f Dg + g Df)_i = f g |_0^1`, which makes the discrete mass and
//!   energy balances exact.
//! * [`Grid1D::ddx_o2`] uses second-order one-sided stencils at the boundary
//!   and is used for norms and for compatibility measurements.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_NODES: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    n: usize,
    dx: f64,
    x: Vec<f64>,
}

impl Grid1D {
    pub fn new(n: usize) -> Result<Self> {
        if n < MIN_NODES {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least {MIN_NODES} nodes, got {n}"
            )));
        }
        let cells = (n - 1) as f64;
        let x = (0..n).map(|i| i as f64 / cells).collect();
        Ok(Self {
            n,
            dx: 1.0 / cells,
            x,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// Samples `f` at every node.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.x.iter().map(|&x| f(x)).collect()
    }

    /// Trapezoidal quadrature of nodal values over `[0, 1]`.
    pub fn trapz(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.n);
        let inner: f64 = f[1..self.n - 1].iter().sum();
        self.dx * (inner + 0.5 * (f[0] + f[self.n - 1]))
    }

    /// Trapezoidal quadrature of `f(values[i])`.
    pub fn trapz_map(&self, f: &[f64], g: impl Fn(f64) -> f64) -> f64 {
        let n = self.n;
        let inner: f64 = f[1..n - 1].iter().map(|&y| g(y)).sum();
        self.dx * (inner + 0.5 * (g(f[0]) + g(f[n - 1])))
    }

    /// Summation-by-parts first derivative (see module docs).
    pub fn ddx_into(&self, f: &[f64], out: &mut [f64]) {
        let n = self.n;
        let h = self.dx;
        let h2 = 0.5 / h;
        out[0] = (f[1] - f[0]) / h;
        for i in 1..n - 1 {
            out[i] = (f[i + 1] - f[i - 1]) * h2;
        }
        out[n - 1] = (f[n - 1] - f[n - 2]) / h;
    }

    pub fn ddx(&self, f: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.ddx_into(f, &mut out);
        out
    }

    /// First derivative, second order everywhere (one-sided at the ends).
    pub fn ddx_o2(&self, f: &[f64]) -> Vec<f64> {
        let n = self.n;
        let h2 = 0.5 / self.dx;
        let mut out = vec![0.0; n];
        out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * h2;
        for i in 1..n - 1 {
            out[i] = (f[i + 1] - f[i - 1]) * h2;
        }
        out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * h2;
        out
    }

    /// Compact second difference, second-order one-sided at the ends.
    pub fn d2dx2(&self, f: &[f64]) -> Vec<f64> {
        let n = self.n;
        let ih2 = 1.0 / (self.dx * self.dx);
        let mut out = vec![0.0; n];
        out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * ih2;
        for i in 1..n - 1 {
            out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) * ih2;
        }
        out[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) * ih2;
        out
    }

    /// Second-order upwind derivative of `f` for the transport velocity
    /// `speed[i]`: backward-biased where the speed is positive, forward-biased
    /// where it is negative. With `b(0) = -1` and `b(1) = 1` the stencil
    /// never needs a value outside the grid.
    pub fn ddx_upwind_into(&self, f: &[f64], speed: &[f64], out: &mut [f64]) {
        let n = self.n;
        let h2 = 0.5 / self.dx;
        for i in 0..n {
            let c = speed[i];
            out[i] = if c > 0.0 && i >= 2 {
                (3.0 * f[i] - 4.0 * f[i - 1] + f[i - 2]) * h2
            } else if c < 0.0 && i + 2 < n {
                (-3.0 * f[i] + 4.0 * f[i + 1] - f[i + 2]) * h2
            } else if c > 0.0 {
                (f[i] - f[i - 1]) / self.dx
            } else if c < 0.0 {
                (f[i + 1] - f[i]) / self.dx
            } else {
                0.0
            };
        }
    }
}
