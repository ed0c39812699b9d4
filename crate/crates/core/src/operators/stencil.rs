use std::f64::consts::PI;

use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{Error, Result};

/// Uniform grid of `n` interior points `left + (i+1)·h`, `i = 0..n`, with homogeneous
/// Dirichlet ends at `left` and `left + (n+1)·h`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    n: usize,
    h: f64,
    left: f64,
}

impl Grid1D {
    pub fn new(n: usize, h: f64, left: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("grid needs n ≥ 2, got {n}")));
        }
        if !(h > 0.0) || !h.is_finite() || !left.is_finite() {
            return Err(Error::InvalidParameter(format!("bad mesh width {h} or origin {left}")));
        }
        Ok(Grid1D { n, h, left })
    }

    /// `n` interior points of `[0, 1]`, `h = 1/(n+1)`.
    pub fn unit(n: usize) -> Result<Self> {
        Grid1D::new(n, 1.0 / (n as f64 + 1.0), 0.0)
    }

    /// `n` interior points of `[−1, 1]`, `h = 2/(n+1)`.
    pub fn symmetric(n: usize) -> Result<Self> {
        Grid1D::new(n, 2.0 / (n as f64 + 1.0), -1.0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn left(&self) -> f64 {
        self.left
    }

    pub fn right(&self) -> f64 {
        self.left + (self.n as f64 + 1.0) * self.h
    }

    pub fn node(&self, i: usize) -> f64 {
        self.left + (i as f64 + 1.0) * self.h
    }

    pub fn nodes(&self) -> Array1<f64> {
        Array1::from_iter((0..self.n).map(|i| self.node(i)))
    }

    /// The `n + 1` cell midpoints `left + (i + ½)·h`, `i = 0..=n`.
    pub fn midpoints(&self) -> Array1<f64> {
        Array1::from_iter((0..=self.n).map(|i| self.left + (i as f64 + 0.5) * self.h))
    }
}

/// `(1/h²)·tridiag(−1, 2, −1)`.
pub fn laplace_1d(g: &Grid1D) -> Array2<f64> {
    let n = g.n;
    let s = 1.0 / (g.h * g.h);
    Array2::from_shape_fn((n, n), |(i, j)| match i.abs_diff(j) {
        0 => 2.0 * s,
        1 => -s,
        _ => 0.0,
    })
}

/// `(1/h)·tridiag(−½, 0, ½)`.
pub fn grad_1d(g: &Grid1D) -> Array2<f64> {
    let n = g.n;
    let s = 0.5 / g.h;
    Array2::from_shape_fn((n, n), |(i, j)| {
        if j == i + 1 {
            s
        } else if i == j + 1 {
            -s
        } else {
            0.0
        }
    })
}

/// Eigenpairs of [`laplace_1d`]: eigenvalues `(2/h²)(1 − cos(πk/(n+1)))`, ascending, and the
/// orthonormal sine vectors as columns.
pub fn laplace_eigen(g: &Grid1D) -> (Array1<f64>, Array2<f64>) {
    let n = g.n;
    let np1 = n as f64 + 1.0;
    let lambda = Array1::from_iter(
        (1..=n).map(|k| 2.0 / (g.h * g.h) * (1.0 - (PI * k as f64 / np1).cos())),
    );
    let c = (2.0 / np1).sqrt();
    let vecs = Array2::from_shape_fn((n, n), |(i, k)| {
        c * (PI * (i + 1) as f64 * (k + 1) as f64 / np1).sin()
    });
    (lambda, vecs)
}

/// Conservative stiffness `(Γu)_i = −(a_{i+½}(u_{i+1} − u_i) − a_{i−½}(u_i − u_{i−1}))/h²` with
/// Dirichlet ends; `mid` holds the `n + 1` midpoint values.
pub fn stiffness_1d(g: &Grid1D, mid: ArrayView1<f64>) -> Result<Array2<f64>> {
    let n = g.n;
    if mid.len() != n + 1 {
        return Err(Error::ShapeMismatch {
            context: "stiffness midpoint values",
            expected: vec![n + 1],
            found: vec![mid.len()],
        });
    }
    let s = 1.0 / (g.h * g.h);
    Ok(Array2::from_shape_fn((n, n), |(i, j)| {
        if i == j {
            (mid[i] + mid[i + 1]) * s
        } else if j == i + 1 {
            -mid[i + 1] * s
        } else if i == j + 1 {
            -mid[i] * s
        } else {
            0.0
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_tiny_n() {
        assert!(Grid1D::unit(1).is_err());
        assert!(Grid1D::new(4, 0.0, 0.0).is_err());
    }

    #[test]
    fn symmetric_grid_spans_the_interval() {
        let g = Grid1D::symmetric(7).unwrap();
        assert!((g.right() - 1.0).abs() < 1e-15);
        assert!(g.node(3).abs() < 1e-15);
        assert_eq!(g.midpoints().len(), 8);
    }

    #[test]
    fn unit_coefficient_stiffness_is_the_laplacian() {
        let g = Grid1D::unit(5).unwrap();
        let k = stiffness_1d(&g, Array1::ones(6).view()).unwrap();
        assert_eq!(k, laplace_1d(&g));
    }
}
