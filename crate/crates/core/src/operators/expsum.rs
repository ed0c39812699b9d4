use ndarray::{Array3, Array4};

use super::convdiff::ASSEMBLY_EPS;
use super::stencil::{laplace_eigen, Grid1D};
use crate::error::{Error, Result};
use crate::round::{round, TruncationSpec};
use crate::tt::{TtMatrix, TtTensor};

/// Sinc-quadrature nodes `(t_k, c_k) = (e^{kη}, η·e^{kη})`, `η = π/√M`, `k = −M..=M`, for
/// `1/λ ≈ Σ_k c_k e^{−t_k λ}`.
pub fn expsum_nodes(m: usize) -> Result<Vec<(f64, f64)>> {
    if m == 0 {
        return Err(Error::InvalidParameter("quadrature half-width must be ≥ 1".into()));
    }
    let eta = std::f64::consts::PI / (m as f64).sqrt();
    let m = m as i64;
    Ok((-m..=m)
        .map(|k| {
            let t = (k as f64 * eta).exp();
            (t, eta * t)
        })
        .collect())
}

/// Approximate inverse of the `d`-dimensional Dirichlet Laplacian (a positive operator) on
/// the tensor grid `g^d`, as `Σ_k c_k ⊗_p exp(−t_k L_p)`.
///
/// Each 1D exponential comes from the analytic sine eigenbasis; the sum is assembled as a
/// diagonal in that basis, rounded at [`ASSEMBLY_EPS`], and conjugated back.
pub fn inv_laplace_expsum_on(g: &Grid1D, d: usize, m: usize) -> Result<TtMatrix> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be ≥ 1".into()));
    }
    let nodes = expsum_nodes(m)?;
    let (lambda, vecs) = laplace_eigen(g);
    let n = g.n();
    let kk = nodes.len();
    let factor = |k: usize, l: usize| (-nodes[k].0 * lambda[l]).exp();
    let cores: Vec<Array3<f64>> = if d == 1 {
        vec![Array3::from_shape_fn((1, n, 1), |(_, l, _)| {
            (0..kk).map(|k| nodes[k].1 * factor(k, l)).sum()
        })]
    } else {
        (0..d)
            .map(|p| {
                if p == 0 {
                    Array3::from_shape_fn((1, n, kk), |(_, l, k)| nodes[k].1 * factor(k, l))
                } else if p == d - 1 {
                    Array3::from_shape_fn((kk, n, 1), |(k, l, _)| factor(k, l))
                } else {
                    Array3::from_shape_fn((kk, n, kk), |(a, l, b)| if a == b { factor(a, l) } else { 0.0 })
                }
            })
            .collect()
    };
    let diag = round(&TtTensor::new(cores)?, &TruncationSpec::new(ASSEMBLY_EPS)?)?;
    let cores = diag
        .cores()
        .iter()
        .map(|c| {
            let (r0, _, r1) = c.dim();
            Array4::from_shape_fn((r0, n, n, r1), |(a, i, j, b)| {
                (0..n).map(|l| vecs[[i, l]] * c[[a, l, b]] * vecs[[j, l]]).sum()
            })
        })
        .collect();
    TtMatrix::new(cores)
}

/// [`inv_laplace_expsum_on`] for the symmetric grid with `n` interior points per axis.
pub fn inv_laplace_expsum(n: usize, d: usize, m: usize) -> Result<TtMatrix> {
    inv_laplace_expsum_on(&Grid1D::symmetric(n)?, d, m)
}
