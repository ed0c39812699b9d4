use ndarray::{Array1, Array2};

use super::stencil::{grad_1d, laplace_1d, Grid1D};
use crate::error::{Error, Result};
use crate::round::{round_matrix, TruncationSpec};
use crate::tt::{KronTerm, TtMatrix, TtTensor};

/// Rounding applied to assembled operators.
pub const ASSEMBLY_EPS: f64 = 1e-12;

fn check(n: usize, alpha: f64) -> Result<Grid1D> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    Grid1D::symmetric(n)
}

fn diag(v: &Array1<f64>) -> Array2<f64> {
    Array2::from_diag(v)
}

/// The five Kronecker terms of `−αΔ_h + (D(1−x²) ⊗ D(2y) ⊗ I)∇ˣ + (D(−2x) ⊗ D(1−y²) ⊗ I)∇ʸ`
/// on the grid `g` (mode 0 is `x`, mode 1 is `y`, mode 2 is `z`).
pub fn conv_diff_terms(g: &Grid1D, alpha: f64) -> Vec<KronTerm> {
    let n = g.n();
    let x = g.nodes();
    let lap = laplace_1d(g);
    let grad = grad_1d(g);
    let eye = Array2::<f64>::eye(n);
    // the same grid serves every axis, so D(1−x²)∇ and D(1−y²)∇ coincide
    let wind = diag(&x.mapv(|t| 1.0 - t * t)).dot(&grad);
    vec![
        KronTerm::new(alpha, vec![lap.clone(), eye.clone(), eye.clone()]),
        KronTerm::new(alpha, vec![eye.clone(), lap.clone(), eye.clone()]),
        KronTerm::new(alpha, vec![eye.clone(), eye.clone(), lap]),
        KronTerm::new(1.0, vec![wind.clone(), diag(&x.mapv(|t| 2.0 * t)), eye.clone()]),
        KronTerm::new(1.0, vec![diag(&x.mapv(|t| -2.0 * t)), wind, eye]),
    ]
}

/// Convection–diffusion operator on `n³` interior points of `[−1, 1]³`, rounded at
/// [`ASSEMBLY_EPS`].
pub fn conv_diff_3d(n: usize, alpha: f64) -> Result<TtMatrix> {
    let g = check(n, alpha)?;
    let op = TtMatrix::from_kron(&conv_diff_terms(&g, alpha))?;
    round_matrix(&op, &TruncationSpec::new(ASSEMBLY_EPS)?)
}

/// Right-hand side from lifting `u = 1` on the face `y = 1` (all other faces zero): only the
/// layer `j = n − 1` next to that face is non-zero,
/// `b_i = α/h² + x_i(1 − y²)/h` with `y` the last interior node.
pub fn conv_diff_rhs(n: usize, alpha: f64) -> Result<TtTensor> {
    let g = check(n, alpha)?;
    let h = g.h();
    let y_last = g.node(n - 1);
    let bx = g.nodes().mapv(|x| alpha / (h * h) + x * (1.0 - y_last * y_last) / h);
    let mut ey = Array1::zeros(n);
    ey[n - 1] = 1.0;
    TtTensor::rank_one(&[bx, ey, Array1::ones(n)])
}
