//! Thin wrappers over LAPACK-backed decompositions used by every module.

use ndarray::{s, Array, Array1, Array2, ArrayBase, ArrayView2, Data, Dimension, IntoDimension, ShapeError};
use ndarray_linalg::{Eigh, JobSvd, SVDDC, QR, SVD, UPLO};

use crate::error::{Error, Result};

/// Reshape in row-major element order regardless of the memory layout of the input.
///
/// `ndarray`'s `into_shape` follows the memory order, so a Fortran-ordered array (as returned
/// by LAPACK or produced by transposes) would be reshaped column-major.
pub(crate) trait ReshapeC {
    fn into_shape_c<E: IntoDimension>(self, shape: E) -> std::result::Result<Array<f64, E::Dim>, ShapeError>;
}

impl<S: Data<Elem = f64>, D: Dimension> ReshapeC for ArrayBase<S, D> {
    fn into_shape_c<E: IntoDimension>(self, shape: E) -> std::result::Result<Array<f64, E::Dim>, ShapeError> {
        let owned = if self.is_standard_layout() {
            self.into_owned()
        } else {
            self.as_standard_layout().into_owned()
        };
        owned.into_shape(shape)
    }
}

impl<S: Data<Elem = f64>, D: Dimension> ReshapeC for &ArrayBase<S, D> {
    fn into_shape_c<E: IntoDimension>(self, shape: E) -> std::result::Result<Array<f64, E::Dim>, ShapeError> {
        self.as_standard_layout().into_owned().into_shape(shape)
    }
}

/// Row-major copy with canonical strides. LAPACK wrappers reject the zero strides that
/// `ndarray` may leave on length-1 axes.
fn standard(a: Array2<f64>) -> Array2<f64> {
    let (m, n) = a.dim();
    if a.strides() == [n.max(1) as isize, 1] {
        a
    } else {
        Array2::from_shape_vec((m, n), a.iter().cloned().collect()).expect("m·n elements")
    }
}

/// Reduced QR: `a = q·r` with `q` of shape `m × k`, `r` of shape `k × n`, `k = min(m, n)`.
pub fn qr_thin(a: ArrayView2<f64>) -> Result<(Array2<f64>, Array2<f64>)> {
    let (m, n) = a.dim();
    if m == 0 || n == 0 {
        return Err(Error::Linalg("QR of an empty matrix".into()));
    }
    let (q, r) = standard(a.to_owned()).qr()?;
    let k = m.min(n);
    Ok((
        standard(q.slice(s![.., ..k]).to_owned()),
        standard(r.slice(s![..k, ..]).to_owned()),
    ))
}

/// Reduced LQ: `a = l·q` with `q` having orthonormal rows.
pub fn lq_thin(a: ArrayView2<f64>) -> Result<(Array2<f64>, Array2<f64>)> {
    let (q, r) = qr_thin(a.t())?;
    Ok((standard(r.reversed_axes()), standard(q.reversed_axes())))
}

/// Thin SVD `a = u·diag(s)·vt`, singular values in non-increasing order.
///
/// Strongly rectangular inputs are first reduced by a QR (or LQ) factorization.
pub fn svd_thin(a: ArrayView2<f64>) -> Result<(Array2<f64>, Array1<f64>, Array2<f64>)> {
    let (m, n) = a.dim();
    if m == 0 || n == 0 {
        return Err(Error::Linalg("SVD of an empty matrix".into()));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Linalg("SVD input contains non-finite values".into()));
    }
    if m >= 2 * n {
        let (q, r) = qr_thin(a)?;
        let (u, s, vt) = svd_square(r)?;
        return Ok((standard(q.dot(&u)), s, vt));
    }
    if n >= 2 * m {
        let (l, q) = lq_thin(a)?;
        let (u, s, vt) = svd_square(l)?;
        return Ok((u, s, standard(vt.dot(&q))));
    }
    svd_square(standard(a.to_owned()))
}

fn svd_square(a: Array2<f64>) -> Result<(Array2<f64>, Array1<f64>, Array2<f64>)> {
    let (m, n) = a.dim();
    match a.svddc(JobSvd::Some) {
        Ok((Some(u), s, Some(vt))) => Ok((standard(u), s, standard(vt))),
        _ => {
            // gesdd occasionally fails to converge; gesvd is slower but more robust
            let (u, s, vt) = a.svd(true, true)?;
            let k = m.min(n);
            let u = u.ok_or_else(|| Error::Linalg("missing U".into()))?;
            let vt = vt.ok_or_else(|| Error::Linalg("missing V^T".into()))?;
            Ok((
                standard(u.slice(s![.., ..k]).to_owned()),
                s,
                standard(vt.slice(s![..k, ..]).to_owned()),
            ))
        }
    }
}

/// Singular values only.
pub fn singular_values(a: ArrayView2<f64>) -> Result<Array1<f64>> {
    Ok(svd_thin(a)?.1)
}
/// Checks that the linked BLAS multiplies a wide row-major operand correctly.
///
/// Some OpenBLAS builds (0.3.20 with the Cooperlake kernel) get this wrong; running with
/// `OPENBLAS_CORETYPE=Haswell` selects a working kernel.
pub fn blas_self_check() -> Result<()> {
    let (m, k, n) = (12, 12, 8192);
    let a = Array2::from_shape_fn((m, k), |(i, p)| (i * 3 + p) as f64 * 0.1 - 1.0);
    let b = Array2::from_shape_fn((k, n), |(p, j)| ((p * 7 + j * 13) % 17) as f64);
    let c = a.dot(&b);
    for j in (0..n).step_by(997) {
        for i in 0..m {
            let exact: f64 = (0..k).map(|p| a[[i, p]] * b[[p, j]]).sum();
            if (exact - c[[i, j]]).abs() > 1e-9 * (1.0 + exact.abs()) {
                return Err(Error::Linalg(
                    "the linked BLAS computes wrong matrix products; set OPENBLAS_CORETYPE=Haswell".into(),
                ));
            }
        }
    }
    Ok(())
}

/// Smallest rank `r ≥ 1` whose discarded tail `sqrt(Σ_{i≥r} s_i²)` is at most `tol`,
/// capped at `rmax`.
pub fn truncation_rank(s: &Array1<f64>, tol: f64, rmax: Option<usize>) -> usize {
    let n = s.len();
    let mut tail = 0.0;
    let mut r = n;
    while r > 1 {
        let next = tail + s[r - 1] * s[r - 1];
        if next.sqrt() > tol {
            break;
        }
        tail = next;
        r -= 1;
    }
    match rmax {
        Some(cap) => r.min(cap.max(1)),
        None => r,
    }
}

/// Frobenius norm of the tail `s[r..]`.
pub fn tail_norm(s: &Array1<f64>, r: usize) -> f64 {
    s.iter().skip(r).map(|v| v * v).sum::<f64>().sqrt()
}

/// Symmetric eigendecomposition, eigenvalues ascending.
pub fn sym_eig(a: ArrayView2<f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    let (w, v) = standard(a.to_owned()).eigh(UPLO::Lower)?;
    Ok((w, standard(v)))
}

/// 2-norm condition number from the singular values.
pub fn cond2(a: ArrayView2<f64>) -> Result<f64> {
    let s = singular_values(a)?;
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let smin = s.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(if smin == 0.0 { f64::INFINITY } else { smax / smin })
}
