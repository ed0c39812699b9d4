use ndarray::{Array2, Axis};

use super::{DenseTensor, TtTensor};
use crate::error::{Error, Result};
use crate::linalg::{svd_thin, truncation_rank};
use crate::linalg::ReshapeC;

/// TT-SVD of a dense tensor: sequential truncated SVDs of the unfoldings with per-step
/// threshold `eps/√(d−1)·‖x‖_F`, so that `‖full(result) − x‖_F ≤ eps·‖x‖_F`.
pub fn tt_svd(x: &DenseTensor, eps: f64, rmax: Option<usize>) -> Result<TtTensor> {
    let caps = vec![rmax.unwrap_or(usize::MAX); x.shape().order().saturating_sub(1)];
    tt_svd_with_caps(x, eps, &caps)
}

/// TT-SVD with an individual rank cap for each of the `d − 1` interior bonds.
pub fn tt_svd_with_caps(x: &DenseTensor, eps: f64, caps: &[usize]) -> Result<TtTensor> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be ≥ 0, got {eps}")));
    }
    if x.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("tensor has non-finite entries".into()));
    }
    let dims = x.shape().dims().to_vec();
    let d = dims.len();
    if caps.len() + 1 != d {
        return Err(Error::InvalidParameter(format!(
            "{} rank caps for order {d}",
            caps.len()
        )));
    }
    let norm = x.norm();
    if norm == 0.0 {
        return Ok(TtTensor::zeros(x.shape()));
    }
    let local = if d > 1 { eps * norm / ((d - 1) as f64).sqrt() } else { 0.0 };

    // (r_{k-1}, n_k, rest) with `rest` first-index-fastest over the remaining modes
    let n1 = dims[0];
    let rest: usize = dims[1..].iter().product();
    let mut work = Array2::from_shape_vec((rest, n1), x.values().to_vec())?
        .reversed_axes()
        .into_shape_c((1, n1, rest))?;

    let mut cores = Vec::with_capacity(d);
    for k in 0..d - 1 {
        let (r0, n, rest) = work.dim();
        let mat = work.into_shape_c((r0 * n, rest))?;
        let (u, s, vt) = svd_thin(mat.view())?;
        let r = truncation_rank(&s, local, Some(caps[k].max(1)));
        let core = u.slice(ndarray::s![.., ..r]).to_owned().into_shape_c((r0, n, r))?;
        cores.push(core);
        let mut carry = vt.slice(ndarray::s![..r, ..]).to_owned();
        for (mut row, &sv) in carry.axis_iter_mut(Axis(0)).zip(s.iter()) {
            row.mapv_inplace(|v| v * sv);
        }
        let next_n = dims[k + 1];
        let next_rest = rest / next_n;
        // rest = j' · n_{k+1} + i_{k+1}
        work = carry
            .into_shape_c((r, next_rest, next_n))?
            .permuted_axes([0, 2, 1])
            .as_standard_layout()
            .to_owned();
    }
    let (r0, n, rest) = work.dim();
    debug_assert_eq!(rest, 1);
    cores.push(work.into_shape_c((r0, n, 1))?);
    TtTensor::new(cores)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tt::Shape;

    #[test]
    fn zero_tensor_gives_canonical_zero() {
        let x = DenseTensor::zeros(Shape::uniform(3, 2).unwrap());
        let t = tt_svd(&x, 0.0, None).unwrap();
        assert_eq!(t.ranks(), vec![1, 1, 1, 1]);
        assert_eq!(t.full().unwrap(), x);
    }

    #[test]
    fn negative_eps_rejected() {
        let x = DenseTensor::zeros(Shape::uniform(2, 2).unwrap());
        assert!(tt_svd(&x, -1.0, None).is_err());
    }

    #[test]
    fn single_mode_is_exact() {
        let x = DenseTensor::new(Shape::new(vec![4]).unwrap(), vec![1.0, -2.0, 3.0, 0.5]).unwrap();
        let t = tt_svd(&x, 0.5, None).unwrap();
        assert_eq!(t.full().unwrap(), x);
    }
}
