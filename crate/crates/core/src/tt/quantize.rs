use ndarray::{Array3, Array4, ArrayD, IxDyn};

use super::{TtMatrix, TtTensor};
use crate::error::{Error, Result};
use crate::linalg::{svd_thin, truncation_rank};
use crate::linalg::ReshapeC;

/// Relative cutoff used to drop numerically zero singular values when splitting cores.
const SPLIT_CUTOFF: f64 = 1e-15;

fn digits_of(size: usize, base: usize) -> Result<usize> {
    if base < 2 {
        return Err(Error::InvalidParameter(format!("base must be ≥ 2, got {base}")));
    }
    let mut p = 0;
    let mut n = 1;
    while n < size {
        n *= base;
        p += 1;
    }
    if n != size {
        return Err(Error::NotPowerOfBase { size, base });
    }
    Ok(p)
}

/// Splits `(r, g_0, …, g_{p-1}, s)` into a chain of `p` order-3 cores by sequential SVD.
fn split_chain(arr: ArrayD<f64>) -> Result<Vec<Array3<f64>>> {
    let dims = arr.shape().to_vec();
    let p = dims.len() - 2;
    let norm = arr.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut work = arr.as_standard_layout().to_owned();
    let mut cores = Vec::with_capacity(p);
    let mut r = dims[0];
    for l in 0..p - 1 {
        let g = dims[l + 1];
        let rest: usize = dims[l + 2..].iter().product();
        let mat = work.into_shape_c((r * g, rest))?;
        let (u, sv, vt) = svd_thin(mat.view())?;
        let keep = truncation_rank(&sv, SPLIT_CUTOFF * norm, None);
        cores.push(
            u.slice(ndarray::s![.., ..keep])
                .to_owned()
                .into_shape_c((r, g, keep))?,
        );
        let mut carry = vt.slice(ndarray::s![..keep, ..]).to_owned();
        for (mut row, &s) in carry.outer_iter_mut().zip(sv.iter()) {
            row.mapv_inplace(|v| v * s);
        }
        let mut next_dims = vec![keep];
        next_dims.extend_from_slice(&dims[l + 2..]);
        work = carry.into_shape_c(IxDyn(&next_dims))?;
        r = keep;
    }
    let g = dims[p];
    let s = dims[p + 1];
    cores.push(work.into_shape_c((r, g, s))?);
    Ok(cores)
}

/// Splits every mode of size `base^p` into `p` modes of size `base`, least-significant
/// digit first. Values are unchanged; the linear index of every entry is preserved.
pub fn quantize(t: &TtTensor, base: usize) -> Result<TtTensor> {
    quantize_modes(t, base, &vec![true; t.order()])
}

/// Quantizes only the modes flagged in `which`.
pub fn quantize_modes(t: &TtTensor, base: usize, which: &[bool]) -> Result<TtTensor> {
    if which.len() != t.order() {
        return Err(Error::Grouping(format!(
            "{} flags for order {}",
            which.len(),
            t.order()
        )));
    }
    let mut cores = Vec::new();
    for (core, &q) in t.cores().iter().zip(which) {
        let (r, n, s) = core.dim();
        if !q {
            cores.push(core.clone());
            continue;
        }
        let p = digits_of(n, base)?;
        if p <= 1 {
            cores.push(core.clone());
            continue;
        }
        // C-order digits are most significant first; reverse them
        let mut shape = vec![r];
        shape.extend(std::iter::repeat_n(base, p));
        shape.push(s);
        let arr = core.into_shape_c(IxDyn(&shape))?;
        let mut axes = vec![0];
        axes.extend((1..=p).rev());
        axes.push(p + 1);
        cores.extend(split_chain(arr.permuted_axes(IxDyn(&axes)))?);
    }
    TtTensor::new(cores)
}

/// Merges consecutive groups of `grouping[g]` cores back into single modes
/// (first core of a group is the least-significant digit). Groups of one core pass through.
pub fn dequantize(t: &TtTensor, grouping: &[usize], base: usize) -> Result<TtTensor> {
    if grouping.contains(&0) || grouping.iter().sum::<usize>() != t.order() {
        return Err(Error::Grouping(format!(
            "grouping {grouping:?} does not partition {} cores",
            t.order()
        )));
    }
    let mut cores = Vec::with_capacity(grouping.len());
    let mut k = 0;
    for &g in grouping {
        let group = &t.cores()[k..k + g];
        k += g;
        if g == 1 {
            cores.push(group[0].clone());
            continue;
        }
        if let Some(bad) = group.iter().find(|c| c.dim().1 != base) {
            return Err(Error::Grouping(format!(
                "digit core of size {} in a multi-digit group (base {base})",
                bad.dim().1
            )));
        }
        let mut acc = group[0].clone();
        for core in &group[1..] {
            let (r, n, s0) = acc.dim();
            let (_, b, s1) = core.dim();
            let prod = acc
                .into_shape_c((r * n, s0))?
                .dot(&core.into_shape_c((s0, b * s1))?);
            acc = prod
                .into_shape_c((r, n, b, s1))?
                .permuted_axes([0, 2, 1, 3])
                .into_shape_c((r, b * n, s1))?;
        }
        cores.push(acc);
    }
    TtTensor::new(cores)
}

/// Quantizes the flagged modes of an operator; row and column digits of the same
/// significance share one new core of extent `base × base`.
pub fn quantize_matrix_modes(a: &TtMatrix, base: usize, which: &[bool]) -> Result<TtMatrix> {
    if which.len() != a.order() {
        return Err(Error::Grouping(format!(
            "{} flags for order {}",
            which.len(),
            a.order()
        )));
    }
    let mut cores: Vec<Array4<f64>> = Vec::new();
    for (core, &q) in a.cores().iter().zip(which) {
        let (r, m, n, s) = core.dim();
        if !q {
            cores.push(core.clone());
            continue;
        }
        let p = digits_of(m, base)?;
        if digits_of(n, base)? != p {
            return Err(Error::ShapeMismatch {
                context: "operator quantization needs equal digit counts",
                expected: vec![m],
                found: vec![n],
            });
        }
        if p <= 1 {
            cores.push(core.clone());
            continue;
        }
        let mut shape = vec![r];
        shape.extend(std::iter::repeat_n(base, 2 * p));
        shape.push(s);
        let arr = core.into_shape_c(IxDyn(&shape))?;
        // axes 1..=p: row digits (most significant first), p+1..=2p: column digits
        let mut axes = vec![0];
        for l in 0..p {
            axes.push(p - l);
            axes.push(2 * p - l);
        }
        axes.push(2 * p + 1);
        let permuted = arr.permuted_axes(IxDyn(&axes)).as_standard_layout().to_owned();
        let mut merged_shape = vec![r];
        merged_shape.extend(std::iter::repeat_n(base * base, p));
        merged_shape.push(s);
        let merged = permuted.into_shape_c(IxDyn(&merged_shape))?;
        for c in split_chain(merged)? {
            let (r0, _, r1) = c.dim();
            cores.push(c.into_shape_c((r0, base, base, r1))?);
        }
    }
    TtMatrix::new(cores)
}

/// Digit counts produced by [`quantize`] for the given mode sizes.
pub fn quantization_grouping(mode_sizes: &[usize], base: usize) -> Result<Vec<usize>> {
    mode_sizes
        .iter()
        .map(|&n| digits_of(n, base).map(|p| p.max(1)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tt::{DenseTensor, Shape};
    use ndarray::Array1;

    #[test]
    fn non_power_mode_is_rejected() {
        let t = TtTensor::ones(&Shape::new(vec![6]).unwrap());
        assert!(matches!(
            quantize(&t, 2),
            Err(Error::NotPowerOfBase { size: 6, base: 2 })
        ));
    }

    #[test]
    fn eight_point_vector_becomes_three_binary_modes() {
        let v = Array1::from_iter((0..8).map(|i| i as f64 * 0.5 - 1.0));
        let t = TtTensor::rank_one(std::slice::from_ref(&v)).unwrap();
        let q = quantize(&t, 2).unwrap();
        assert_eq!(q.mode_sizes(), vec![2, 2, 2]);
        let qv = q.full().unwrap();
        for (a, b) in qv.values().iter().zip(v.iter()) {
            assert!((a - b).abs() < 1e-13);
        }
        let back = dequantize(&q, &[3], 2).unwrap();
        let err = back.full().unwrap().distance(&t.full().unwrap()).unwrap();
        assert!(err < 1e-13);
    }

    #[test]
    fn grouping_mismatch_is_an_error() {
        let q = TtTensor::ones(&Shape::uniform(3, 2).unwrap());
        assert!(dequantize(&q, &[2], 2).is_err());
        assert!(dequantize(&q, &[2, 2], 2).is_err());
        assert!(dequantize(&q, &[0, 3], 2).is_err());
        let mixed = TtTensor::ones(&Shape::new(vec![2, 3]).unwrap());
        assert!(dequantize(&mixed, &[2], 2).is_err());
    }

    #[test]
    fn grouping_helper_matches_quantize() {
        let t = TtTensor::ones(&Shape::new(vec![4, 3, 8]).unwrap());
        assert!(quantization_grouping(t.mode_sizes().as_slice(), 2).is_err());
        let g = quantization_grouping(&[4, 1, 8], 2).unwrap();
        assert_eq!(g, vec![2, 1, 3]);
        let x = DenseTensor::from_fn(Shape::new(vec![4, 8]).unwrap(), |i| (i[0] * 8 + i[1]) as f64);
        let t = crate::tt::tt_svd(&x, 0.0, None).unwrap();
        let q = quantize(&t, 2).unwrap();
        let back = dequantize(&q, &quantization_grouping(&[4, 8], 2).unwrap(), 2).unwrap();
        assert!(back.full().unwrap().distance(&x).unwrap() < 1e-12);
    }
}
