//! Exact TT arithmetic. Ranks grow formally (sum for addition, product for Hadamard and
//! operator application); no rounding happens here.

use ndarray::{s, Array2, Array3, Array5};

use crate::error::{Error, Result};
use crate::tt::{check_rank_cap, TtMatrix, TtTensor};
use crate::linalg::ReshapeC;

fn check_shapes(a: &[usize], b: &[usize], context: &'static str) -> Result<()> {
    if a != b {
        return Err(Error::ShapeMismatch {
            context,
            expected: a.to_vec(),
            found: b.to_vec(),
        });
    }
    Ok(())
}

/// `a + b` with interior ranks `r_k(a) + r_k(b)`.
pub fn add(a: &TtTensor, b: &TtTensor) -> Result<TtTensor> {
    check_shapes(&a.mode_sizes(), &b.mode_sizes(), "add")?;
    let d = a.order();
    if d == 1 {
        return TtTensor::new(vec![a.core(0) + b.core(0)]);
    }
    let mut cores = Vec::with_capacity(d);
    for k in 0..d {
        let (ra0, n, ra1) = a.core(k).dim();
        let (rb0, _, rb1) = b.core(k).dim();
        let (r0, r1) = match k {
            0 => (1, ra1 + rb1),
            _ if k == d - 1 => (ra0 + rb0, 1),
            _ => (ra0 + rb0, ra1 + rb1),
        };
        check_rank_cap(r0.max(r1), "addition")?;
        let mut core = Array3::zeros((r0, n, r1));
        if k == 0 {
            core.slice_mut(s![.., .., ..ra1]).assign(a.core(k));
            core.slice_mut(s![.., .., ra1..]).assign(b.core(k));
        } else if k == d - 1 {
            core.slice_mut(s![..ra0, .., ..]).assign(a.core(k));
            core.slice_mut(s![ra0.., .., ..]).assign(b.core(k));
        } else {
            core.slice_mut(s![..ra0, .., ..ra1]).assign(a.core(k));
            core.slice_mut(s![ra0.., .., ra1..]).assign(b.core(k));
        }
        cores.push(core);
    }
    TtTensor::new(cores)
}

/// `c·a`, folded into the first core.
pub fn scale(a: &TtTensor, c: f64) -> TtTensor {
    let mut out = a.clone();
    out.cores_mut()[0].mapv_inplace(|v| v * c);
    out
}

/// `a − b`.
pub fn sub(a: &TtTensor, b: &TtTensor) -> Result<TtTensor> {
    add(a, &scale(b, -1.0))
}

/// Inner product by left-to-right contraction of an `r(a) × r(b)` interface matrix.
pub fn dot(a: &TtTensor, b: &TtTensor) -> Result<f64> {
    check_shapes(&a.mode_sizes(), &b.mode_sizes(), "dot")?;
    let mut phi = Array2::from_elem((1, 1), 1.0);
    for (ca, cb) in a.cores().iter().zip(b.cores()) {
        phi = contract_interface(&phi, ca, cb);
    }
    Ok(phi[[0, 0]])
}

/// `Φ' = Σ_i A(i)ᵀ Φ B(i)` for cores `A (ra, n, ra')`, `B (rb, n, rb')`.
pub(crate) fn contract_interface(phi: &Array2<f64>, ca: &Array3<f64>, cb: &Array3<f64>) -> Array2<f64> {
    let (ra0, n, ra1) = ca.dim();
    let (rb0, _, rb1) = cb.dim();
    let cb_mat = cb
        .into_shape_c((rb0, n * rb1))
        .expect("contiguous core");
    let tmp = phi.dot(&cb_mat).into_shape_c((ra0 * n, rb1)).expect("contiguous");
    let ca_mat = ca
        .into_shape_c((ra0 * n, ra1))
        .expect("contiguous core");
    ca_mat.t().dot(&tmp)
}

/// Frobenius norm, `√max(dot(a,a), 0)`.
pub fn norm(a: &TtTensor) -> f64 {
    dot(a, a).expect("same shape").max(0.0).sqrt()
}

/// Elementwise product with interior ranks `r_k(a)·r_k(b)`.
pub fn hadamard(a: &TtTensor, b: &TtTensor) -> Result<TtTensor> {
    check_shapes(&a.mode_sizes(), &b.mode_sizes(), "hadamard")?;
    let mut cores = Vec::with_capacity(a.order());
    for (ca, cb) in a.cores().iter().zip(b.cores()) {
        let (ra0, n, ra1) = ca.dim();
        let (rb0, _, rb1) = cb.dim();
        check_rank_cap((ra0 * rb0).max(ra1 * rb1), "hadamard product")?;
        let core = Array3::from_shape_fn((ra0 * rb0, n, ra1 * rb1), |(ap, i, bq)| {
            let (a0, p) = (ap / rb0, ap % rb0);
            let (a1, q) = (bq / rb1, bq % rb1);
            ca[[a0, i, a1]] * cb[[p, i, q]]
        });
        cores.push(core);
    }
    TtTensor::new(cores)
}

/// Operator application with interior ranks `r_k(A)·r_k(x)`; the merged rank index
/// is `a·r(x) + p`.
pub fn matvec(op: &TtMatrix, x: &TtTensor) -> Result<TtTensor> {
    check_shapes(op.col_shape().dims(), &x.mode_sizes(), "matvec")?;
    let mut cores = Vec::with_capacity(x.order());
    for (ca, cx) in op.cores().iter().zip(x.cores()) {
        let (ra0, m, n, ra1) = ca.dim();
        let (rx0, _, rx1) = cx.dim();
        check_rank_cap((ra0 * rx0).max(ra1 * rx1), "matvec")?;
        // (a, i, b, j) · (j, p, q)
        let a_mat = ca
            .view()
            .permuted_axes([0, 1, 3, 2])
            .into_shape_c((ra0 * m * ra1, n))?;
        let x_mat = cx
            .view()
            .permuted_axes([1, 0, 2])
            .into_shape_c((n, rx0 * rx1))?;
        let prod: Array5<f64> = a_mat.dot(&x_mat).into_shape_c((ra0, m, ra1, rx0, rx1))?;
        let core = prod
            .permuted_axes([0, 3, 1, 2, 4])
            .into_shape_c((ra0 * rx0, m, ra1 * rx1))?;
        cores.push(core);
    }
    TtTensor::new(cores)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tt::Shape;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn mismatched_shapes_error() {
        let a = TtTensor::ones(&Shape::new(vec![2, 2]).unwrap());
        let b = TtTensor::ones(&Shape::new(vec![2, 3]).unwrap());
        assert!(add(&a, &b).is_err());
        assert!(dot(&a, &b).is_err());
        assert!(hadamard(&a, &b).is_err());
        let op = TtMatrix::identity(&Shape::new(vec![2, 3]).unwrap());
        assert!(matvec(&op, &a).is_err());
    }

    #[test]
    fn formal_rank_bookkeeping() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let shape = Shape::uniform(3, 3).unwrap();
        let a = TtTensor::random(&shape, &[2, 2], &mut rng).unwrap();
        let b = TtTensor::random(&shape, &[3, 1], &mut rng).unwrap();
        assert_eq!(add(&a, &b).unwrap().ranks(), vec![1, 5, 3, 1]);
        let c = TtTensor::random(&shape, &[3, 2], &mut rng).unwrap();
        assert_eq!(hadamard(&a, &c).unwrap().ranks(), vec![1, 6, 4, 1]);
    }

    #[test]
    fn scale_by_zero_has_zero_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = TtTensor::random(&Shape::uniform(3, 2).unwrap(), &[2, 2], &mut rng).unwrap();
        let z = scale(&a, 0.0);
        assert_eq!(norm(&z), 0.0);
        assert_eq!(z.ranks(), a.ranks());
    }
}
