use ndarray::Array1;

use crate::arith;
use crate::error::{Error, Result};
use crate::round::{round_sum, TruncationSpec};
use crate::tt::TtTensor;

/// The vector-space operations the GMRES driver needs.
///
/// `combine` forms a linear combination and, for compressed formats, rounds it to relative
/// accuracy `tol`. Dense vectors ignore the tolerance.
pub trait KrylovVector: Clone {
    /// Whether [`KrylovVector::orthogonalize`] reads the Gram matrix of the basis.
    const USES_GRAM: bool = true;

    fn dot(&self, other: &Self) -> Result<f64>;

    fn norm(&self) -> f64;

    fn scaled(&self, c: f64) -> Self;

    fn combine(terms: &[(f64, &Self)], tol: f64, rmax: Option<usize>) -> Result<Self>;

    /// Largest TT rank, or 1 for unstructured vectors.
    fn max_rank(&self) -> usize {
        1
    }

    fn is_zero(&self) -> bool {
        self.norm() == 0.0
    }

    /// Orthogonalizes `w` against `basis` and rounds the result once at `tol`.
    ///
    /// The default evaluates modified Gram–Schmidt coefficients exactly through the Gram
    /// matrix of the basis, `h_i = ⟨w, v_i⟩ − Σ_{l<i} h_l ⟨v_l, v_i⟩`, so only one rounding
    /// of `w − Σ h_i v_i` is needed. `gram[i][l]` holds `⟨v_i, v_l⟩` for `l ≤ i`.
    fn orthogonalize(
        w: &Self,
        basis: &[Self],
        gram: &[Vec<f64>],
        tol: f64,
        rmax: Option<usize>,
    ) -> Result<(Self, Vec<f64>)> {
        let mut h = Vec::with_capacity(basis.len());
        for (i, v) in basis.iter().enumerate() {
            let mut hi = w.dot(v)?;
            for (l, hl) in h.iter().enumerate() {
                hi -= hl * gram[i][l];
            }
            h.push(hi);
        }
        let mut terms: Vec<(f64, &Self)> = vec![(1.0, w)];
        terms.extend(h.iter().zip(basis).map(|(c, v)| (-c, v)));
        Ok((Self::combine(&terms, tol, rmax)?, h))
    }
}

impl KrylovVector for TtTensor {
    fn dot(&self, other: &Self) -> Result<f64> {
        arith::dot(self, other)
    }

    fn norm(&self) -> f64 {
        arith::norm(self)
    }

    fn scaled(&self, c: f64) -> Self {
        arith::scale(self, c)
    }

    fn combine(terms: &[(f64, &Self)], tol: f64, rmax: Option<usize>) -> Result<Self> {
        let spec = TruncationSpec::new(tol)?.with_rmax(rmax)?;
        round_sum(terms, &spec)
    }

    fn max_rank(&self) -> usize {
        TtTensor::max_rank(self)
    }

    fn is_zero(&self) -> bool {
        TtTensor::is_zero(self) || arith::norm(self) == 0.0
    }
}

impl KrylovVector for Array1<f64> {
    const USES_GRAM: bool = false;

    fn dot(&self, other: &Self) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::ShapeMismatch {
                context: "dense dot",
                expected: vec![self.len()],
                found: vec![other.len()],
            });
        }
        Ok(ndarray::linalg::Dot::dot(self, other))
    }

    fn norm(&self) -> f64 {
        self.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn scaled(&self, c: f64) -> Self {
        self * c
    }

    fn combine(terms: &[(f64, &Self)], _tol: f64, _rmax: Option<usize>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty linear combination".into()))?;
        let mut out = Array1::zeros(first.1.len());
        for (c, v) in terms {
            if v.len() != out.len() {
                return Err(Error::ShapeMismatch {
                    context: "dense combination",
                    expected: vec![out.len()],
                    found: vec![v.len()],
                });
            }
            out.scaled_add(*c, *v);
        }
        Ok(out)
    }

    /// Sequential modified Gram–Schmidt.
    fn orthogonalize(
        w: &Self,
        basis: &[Self],
        _gram: &[Vec<f64>],
        _tol: f64,
        _rmax: Option<usize>,
    ) -> Result<(Self, Vec<f64>)> {
        let mut w = w.clone();
        let mut h = Vec::with_capacity(basis.len());
        for v in basis {
            let hi = KrylovVector::dot(&w, v)?;
            w.scaled_add(-hi, v);
            h.push(hi);
        }
        Ok((w, h))
    }
}
