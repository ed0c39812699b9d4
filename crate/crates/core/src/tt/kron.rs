use ndarray::{s, Array2, Array4};

use super::{check_rank_cap, TtMatrix};
use crate::error::{Error, Result};

/// One summand `coefficient · (F_1 ⊗ ⋯ ⊗ F_d)` of a Kronecker-structured operator;
/// `factors[k]` acts on mode `k`.
#[derive(Clone, Debug)]
pub struct KronTerm {
    pub coefficient: f64,
    pub factors: Vec<Array2<f64>>,
}

impl KronTerm {
    pub fn new(coefficient: f64, factors: Vec<Array2<f64>>) -> Self {
        KronTerm {
            coefficient,
            factors,
        }
    }
}

impl TtMatrix {
    /// Operator `Σ_t c_t·(F^t_1 ⊗ ⋯ ⊗ F^t_d)` with formal interior ranks equal to the
    /// number of terms. No rounding is applied.
    pub fn from_kron(terms: &[KronTerm]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("no Kronecker terms".into()))?;
        let d = first.factors.len();
        if d == 0 {
            return Err(Error::InvalidShape("Kronecker term without factors".into()));
        }
        let dims: Vec<(usize, usize)> = first.factors.iter().map(|f| f.dim()).collect();
        for term in terms {
            let found: Vec<(usize, usize)> = term.factors.iter().map(|f| f.dim()).collect();
            if found != dims {
                return Err(Error::ShapeMismatch {
                    context: "Kronecker terms",
                    expected: dims.iter().flat_map(|&(m, n)| [m, n]).collect(),
                    found: found.iter().flat_map(|&(m, n)| [m, n]).collect(),
                });
            }
        }
        let t = terms.len();
        check_rank_cap(t, "Kronecker assembly")?;
        if d == 1 {
            let (m, n) = dims[0];
            let mut core = Array4::zeros((1, m, n, 1));
            for term in terms {
                let mut slot = core.slice_mut(s![0, .., .., 0]);
                slot.scaled_add(term.coefficient, &term.factors[0]);
            }
            return TtMatrix::new(vec![core]);
        }
        let mut cores = Vec::with_capacity(d);
        for (k, &(m, n)) in dims.iter().enumerate() {
            let (r0, r1) = match k {
                0 => (1, t),
                _ if k == d - 1 => (t, 1),
                _ => (t, t),
            };
            let mut core = Array4::zeros((r0, m, n, r1));
            for (idx, term) in terms.iter().enumerate() {
                let a = if k == 0 { 0 } else { idx };
                let b = if k == d - 1 { 0 } else { idx };
                let scale = if k == 0 { term.coefficient } else { 1.0 };
                core.slice_mut(s![a, .., .., b])
                    .scaled_add(scale, &term.factors[k]);
            }
            cores.push(core);
        }
        TtMatrix::new(cores)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mismatched_terms_are_rejected() {
        let a = KronTerm::new(1.0, vec![Array2::eye(2), Array2::eye(3)]);
        let b = KronTerm::new(1.0, vec![Array2::eye(2), Array2::eye(2)]);
        assert!(matches!(
            TtMatrix::from_kron(&[a, b]),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn formal_ranks_count_terms() {
        let terms: Vec<KronTerm> = (0..3)
            .map(|_| KronTerm::new(1.0, vec![Array2::eye(2); 3]))
            .collect();
        let a = TtMatrix::from_kron(&terms).unwrap();
        assert_eq!(a.ranks(), vec![1, 3, 3, 1]);
    }
}
