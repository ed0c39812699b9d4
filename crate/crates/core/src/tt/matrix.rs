use ndarray::{Array2, Array3, Array4, Axis};

use super::{DenseTensor, InvalidTt, Shape, TtTensor};
use crate::error::{Error, Result};
use crate::linalg::ReshapeC;

/// A linear operator in TT form. Core `k` has extent `r_{k-1} × m_k × n_k × r_k`
/// (row mode `m_k`, column mode `n_k`).
#[derive(Clone, Debug)]
pub struct TtMatrix {
    cores: Vec<Array4<f64>>,
}

impl TtMatrix {
    pub fn new(cores: Vec<Array4<f64>>) -> Result<Self> {
        let a = TtMatrix { cores };
        a.validate()?;
        Ok(a)
    }

    pub fn from_cores_unchecked(cores: Vec<Array4<f64>>) -> Self {
        TtMatrix { cores }
    }

    pub fn validate(&self) -> std::result::Result<(), InvalidTt> {
        // same invariants as the tensor view
        let view = TtTensor::from_cores_unchecked(
            self.cores
                .iter()
                .map(|c| {
                    let (r0, m, n, r1) = c.dim();
                    Array3::zeros((r0, m * n, r1))
                })
                .collect(),
        );
        view.validate()
    }

    /// Identity operator on `shape`.
    pub fn identity(shape: &Shape) -> Self {
        let cores = shape
            .dims()
            .iter()
            .map(|&n| {
                let eye = Array2::<f64>::eye(n);
                eye.into_shape_c((1, n, n, 1)).expect("n·n elements")
            })
            .collect();
        TtMatrix { cores }
    }

    /// Rank-1 operator `F_1 ⊗ ⋯ ⊗ F_d` where `F_k` acts on mode `k`.
    pub fn rank_one(factors: &[Array2<f64>]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidShape("operator needs at least one factor".into()));
        }
        let cores = factors
            .iter()
            .map(|f| {
                let (m, n) = f.dim();
                f.into_shape_c((1, m, n, 1))
                    .map_err(Error::from)
            })
            .collect::<Result<Vec<_>>>()?;
        TtMatrix::new(cores)
    }

    pub fn cores(&self) -> &[Array4<f64>] {
        &self.cores
    }

    pub fn core(&self, k: usize) -> &Array4<f64> {
        &self.cores[k]
    }

    pub fn order(&self) -> usize {
        self.cores.len()
    }

    pub fn ranks(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.cores.iter().map(|c| c.dim().0).collect();
        r.push(self.cores.last().map_or(1, |c| c.dim().3));
        r
    }

    pub fn max_rank(&self) -> usize {
        self.ranks().into_iter().max().unwrap_or(1)
    }

    pub fn row_shape(&self) -> Shape {
        Shape::new(self.cores.iter().map(|c| c.dim().1).collect()).expect("validated operator")
    }

    pub fn col_shape(&self) -> Shape {
        Shape::new(self.cores.iter().map(|c| c.dim().2).collect()).expect("validated operator")
    }

    /// Entry at row multi-index `row` and column multi-index `col`.
    pub fn element(&self, row: &[usize], col: &[usize]) -> Result<f64> {
        self.row_shape().check_index(row)?;
        self.col_shape().check_index(col)?;
        let mut acc = ndarray::Array1::from_elem(1, 1.0);
        for ((core, &i), &j) in self.cores.iter().zip(row).zip(col) {
            let slice = core.index_axis(Axis(1), i);
            acc = acc.dot(&slice.index_axis(Axis(1), j));
        }
        Ok(acc[0])
    }

    /// Views the operator as a tensor train over merged modes `m_k·n_k`
    /// (merged index `i·n_k + j`). Rounding an operator rounds this view.
    pub fn to_tensor_view(&self) -> TtTensor {
        TtTensor::from_cores_unchecked(
            self.cores
                .iter()
                .map(|c| {
                    let (r0, m, n, r1) = c.dim();
                    c.into_shape_c((r0, m * n, r1))
                        .expect("contiguous core")
                })
                .collect(),
        )
    }

    /// Inverse of [`TtMatrix::to_tensor_view`].
    pub fn from_tensor_view(t: &TtTensor, rows: &Shape, cols: &Shape) -> Result<Self> {
        if t.order() != rows.order() || rows.order() != cols.order() {
            return Err(Error::ShapeMismatch {
                context: "operator from tensor view",
                expected: vec![rows.order()],
                found: vec![t.order()],
            });
        }
        let cores = t
            .cores()
            .iter()
            .zip(rows.dims().iter().zip(cols.dims()))
            .map(|(c, (&m, &n))| {
                let (r0, mn, r1) = c.dim();
                if mn != m * n {
                    return Err(Error::ShapeMismatch {
                        context: "operator from tensor view",
                        expected: vec![m * n],
                        found: vec![mn],
                    });
                }
                c.into_shape_c((r0, m, n, r1))
                    .map_err(Error::from)
            })
            .collect::<Result<Vec<_>>>()?;
        TtMatrix::new(cores)
    }

    /// Diagonal operator `diag(t)`: `(diag(t)·x)(i) = t(i)·x(i)`.
    pub fn diag(t: &TtTensor) -> Self {
        let cores = t
            .cores()
            .iter()
            .map(|c| {
                let (r0, n, r1) = c.dim();
                Array4::from_shape_fn((r0, n, n, r1), |(a, i, j, b)| if i == j { c[[a, i, b]] } else { 0.0 })
            })
            .collect();
        TtMatrix { cores }
    }

    /// Frobenius norm of the operator.
    pub fn frobenius_norm(&self) -> f64 {
        crate::arith::norm(&self.to_tensor_view())
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut cores = self.cores.clone();
        if let Some(first) = cores.first_mut() {
            first.mapv_inplace(|v| v * c);
        }
        TtMatrix { cores }
    }

    /// Dense tensor of the diagonal entries, when the operator is square.
    pub fn diagonal(&self) -> Result<DenseTensor> {
        let rows = self.row_shape();
        if rows != self.col_shape() {
            return Err(Error::ShapeMismatch {
                context: "diagonal of a non-square operator",
                expected: rows.dims().to_vec(),
                found: self.col_shape().dims().to_vec(),
            });
        }
        let cores = self
            .cores
            .iter()
            .map(|c| {
                let (r0, n, _, r1) = c.dim();
                Array3::from_shape_fn((r0, n, r1), |(a, i, b)| c[[a, i, i, b]])
            })
            .collect();
        TtTensor::from_cores_unchecked(cores).full()
    }
}
