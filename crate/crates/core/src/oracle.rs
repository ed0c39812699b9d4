//! Dense brute-force references used to validate the TT code at small sizes: matricization
//! of TT operators, Kronecker assembly, a textbook GMRES(m) and unfolding-SVD rank bounds.

use ndarray::{s, Array1, Array2, Array3};

use crate::error::{Error, Result};
use crate::krylov::{ConvergenceRecord, IterationRow, RestartRow, SolverConfig};
use crate::linalg::{cond2, svd_thin, tail_norm};
use crate::tt::{tt_svd_with_caps, DenseTensor, KronTerm, Shape, TtMatrix, TtTensor};

/// Largest flattened dimension the oracles accept by default.
pub const ORACLE_GUARD: usize = 4096;

/// Largest tensor the vector-valued oracles will densify.
pub const ORACLE_TENSOR_GUARD: usize = 1 << 20;

/// A square matrix acting on first-index-fastest flattened tensors of `shape`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    matrix: Array2<f64>,
    shape: Shape,
}

impl DenseOperator {
    pub fn new(matrix: Array2<f64>, shape: Shape) -> Result<Self> {
        let n = shape.numel();
        if matrix.dim() != (n, n) {
            return Err(Error::ShapeMismatch {
                context: "dense operator",
                expected: vec![n, n],
                found: vec![matrix.nrows(), matrix.ncols()],
            });
        }
        Ok(DenseOperator { matrix, shape })
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, x: &DenseTensor) -> Result<DenseTensor> {
        if x.shape() != &self.shape {
            return Err(Error::ShapeMismatch {
                context: "dense operator application",
                expected: self.shape.dims().to_vec(),
                found: x.shape().dims().to_vec(),
            });
        }
        let y = self.matrix.dot(&Array1::from_vec(x.values().to_vec()));
        DenseTensor::new(self.shape.clone(), y.to_vec())
    }

    /// `self · other`.
    pub fn compose(&self, other: &DenseOperator) -> Result<DenseOperator> {
        DenseOperator::new(self.matrix.dot(&other.matrix), self.shape.clone())
    }

    pub fn cond2(&self) -> Result<f64> {
        cond2(self.matrix.view())
    }

    /// Spectral norm.
    pub fn norm2(&self) -> Result<f64> {
        Ok(svd_thin(self.matrix.view())?.1[0])
    }

    pub fn inverse(&self) -> Result<DenseOperator> {
        use ndarray_linalg::Inverse;
        DenseOperator::new(self.matrix.inv()?, self.shape.clone())
    }
}

fn guard(n: usize, limit: usize, what: &'static str) -> Result<()> {
    if n > limit {
        return Err(Error::GuardExceeded { what, size: n, limit });
    }
    Ok(())
}

/// Exact matricization of a square TT operator.
pub fn dense_from_tt(a: &TtMatrix) -> Result<DenseOperator> {
    dense_from_tt_with_guard(a, ORACLE_GUARD)
}

pub fn dense_from_tt_with_guard(a: &TtMatrix, limit: usize) -> Result<DenseOperator> {
    let rows = a.row_shape();
    let cols = a.col_shape();
    if rows != cols {
        return Err(Error::ShapeMismatch {
            context: "dense matricization of a non-square operator",
            expected: rows.dims().to_vec(),
            found: cols.dims().to_vec(),
        });
    }
    guard(rows.numel(), limit, "operator matricization")?;
    // w[I, J, b] over the leading modes; new mode indices are the slowest
    let mut w = Array3::from_elem((1, 1, 1), 1.0);
    for core in a.cores() {
        let (r0, m, n, r1) = core.dim();
        let (pm, pn, _) = w.dim();
        let flat = w.as_standard_layout().into_owned().into_shape((pm * pn, r0))?;
        let mut next = Array3::zeros((pm * m, pn * n, r1));
        for i in 0..m {
            for j in 0..n {
                let block = flat.dot(&core.slice(s![.., i, j, ..])).into_shape((pm, pn, r1))?;
                next.slice_mut(s![i * pm..(i + 1) * pm, j * pn..(j + 1) * pn, ..])
                    .assign(&block);
            }
        }
        w = next;
    }
    let (pm, pn, _) = w.dim();
    DenseOperator::new(w.into_shape((pm, pn))?, rows)
}

/// `A ⊗ B` in the standard (row-major) Kronecker convention.
pub fn kron(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let (am, an) = a.dim();
    let (bm, bn) = b.dim();
    Array2::from_shape_fn((am * bm, an * bn), |(i, j)| a[[i / bm, j / bn]] * b[[i % bm, j % bn]])
}

/// Dense `Σ_t c_t·(F_1 ⊗ ⋯ ⊗ F_d)` with `F_k` acting on mode `k` (first index fastest, so the
/// matrix is `F_d ⊗ ⋯ ⊗ F_1` in the standard convention).
pub fn dense_from_kron(terms: &[KronTerm]) -> Result<DenseOperator> {
    let first = terms
        .first()
        .ok_or_else(|| Error::InvalidParameter("no Kronecker terms".into()))?;
    let dims: Vec<usize> = first.factors.iter().map(|f| f.nrows()).collect();
    let shape = Shape::new(dims)?;
    guard(shape.numel(), ORACLE_GUARD, "Kronecker assembly")?;
    let n = shape.numel();
    let mut total = Array2::zeros((n, n));
    for term in terms {
        let mut acc = Array2::from_elem((1, 1), term.coefficient);
        for f in &term.factors {
            acc = kron(f, &acc);
        }
        total += &acc;
    }
    DenseOperator::new(total, shape)
}

/// `Σ_p I ⊗ ⋯ ⊗ L ⊗ ⋯ ⊗ I` (L in slot `p`) for `d` copies of the 1D matrix `l`.
pub fn kron_sum(l: &Array2<f64>, d: usize) -> Result<DenseOperator> {
    let n = l.nrows();
    let eye = Array2::<f64>::eye(n);
    let terms: Vec<KronTerm> = (0..d)
        .map(|p| KronTerm::new(1.0, (0..d).map(|q| if q == p { l.clone() } else { eye.clone() }).collect()))
        .collect();
    dense_from_kron(&terms)
}

pub fn dense_add(a: &DenseTensor, b: &DenseTensor) -> Result<DenseTensor> {
    zip_with(a, b, |x, y| x + y)
}

pub fn dense_hadamard(a: &DenseTensor, b: &DenseTensor) -> Result<DenseTensor> {
    zip_with(a, b, |x, y| x * y)
}

pub fn dense_dot(a: &DenseTensor, b: &DenseTensor) -> Result<f64> {
    Ok(zip_with(a, b, |x, y| x * y)?.values().iter().sum())
}

pub fn dense_scale(a: &DenseTensor, c: f64) -> DenseTensor {
    DenseTensor::new(a.shape().clone(), a.values().iter().map(|v| c * v).collect()).expect("same size")
}

fn zip_with(a: &DenseTensor, b: &DenseTensor, f: impl Fn(f64, f64) -> f64) -> Result<DenseTensor> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            context: "dense elementwise operation",
            expected: a.shape().dims().to_vec(),
            found: b.shape().dims().to_vec(),
        });
    }
    DenseTensor::new(
        a.shape().clone(),
        a.values().iter().zip(b.values()).map(|(&x, &y)| f(x, y)).collect(),
    )
}

/// Unfolding `k` (`1 ≤ k < d`): rows run over the first `k` modes, columns over the rest.
pub fn unfolding(x: &DenseTensor, k: usize) -> Result<Array2<f64>> {
    let dims = x.shape().dims();
    if k == 0 || k >= dims.len() {
        return Err(Error::InvalidParameter(format!("unfolding {k} of an order-{} tensor", dims.len())));
    }
    let rows: usize = dims[..k].iter().product();
    let cols = x.shape().numel() / rows;
    Ok(Array2::from_shape_vec((cols, rows), x.values().to_vec())?
        .reversed_axes()
        .as_standard_layout()
        .into_owned())
}

/// Reference errors for a tensor compressed to interior ranks `ranks` (`d − 1` entries).
#[derive(Clone, Debug, PartialEq)]
pub struct RankErrorBounds {
    /// Tail `√Σ_{i > r_k} σ_i²` of unfolding `k`.
    pub unfolding_tails: Vec<f64>,
    /// `max_k` of the tails; no TT tensor with these ranks is closer.
    pub lower_bound: f64,
    /// Error achieved by TT-SVD with the same caps; at most `√(Σ_k tail_k²)`.
    pub tt_svd_error: f64,
}

pub fn best_rank_error(x: &DenseTensor, ranks: &[usize]) -> Result<RankErrorBounds> {
    let d = x.shape().order();
    guard(x.shape().numel(), ORACLE_TENSOR_GUARD, "rank error oracle")?;
    if ranks.len() + 1 != d {
        return Err(Error::InvalidParameter(format!("{} ranks for an order-{d} tensor", ranks.len())));
    }
    let mut tails = Vec::with_capacity(d.saturating_sub(1));
    for (k, &r) in ranks.iter().enumerate() {
        let sv = svd_thin(unfolding(x, k + 1)?.view())?.1;
        tails.push(tail_norm(&sv, r));
    }
    let lower_bound = tails.iter().cloned().fold(0.0, f64::max);
    let approx = tt_svd_with_caps(x, 0.0, ranks)?;
    let tt_svd_error = approx.full()?.distance(x)?;
    Ok(RankErrorBounds {
        unfolding_tails: tails,
        lower_bound,
        tt_svd_error,
    })
}

pub fn to_vector(x: &DenseTensor) -> Array1<f64> {
    Array1::from_vec(x.values().to_vec())
}

pub fn tt_to_vector(x: &TtTensor) -> Result<Array1<f64>> {
    guard(x.shape().numel(), ORACLE_TENSOR_GUARD, "dense vector")?;
    Ok(to_vector(&x.full()?))
}

fn lstsq(hbar: &Array2<f64>, beta: f64) -> Result<(Array1<f64>, f64)> {
    let (u, sv, vt) = svd_thin(hbar.view())?;
    let mut rhs = Array1::zeros(hbar.nrows());
    rhs[0] = beta;
    let cut = sv[0] * 1e-14 * hbar.nrows() as f64;
    let utb = u.t().dot(&rhs);
    let coef = Array1::from_iter(utb.iter().zip(sv.iter()).map(|(&c, &s)| if s > cut { c / s } else { 0.0 }));
    let y = vt.t().dot(&coef);
    let r = &rhs - &hbar.dot(&y);
    Ok((y, r.dot(&r).sqrt()))
}

/// Textbook GMRES(m) in exact dense arithmetic: modified Gram–Schmidt Arnoldi and an SVD
/// least-squares solve of `min ‖βe₁ − H̄y‖` at every step. Stops when that residual over
/// `‖b‖` reaches `cfg.eps`. Rank fields of the record are reported as 1.
pub fn dense_gmres(
    a: &DenseOperator,
    b: &Array1<f64>,
    x0: &Array1<f64>,
    cfg: &SolverConfig,
) -> Result<(Array1<f64>, ConvergenceRecord)> {
    cfg.validate()?;
    let n = a.dim();
    guard(n, ORACLE_GUARD, "dense GMRES")?;
    if b.len() != n || x0.len() != n {
        return Err(Error::ShapeMismatch {
            context: "dense GMRES vectors",
            expected: vec![n],
            found: vec![b.len(), x0.len()],
        });
    }
    let bnorm = b.dot(b).sqrt();
    if !(bnorm > 0.0) {
        return Err(Error::InvalidParameter("right-hand side must be nonzero".into()));
    }
    let norm = |v: &Array1<f64>| v.dot(v).sqrt();
    let mat = a.matrix();
    let mut record = ConvergenceRecord::default();
    let mut x = x0.clone();
    let mut r = b - &mat.dot(&x);
    let mut true_rel = norm(&r) / bnorm;
    let mut computed_rel = true_rel;
    record.restarts.push(RestartRow {
        cycle: 0,
        iterations: 0,
        resid_true_rel: true_rel,
        rank_solution_max: 1,
        sigma_min_hbar: None,
    });
    let mut iter = 0;
    if true_rel <= cfg.eps {
        record.converged = true;
    }
    let mut cycle = 0;
    while !record.converged && cycle <= cfg.max_restarts {
        let beta = norm(&r);
        let m = cfg.restart_m;
        let mut v: Vec<Array1<f64>> = vec![&r / beta];
        let mut h = Array2::<f64>::zeros((m + 1, m));
        let mut y = Array1::zeros(0);
        let mut done = false;
        for j in 0..m {
            let mut w = mat.dot(&v[j]);
            let wnorm = norm(&w);
            for (i, vi) in v.iter().enumerate() {
                let hij = vi.dot(&w);
                h[[i, j]] = hij;
                w.scaled_add(-hij, vi);
            }
            let hn = norm(&w);
            h[[j + 1, j]] = hn;
            let (yj, res) = lstsq(&h.slice(s![..j + 2, ..j + 1]).to_owned(), beta)?;
            y = yj;
            iter += 1;
            computed_rel = res / bnorm;
            record.iterations.push(IterationRow {
                iter,
                cycle,
                resid_computed_rel: computed_rel,
                resid_true_rel: None,
                delta: 0.0,
                rank_krylov_max: 1,
                rank_solution_max: None,
                wall_ms: 0.0,
            });
            let breakdown = hn <= cfg.breakdown_tol * wnorm;
            if breakdown {
                record.breakdown = true;
            }
            if computed_rel <= cfg.eps || breakdown {
                done = computed_rel <= cfg.eps;
                break;
            }
            v.push(&w / hn);
        }
        for (yi, vi) in y.iter().zip(&v) {
            x.scaled_add(*yi, vi);
        }
        r = b - &mat.dot(&x);
        true_rel = norm(&r) / bnorm;
        if let Some(last) = record.iterations.last_mut() {
            last.resid_true_rel = Some(true_rel);
            last.rank_solution_max = Some(1);
        }
        cycle += 1;
        record.restarts.push(RestartRow {
            cycle,
            iterations: iter,
            resid_true_rel: true_rel,
            rank_solution_max: 1,
            sigma_min_hbar: None,
        });
        if done {
            record.converged = true;
        }
        if record.breakdown && !done {
            break;
        }
    }
    record.final_computed_rel = computed_rel;
    record.final_true_rel = true_rel;
    Ok((x, record))
}
