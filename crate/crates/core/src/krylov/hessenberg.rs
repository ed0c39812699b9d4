use ndarray::{Array1, Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::linalg::svd_thin;

/// Least-squares problem `min_y ‖β e₁ − H̄ y‖` updated one column at a time with Givens
/// rotations, so the minimum is known after every Arnoldi step.
#[derive(Clone, Debug)]
pub struct HessenbergLs {
    beta: f64,
    /// Raw columns of `H̄`; column `k` has `k + 2` entries.
    cols: Vec<Vec<f64>>,
    /// Triangular factor, column `k` has `k + 1` entries.
    r: Vec<Vec<f64>>,
    rotations: Vec<(f64, f64)>,
    g: Vec<f64>,
}

/// Solution of the reduced problem.
#[derive(Clone, Debug, PartialEq)]
pub struct LsSolution {
    pub y: Vec<f64>,
    /// `‖β e₁ − H̄ y‖`.
    pub residual: f64,
    /// `H̄` was numerically rank deficient and the minimal-norm solution was returned.
    pub rank_deficient: bool,
}

impl HessenbergLs {
    pub fn new(beta: f64) -> Self {
        HessenbergLs {
            beta,
            cols: Vec::new(),
            r: Vec::new(),
            rotations: Vec::new(),
            g: vec![beta],
        }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn len(&self) -> usize {
        self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cols.is_empty()
    }

    /// Appends column `j` (entries `h_{1,j} … h_{j+1,j}`) and returns the new minimum.
    pub fn push(&mut self, col: &[f64]) -> Result<f64> {
        let k = self.cols.len();
        if col.len() != k + 2 {
            return Err(Error::ShapeMismatch {
                context: "Hessenberg column",
                expected: vec![k + 2],
                found: vec![col.len()],
            });
        }
        self.cols.push(col.to_vec());
        let mut h = col.to_vec();
        for (i, &(c, s)) in self.rotations.iter().enumerate() {
            let (a, b) = (h[i], h[i + 1]);
            h[i] = c * a + s * b;
            h[i + 1] = -s * a + c * b;
        }
        let (a, b) = (h[k], h[k + 1]);
        let rho = a.hypot(b);
        let (c, s) = if rho == 0.0 { (1.0, 0.0) } else { (a / rho, b / rho) };
        h[k] = rho;
        h.truncate(k + 1);
        self.r.push(h);
        self.rotations.push((c, s));
        let gk = self.g[k];
        self.g[k] = c * gk;
        self.g.push(-s * gk);
        Ok(self.residual())
    }

    /// Current minimum `‖β e₁ − H̄ y‖`.
    pub fn residual(&self) -> f64 {
        self.g.last().map_or(self.beta, |v| v.abs())
    }

    /// Dense `H̄` of shape `(j+1) × j`.
    pub fn hbar(&self) -> Array2<f64> {
        let j = self.cols.len();
        let mut h = Array2::zeros((j + 1, j));
        for (k, col) in self.cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                h[[i, k]] = *v;
            }
        }
        h
    }

    /// Back substitution; falls back to the SVD minimal-norm solution when `R` is singular.
    pub fn solve(&self) -> Result<LsSolution> {
        let j = self.cols.len();
        if j == 0 {
            return Ok(LsSolution {
                y: Vec::new(),
                residual: self.beta,
                rank_deficient: false,
            });
        }
        let diag_max = self.r.iter().enumerate().map(|(k, c)| c[k].abs()).fold(0.0, f64::max);
        let singular = self
            .r
            .iter()
            .enumerate()
            .any(|(k, c)| c[k].abs() <= 1e-14 * diag_max || diag_max == 0.0);
        if singular {
            return min_norm_solution(self.hbar().view(), self.beta);
        }
        let mut y = vec![0.0; j];
        for k in (0..j).rev() {
            let mut acc = self.g[k];
            for (l, yl) in y.iter().enumerate().skip(k + 1) {
                acc -= self.r[l][k] * yl;
            }
            y[k] = acc / self.r[k][k];
        }
        Ok(LsSolution {
            y,
            residual: self.residual(),
            rank_deficient: false,
        })
    }
}

fn min_norm_solution(hbar: ArrayView2<f64>, beta: f64) -> Result<LsSolution> {
    let (rows, _) = hbar.dim();
    let (u, s, vt) = svd_thin(hbar)?;
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let cutoff = 1e-14 * smax.max(f64::MIN_POSITIVE);
    let mut rhs = Array1::zeros(rows);
    rhs[0] = beta;
    let coeffs = u.t().dot(&rhs);
    let mut y = Array1::zeros(vt.ncols());
    for (k, &sk) in s.iter().enumerate() {
        if sk > cutoff {
            y.scaled_add(coeffs[k] / sk, &vt.row(k));
        }
    }
    let residual = (&rhs - &hbar.dot(&y)).iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(LsSolution {
        y: y.to_vec(),
        residual,
        rank_deficient: true,
    })
}

/// Solves `min_y ‖β e₁ − H̄ y‖` for an upper-Hessenberg `H̄` of shape `(j+1) × j`.
pub fn hessenberg_lsq(hbar: ArrayView2<f64>, beta: f64) -> Result<LsSolution> {
    let (rows, cols) = hbar.dim();
    if rows != cols + 1 {
        return Err(Error::ShapeMismatch {
            context: "Hessenberg least squares",
            expected: vec![cols + 1, cols],
            found: vec![rows, cols],
        });
    }
    let mut ls = HessenbergLs::new(beta);
    for k in 0..cols {
        let col: Vec<f64> = (0..k + 2).map(|i| hbar[[i, k]]).collect();
        ls.push(&col)?;
    }
    ls.solve()
}

/// Smallest singular value of `H̄`.
pub fn sigma_min(ls: &HessenbergLs) -> Result<Option<f64>> {
    if ls.is_empty() {
        return Ok(None);
    }
    let (_, s, _) = svd_thin(ls.hbar().view())?;
    Ok(s.iter().cloned().reduce(f64::min))
}
