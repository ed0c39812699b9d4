//! Two-site DMRG (MALS) truncation of a tensor train.
//!
//! The approximation `x` of a target `y` is improved one pair of neighbouring cores at a
//! time: the pair is replaced by the least-squares optimal supercore, which is the projection
//! of `y` onto the orthonormal frame spanned by the remaining cores, and then split back by
//! a truncated SVD. The target is only touched through interface contractions, so a lazy
//! operator–vector product `A·x` is never formed explicitly.
//!
//! Truncating the projected supercore underestimates the rank whenever the frame is poor,
//! so a few extra singular vectors (`rank_boost`) are kept in every split. An optional final
//! sweep without boost trims the ranks back to what the accuracy actually needs.

use ndarray::{s, Array2, Array3, Array4};
use serde::{Deserialize, Serialize};

use crate::arith::contract_interface;
use crate::error::{Error, Result};
use crate::linalg::{lq_thin, svd_thin, tail_norm, truncation_rank};
use crate::round::{LocalPolicy, Product, TtSource};
use crate::tt::{Shape, TtMatrix, TtTensor};
use crate::linalg::ReshapeC;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DmrgOptions {
    /// Target relative accuracy `‖x − y‖ ≤ eps·‖y‖`.
    pub eps: f64,
    pub max_sweeps: usize,
    /// Extra singular vectors kept beyond the local accuracy rank.
    pub rank_boost: usize,
    pub local_eps_policy: LocalPolicy,
    /// Run one more sweep with `rank_boost = 0` after the boosted sweeps.
    pub final_cleanup: bool,
    pub rmax: Option<usize>,
}

impl Default for DmrgOptions {
    fn default() -> Self {
        DmrgOptions {
            eps: 1e-6,
            max_sweeps: 10,
            rank_boost: 3,
            local_eps_policy: LocalPolicy::SplitD,
            final_cleanup: true,
            rmax: None,
        }
    }
}

impl DmrgOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps >= 0.0) || !self.eps.is_finite() {
            return Err(Error::InvalidParameter(format!("dmrg eps must be ≥ 0, got {}", self.eps)));
        }
        if self.max_sweeps == 0 {
            return Err(Error::InvalidParameter("max_sweeps must be ≥ 1".into()));
        }
        if self.rmax == Some(0) {
            return Err(Error::InvalidParameter("rank cap must be ≥ 1".into()));
        }
        Ok(())
    }
}

/// What to approximate.
#[derive(Clone, Copy, Debug)]
pub enum DmrgTarget<'a> {
    Tensor(&'a TtTensor),
    /// The product `A·x`, contracted lazily.
    MatVec(&'a TtMatrix, &'a TtTensor),
}

#[derive(Clone, Debug)]
pub struct DmrgResult {
    pub tensor: TtTensor,
    /// `‖x − y‖/‖y‖` of the returned tensor.
    pub relative_error: f64,
    /// Whether the returned tensor meets `eps`. When false the best iterate seen is returned.
    pub converged: bool,
    /// Whether the sweep loop ended because supercore updates fell below `eps/10`.
    pub stagnated: bool,
    /// Sweeps performed, the cleanup sweep included.
    pub sweeps: usize,
    /// Relative objective `‖x − y‖²/‖y‖²` after every supercore update.
    pub objective: Vec<f64>,
}

/// Splits a supercore `(r_{k-1}, n_k, n_{k+1}, r_{k+1})` into a left-orthonormal core and
/// a remainder. `eps_loc` is relative to the Frobenius norm of `w`.
pub fn supercore_split(
    w: &Array4<f64>,
    eps_loc: f64,
    rank_boost: usize,
    rmax: Option<usize>,
) -> Result<(Array3<f64>, Array3<f64>)> {
    let (r0, n0, n1, r1) = w.dim();
    let mat = w
        .into_shape_c((r0 * n0, n1 * r1))?;
    let norm = mat.iter().map(|v| v * v).sum::<f64>().sqrt();
    let split = split_matrix(&mat, eps_loc * norm, rank_boost, rmax, Orient::Left)?;
    Ok((
        split.left.into_shape_c((r0, n0, split.rank))?,
        split.right.into_shape_c((split.rank, n1, r1))?,
    ))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Orient {
    /// The left factor is orthonormal.
    Left,
    /// The right factor is orthonormal.
    Right,
}

struct Split {
    left: Array2<f64>,
    right: Array2<f64>,
    rank: usize,
    tail: f64,
}

fn split_matrix(
    mat: &Array2<f64>,
    tol: f64,
    rank_boost: usize,
    rmax: Option<usize>,
    orient: Orient,
) -> Result<Split> {
    let (u, sv, vt) = svd_thin(mat.view())?;
    let mut r = truncation_rank(&sv, tol, None);
    r = (r + rank_boost).min(sv.len());
    if let Some(cap) = rmax {
        r = r.min(cap);
    }
    let r = r.max(1);
    let mut left = u.slice(s![.., ..r]).to_owned();
    let mut right = vt.slice(s![..r, ..]).to_owned();
    match orient {
        Orient::Left => {
            for (mut row, &sigma) in right.outer_iter_mut().zip(sv.iter()) {
                row.mapv_inplace(|v| v * sigma);
            }
        }
        Orient::Right => {
            for (mut col, &sigma) in left.columns_mut().into_iter().zip(sv.iter()) {
                col.mapv_inplace(|v| v * sigma);
            }
        }
    }
    Ok(Split {
        left,
        right,
        rank: r,
        tail: tail_norm(&sv, r),
    })
}

/// Approximates the target within `opts.eps` starting from `x0`.
pub fn dmrg_truncate(y: DmrgTarget<'_>, x0: &TtTensor, opts: &DmrgOptions) -> Result<DmrgResult> {
    opts.validate()?;
    match y {
        DmrgTarget::Tensor(t) => Sweeper::new(t, x0, opts)?.run(),
        DmrgTarget::MatVec(a, x) => {
            let prod = Product::new(a, x)?;
            Sweeper::new(&prod, x0, opts)?.run()
        }
    }
}

fn mat2(core: &Array3<f64>, rows: usize, cols: usize) -> Result<Array2<f64>> {
    Ok(core.into_shape_c((rows, cols))?)
}

/// `‖y‖²` through its formal cores, one at a time.
fn source_norm2<S: TtSource + ?Sized>(y: &S) -> Result<f64> {
    let mut phi = Array2::eye(1);
    for k in 0..y.order() {
        let core = y.contract_left(k, &Array2::eye(y.formal_rank(k)))?;
        phi = contract_interface(&phi, &core, &core);
    }
    Ok(phi[[0, 0]])
}

struct Sweeper<'a, S: TtSource + ?Sized> {
    y: &'a S,
    opts: &'a DmrgOptions,
    d: usize,
    x: Vec<Array3<f64>>,
    /// `phi[k]`: left interface, `rx_k × ry_k`.
    phi: Vec<Array2<f64>>,
    /// `psi[k]`: right interface, `ry_k × rx_k`.
    psi: Vec<Array2<f64>>,
    y_norm2: f64,
    objective: Vec<f64>,
}

impl<'a, S: TtSource + ?Sized> Sweeper<'a, S> {
    fn new(y: &'a S, x0: &TtTensor, opts: &'a DmrgOptions) -> Result<Self> {
        let d = y.order();
        let sizes: Vec<usize> = (0..d).map(|k| y.mode_size(k)).collect();
        if x0.mode_sizes() != sizes {
            return Err(Error::ShapeMismatch {
                context: "dmrg initial guess",
                expected: sizes,
                found: x0.mode_sizes(),
            });
        }
        x0.validate()?;
        Ok(Sweeper {
            y,
            opts,
            d,
            x: x0.cores().to_vec(),
            phi: vec![Array2::eye(1); d + 1],
            psi: vec![Array2::eye(1); d + 1],
            y_norm2: source_norm2(y)?,
            objective: Vec::new(),
        })
    }

    fn shape(&self) -> Result<Shape> {
        Shape::new((0..self.d).map(|k| self.y.mode_size(k)).collect())
    }

    fn run(mut self) -> Result<DmrgResult> {
        if self.y_norm2 <= 0.0 {
            return Ok(DmrgResult {
                tensor: TtTensor::zeros(&self.shape()?),
                relative_error: 0.0,
                converged: true,
                stagnated: true,
                sweeps: 0,
                objective: Vec::new(),
            });
        }
        if self.d == 1 {
            let core = self.y.contract_left(0, &Array2::eye(1))?;
            return Ok(DmrgResult {
                tensor: TtTensor::new(vec![core])?,
                relative_error: 0.0,
                converged: true,
                stagnated: true,
                sweeps: 1,
                objective: vec![0.0],
            });
        }
        self.right_orthogonalize()?;
        for k in (2..self.d).rev() {
            self.update_psi(k, None)?;
        }

        let eps = self.opts.eps;
        let mut best: Option<(f64, Vec<Array3<f64>>)> = None;
        let mut sweeps = 0;
        let mut stagnated = false;
        for _ in 0..self.opts.max_sweeps {
            let change = self.sweep(self.opts.rank_boost)?;
            sweeps += 1;
            let err = self.relative_error()?;
            if best.as_ref().is_none_or(|(e, _)| err < *e) {
                best = Some((err, self.x.clone()));
            }
            if change < eps / 10.0 {
                stagnated = true;
                break;
            }
        }
        if self.opts.final_cleanup {
            self.sweep(0)?;
            sweeps += 1;
            let err = self.relative_error()?;
            // The cleanup result stands whenever it meets the target.
            if err <= eps || best.as_ref().is_none_or(|(e, _)| err < *e) {
                best = Some((err, self.x.clone()));
            }
        }
        let (relative_error, cores) = best.expect("at least one sweep");
        Ok(DmrgResult {
            tensor: TtTensor::new(cores)?,
            relative_error,
            converged: relative_error <= eps,
            stagnated,
            sweeps,
            objective: self.objective,
        })
    }

    fn right_orthogonalize(&mut self) -> Result<()> {
        for k in (1..self.d).rev() {
            let (r0, n, r1) = self.x[k].dim();
            let (l, q) = lq_thin(mat2(&self.x[k], r0, n * r1)?.view())?;
            let r = q.nrows();
            self.x[k] = q.into_shape_c((r, n, r1))?;
            let (p0, pn, _) = self.x[k - 1].dim();
            let prev = mat2(&self.x[k - 1], p0 * pn, r0)?;
            self.x[k - 1] = prev.dot(&l).into_shape_c((p0, pn, r))?;
        }
        Ok(())
    }

    /// Recomputes `psi[k]` from core `k` of `x`, reusing `y`'s contraction if available.
    fn update_psi(&mut self, k: usize, contracted: Option<Array3<f64>>) -> Result<()> {
        let r = match contracted {
            Some(r) => r,
            None => self.y.contract_right(k, &self.psi[k + 1])?,
        };
        let (ry, n, rx1) = r.dim();
        let xk = &self.x[k];
        let rx0 = xk.dim().0;
        self.psi[k] = mat2(&r, ry, n * rx1)?.dot(&mat2(xk, rx0, n * rx1)?.t());
        Ok(())
    }

    fn sweep(&mut self, boost: usize) -> Result<f64> {
        let mut change: f64 = 0.0;
        for p in 0..self.d - 2 {
            change = change.max(self.update_pair(p, boost, Orient::Left)?);
        }
        for p in (0..self.d - 1).rev() {
            change = change.max(self.update_pair(p, boost, Orient::Right)?);
        }
        Ok(change)
    }

    /// Optimizes cores `p, p+1` and returns the relative supercore change.
    fn update_pair(&mut self, p: usize, boost: usize, orient: Orient) -> Result<f64> {
        let l = self.y.contract_left(p, &self.phi[p])?;
        let r = self.y.contract_right(p + 1, &self.psi[p + 2])?;
        let (rx0, n0, ry) = l.dim();
        let (_, n1, rx2) = r.dim();
        let w = mat2(&l, rx0 * n0, ry)?.dot(&mat2(&r, ry, n1 * rx2)?);

        let r_mid = self.x[p].dim().2;
        let current = mat2(&self.x[p], rx0 * n0, r_mid)?.dot(&mat2(&self.x[p + 1], r_mid, n1 * rx2)?);
        let w_norm2 = w.iter().map(|v| v * v).sum::<f64>();
        let w_norm = w_norm2.sqrt();
        let change = if w_norm > 0.0 {
            (&w - &current).iter().map(|v| v * v).sum::<f64>().sqrt() / w_norm
        } else {
            0.0
        };

        let tol = self.opts.local_eps_policy.local(self.opts.eps, self.d) * w_norm;
        let split = split_matrix(&w, tol, boost, self.opts.rmax, orient)?;
        let rank = split.rank;
        self.x[p] = split.left.into_shape_c((rx0, n0, rank))?;
        self.x[p + 1] = split.right.into_shape_c((rank, n1, rx2))?;
        let j = (self.y_norm2 - w_norm2 + split.tail * split.tail).max(0.0) / self.y_norm2;
        self.objective.push(j);

        match orient {
            Orient::Left => {
                self.phi[p + 1] = mat2(&self.x[p], rx0 * n0, rank)?.t().dot(&mat2(&l, rx0 * n0, ry)?);
            }
            Orient::Right => self.update_psi(p + 1, Some(r))?,
        }
        Ok(change)
    }

    fn relative_error(&self) -> Result<f64> {
        let x = TtTensor::new(self.x.clone())?;
        let mut cross = Array2::eye(1);
        for k in 0..self.d {
            let yk = self.y.contract_left(k, &cross)?;
            let (rx, n, ry) = yk.dim();
            let xk = x.core(k);
            cross = mat2(xk, rx * n, xk.dim().2)?.t().dot(&mat2(&yk, rx * n, ry)?);
        }
        let xy = cross[[0, 0]];
        let xx = crate::arith::dot(&x, &x)?;
        Ok(((self.y_norm2 - 2.0 * xy + xx).max(0.0) / self.y_norm2).sqrt())
    }
}
