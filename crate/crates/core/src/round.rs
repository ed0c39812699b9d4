//! The truncation operator `T_{ε,R}`: a right-to-left orthogonalization sweep followed by
//! a left-to-right sweep of truncated SVDs.
//!
//! Rounding works on any [`TtSource`], a tensor train whose cores are only available
//! through contractions. Linear combinations and operator–vector products implement it
//! without materializing their block-structured formal cores.

use ndarray::{s, Array2, Array3};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::linalg::{lq_thin, qr_thin, svd_thin, truncation_rank};
use crate::tt::{check_rank_cap, TtMatrix, TtTensor};
use crate::linalg::ReshapeC;

/// How the relative accuracy is distributed over the `d − 1` bond truncations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum LocalPolicy {
    /// `ε/√(d−1)` per bond; the accumulated error is at most `ε`.
    #[default]
    SplitSqrt,
    /// `ε/d` per bond.
    SplitD,
}

impl LocalPolicy {
    pub fn local(self, eps: f64, d: usize) -> f64 {
        match self {
            LocalPolicy::SplitSqrt if d > 1 => eps / ((d - 1) as f64).sqrt(),
            LocalPolicy::SplitSqrt => eps,
            LocalPolicy::SplitD => eps / d as f64,
        }
    }
}

/// Accuracy and rank cap of a rounding call.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationSpec {
    /// Relative Frobenius tolerance.
    pub eps: f64,
    /// Rank cap; `None` is unbounded.
    pub rmax: Option<usize>,
    pub policy: LocalPolicy,
}

impl TruncationSpec {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(Error::InvalidParameter(format!("rounding eps must be ≥ 0, got {eps}")));
        }
        Ok(TruncationSpec {
            eps,
            rmax: None,
            policy: LocalPolicy::SplitSqrt,
        })
    }

    /// Only numerically exact zeros are dropped.
    pub fn exact() -> Self {
        TruncationSpec {
            eps: 0.0,
            rmax: None,
            policy: LocalPolicy::SplitSqrt,
        }
    }

    pub fn with_rmax(mut self, rmax: Option<usize>) -> Result<Self> {
        if rmax == Some(0) {
            return Err(Error::InvalidParameter("rank cap must be ≥ 1".into()));
        }
        self.rmax = rmax;
        Ok(self)
    }

    pub fn with_policy(mut self, policy: LocalPolicy) -> Self {
        self.policy = policy;
        self
    }

    /// Same cap and policy at a different accuracy.
    pub fn at(self, eps: f64) -> Self {
        TruncationSpec { eps: eps.max(0.0), ..self }
    }
}

/// A tensor train accessed through right contractions of its (formal) cores.
pub trait TtSource {
    fn order(&self) -> usize;

    /// Mode size of core `k`.
    fn mode_size(&self, k: usize) -> usize;

    /// Formal rank `r_k` for `k = 0..=d`.
    fn formal_rank(&self, k: usize) -> usize;

    /// Core `k` (extent `r_k × n_k × r_{k+1}`) contracted over its right bond with
    /// `mat` (`r_{k+1} × s`), giving `r_k × n_k × s`.
    fn contract_right(&self, k: usize, mat: &Array2<f64>) -> Result<Array3<f64>>;

    /// `mat` (`s × r_k`) contracted with core `k` over its left bond, giving
    /// `s × n_k × r_{k+1}`.
    fn contract_left(&self, k: usize, mat: &Array2<f64>) -> Result<Array3<f64>>;
}

fn core_times(core: &Array3<f64>, mat: &Array2<f64>) -> Result<Array3<f64>> {
    let (r0, n, r1) = core.dim();
    let m = core
        .into_shape_c((r0 * n, r1))?;
    Ok(m.dot(mat).into_shape_c((r0, n, mat.ncols()))?)
}

fn times_core(mat: &Array2<f64>, core: &Array3<f64>) -> Result<Array3<f64>> {
    let (r0, n, r1) = core.dim();
    let m = core
        .into_shape_c((r0, n * r1))?;
    Ok(mat.dot(&m).into_shape_c((mat.nrows(), n, r1))?)
}

impl TtSource for TtTensor {
    fn order(&self) -> usize {
        TtTensor::order(self)
    }

    fn mode_size(&self, k: usize) -> usize {
        self.core(k).dim().1
    }

    fn formal_rank(&self, k: usize) -> usize {
        self.ranks()[k]
    }

    fn contract_right(&self, k: usize, mat: &Array2<f64>) -> Result<Array3<f64>> {
        core_times(self.core(k), mat)
    }

    fn contract_left(&self, k: usize, mat: &Array2<f64>) -> Result<Array3<f64>> {
        times_core(mat, self.core(k))
    }
}

/// Lazy `Σ_i c_i·t_i` over tensors of one shape.
#[derive(Clone, Debug)]
pub struct Combination<'a> {
    terms: Vec<(f64, &'a TtTensor)>,
    mode_sizes: Vec<usize>,
}

impl<'a> Combination<'a> {
    /// Terms with zero coefficient are dropped. At least one term must remain shaped.
    pub fn new(terms: &[(f64, &'a TtTensor)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty linear combination".into()))?;
        let mode_sizes = first.1.mode_sizes();
        for (_, t) in terms {
            if t.mode_sizes() != mode_sizes {
                return Err(Error::ShapeMismatch {
                    context: "linear combination",
                    expected: mode_sizes,
                    found: t.mode_sizes(),
                });
            }
        }
        let kept: Vec<(f64, &TtTensor)> = terms.iter().filter(|(c, _)| *c != 0.0).cloned().collect();
        let comb = Combination {
            terms: kept,
            mode_sizes,
        };
        for k in 1..comb.mode_sizes.len() {
            check_rank_cap(comb.formal_rank(k), "linear combination")?;
        }
        Ok(comb)
    }

    pub fn terms(&self) -> &[(f64, &'a TtTensor)] {
        &self.terms
    }

    /// `⟨Σ c_i t_i, v⟩` computed termwise.
    pub fn dot(&self, v: &TtTensor) -> Result<f64> {
        self.terms
            .iter()
            .map(|(c, t)| arith::dot(t, v).map(|x| c * x))
            .sum()
    }

    fn offsets(&self, k: usize) -> Vec<usize> {
        let mut off = vec![0];
        for (_, t) in &self.terms {
            off.push(off.last().unwrap() + t.core(k).dim().2);
        }
        off
    }
}

impl TtSource for Combination<'_> {
    fn order(&self) -> usize {
        self.mode_sizes.len()
    }

    fn mode_size(&self, k: usize) -> usize {
        self.mode_sizes[k]
    }

    fn formal_rank(&self, k: usize) -> usize {
        let d = self.order();
        if k == 0 || k == d || self.terms.is_empty() {
            return 1;
        }
        self.terms.iter().map(|(_, t)| t.core(k).dim().0).sum()
    }

    fn contract_right(&self, k: usize, mat: &Array2<f64>) -> Result<Array3<f64>> {
        let d = self.order();
        let n = self.mode_sizes[k];
        let scols = mat.ncols();
        if self.terms.is_empty() {
            return Ok(Array3::zeros((1, n, scols)));
        }
        let last = k == d - 1;
        if k == 0 {
            let off = if last { vec![0; self.terms.len() + 1] } else { self.offsets(0) };
            let mut out = Array3::zeros((1, n, scols));
            for (idx, (c, t)) in self.terms.iter().enumerate() {
                let block = if last {
                    mat.view().to_owned()
                } else {
                    mat.slice(s![off[idx]..off[idx + 1], ..]).to_owned()
                };
                out.scaled_add(*c, &core_times(t.core(0), &block)?);
            }
            return Ok(out);
        }
        let rows = self.formal_rank(k);
        let mut out = Array3::zeros((rows, n, scols));
        let off = if last { Vec::new() } else { self.offsets(k) };
        let mut row = 0;
        for (idx, (_, t)) in self.terms.iter().enumerate() {
            let block = if last {
                mat.to_owned()
            } else {
                mat.slice(s![off[idx]..off[idx + 1], ..]).to_owned()
            };
            let part = core_times(t.core(k), &block)?;
            let r = part.dim().0;
            out.slice_mut(s![row..row + r, .., ..]).assign(&part);
            row += r;
        }
        Ok(out)
    }

    fn contract_left(&self, k: usize, mat: &Array2<f64>) -> Result<Array3<f64>> {
        let d = self.order();
        let n = self.mode_sizes[k];
        let rows = mat.nrows();
        let cols = self.formal_rank(k + 1);
        let mut out = Array3::zeros((rows, n, cols));
        if self.terms.is_empty() {
            return Ok(out);
        }
        let last = k == d - 1;
        let (mut left, mut right) = (0, 0);
        for (c, t) in &self.terms {
            let core = t.core(k);
            let (r0, _, r1) = core.dim();
            let part = if k == 0 {
                times_core(mat, core)? * *c
            } else {
                times_core(&mat.slice(s![.., left..left + r0]).to_owned(), core)?
            };
            if last {
                out += &part;
            } else {
                out.slice_mut(s![.., .., right..right + r1]).assign(&part);
            }
            left += r0;
            right += r1;
        }
        Ok(out)
    }
}

/// Lazy operator–vector product `A·x` with merged rank index `a·r(x) + p`.
#[derive(Clone, Copy, Debug)]
pub struct Product<'a> {
    op: &'a TtMatrix,
    x: &'a TtTensor,
}

impl<'a> Product<'a> {
    pub fn new(op: &'a TtMatrix, x: &'a TtTensor) -> Result<Self> {
        if op.col_shape().dims() != x.mode_sizes().as_slice() {
            return Err(Error::ShapeMismatch {
                context: "operator application",
                expected: op.col_shape().dims().to_vec(),
                found: x.mode_sizes(),
            });
        }
        let (ra, rx) = (op.ranks(), x.ranks());
        for (a, b) in ra.iter().zip(&rx) {
            check_rank_cap(a * b, "operator application")?;
        }
        Ok(Product { op, x })
    }
}

impl TtSource for Product<'_> {
    fn order(&self) -> usize {
        self.x.order()
    }

    fn mode_size(&self, k: usize) -> usize {
        self.op.core(k).dim().1
    }

    fn formal_rank(&self, k: usize) -> usize {
        self.op.ranks()[k] * self.x.ranks()[k]
    }

    fn contract_right(&self, k: usize, mat: &Array2<f64>) -> Result<Array3<f64>> {
        let ca = self.op.core(k);
        let cx = self.x.core(k);
        let (ra0, m, n, ra1) = ca.dim();
        let (rx0, _, rx1) = cx.dim();
        let scols = mat.ncols();
        // T[p, j, b, s] = Σ_c x[p, j, c] · mat[(b, c), s]
        let x_mat = cx
            .into_shape_c((rx0 * n, rx1))?;
        let mat3 = mat
            .into_shape_c((ra1, rx1, scols))?
            .permuted_axes([1, 0, 2])
            .into_shape_c((rx1, ra1 * scols))?;
        let t = x_mat.dot(&mat3).into_shape_c((rx0, n, ra1, scols))?;
        // out[a, i, p, s] = Σ_{j, b} A[a, i, j, b] · T[p, j, b, s]
        let t_mat = t
            .permuted_axes([1, 2, 0, 3])
            .into_shape_c((n * ra1, rx0 * scols))?;
        let a_mat = ca
            .into_shape_c((ra0 * m, n * ra1))?;
        let out = a_mat.dot(&t_mat).into_shape_c((ra0, m, rx0, scols))?;
        Ok(out
            .permuted_axes([0, 2, 1, 3])
            .into_shape_c((ra0 * rx0, m, scols))?)
    }

    fn contract_left(&self, k: usize, mat: &Array2<f64>) -> Result<Array3<f64>> {
        let ca = self.op.core(k);
        let cx = self.x.core(k);
        let (ra0, m, n, ra1) = ca.dim();
        let (rx0, _, rx1) = cx.dim();
        let srows = mat.nrows();
        // U[s, a, j, c] = Σ_p mat[s, (a, p)] · x[p, j, c]
        let mat2 = mat
            .into_shape_c((srows * ra0, rx0))?;
        let x_mat = cx
            .into_shape_c((rx0, n * rx1))?;
        let u = mat2.dot(&x_mat).into_shape_c((srows, ra0, n, rx1))?;
        // out[s, i, b, c] = Σ_{a, j} A[a, i, j, b] · U[s, a, j, c]
        let u_mat = u
            .permuted_axes([0, 3, 1, 2])
            .into_shape_c((srows * rx1, ra0 * n))?;
        let a_mat = ca
            .view()
            .permuted_axes([0, 2, 1, 3])
            .into_shape_c((ra0 * n, m * ra1))?;
        let out = u_mat.dot(&a_mat).into_shape_c((srows, rx1, m, ra1))?;
        Ok(out
            .permuted_axes([0, 2, 3, 1])
            .into_shape_c((srows, m, ra1 * rx1))?)
    }
}

/// Right-to-left LQ sweep: the first core, the right-orthonormal cores (last core first) and
/// the Frobenius norm.
fn right_orthogonalize<S: TtSource + ?Sized>(src: &S) -> Result<(Array3<f64>, Vec<Array3<f64>>, f64)> {
    let d = src.order();
    let mut mat = Array2::eye(1);
    let mut right = Vec::with_capacity(d);
    for k in (1..d).rev() {
        let b = src.contract_right(k, &mat)?;
        let (rl, n, sc) = b.dim();
        let (l, q) = lq_thin(b.into_shape_c((rl, n * sc))?.view())?;
        let qr = q.nrows();
        right.push(q.into_shape_c((qr, n, sc))?);
        mat = l;
    }
    let first = src.contract_right(0, &mat)?;
    let norm = first.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !norm.is_finite() {
        return Err(Error::Linalg("non-finite values while rounding".into()));
    }
    Ok((first, right, norm))
}

/// Frobenius norm of a source through orthogonalization, free of the cancellation that
/// `√⟨x, x⟩` suffers for nearly cancelling sums.
pub fn source_norm<S: TtSource + ?Sized>(src: &S) -> Result<f64> {
    Ok(right_orthogonalize(src)?.2)
}

/// Formal ranks above this are first compressed by [`sketch_source`].
pub const SKETCH_THRESHOLD: usize = 512;

/// Extra sketch columns kept beyond the largest rank the rounding retains.
pub const SKETCH_OVERSAMPLING: usize = 12;

const SKETCH_SEED: u64 = 0x5eed_7770;

/// Rounds any source. A zero input yields the canonical all-rank-1 zero tensor.
///
/// Sources with a formal rank above [`SKETCH_THRESHOLD`] are first compressed by a randomized
/// range sketch whose width grows until it exceeds every retained rank by
/// [`SKETCH_OVERSAMPLING`]; the sketch is then rounded exactly. The sketch uses a fixed seed,
/// so results are reproducible.
pub fn round_source<S: TtSource + ?Sized>(src: &S, spec: &TruncationSpec) -> Result<TtTensor> {
    let d = src.order();
    let max_formal = (0..=d).map(|k| src.formal_rank(k)).max().unwrap_or(1);
    if max_formal > SKETCH_THRESHOLD {
        let mut width = 4 * SKETCH_OVERSAMPLING;
        loop {
            let sketch = sketch_source(src, width, SKETCH_SEED)?;
            let out = round_exact(&sketch, spec)?;
            // a bond narrower than `width` is limited by the mode sizes and therefore exact
            let saturated = out
                .ranks()
                .iter()
                .zip(sketch.ranks())
                .any(|(&r, s)| s == width && r + SKETCH_OVERSAMPLING > s);
            if !saturated || width >= max_formal {
                return Ok(out);
            }
            width *= 2;
        }
    }
    round_exact(src, spec)
}

/// Randomized left-to-right compression of a source to bond dimensions at most `width`.
///
/// Right partial contractions with a Gaussian tensor train of rank `width` span the column
/// spaces of the right unfoldings; a QR of the sketched left part then gives left-orthonormal
/// cores. The result is exact when `width` reaches every formal rank and is otherwise a
/// near-optimal rank-`width` approximation with high probability. The memory footprint is
/// linear in the formal ranks.
pub fn sketch_source<S: TtSource + ?Sized>(src: &S, width: usize, seed: u64) -> Result<TtTensor> {
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};
    let d = src.order();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let widths: Vec<usize> = (0..=d)
        .map(|k| if k == 0 || k == d { 1 } else { width.min(src.formal_rank(k)) })
        .collect();
    // w[k]: formal_rank(k) × widths[k]
    let mut w: Vec<Array2<f64>> = vec![Array2::eye(1); d + 1];
    for k in (1..d).rev() {
        let n = src.mode_size(k);
        let b = src.contract_right(k, &w[k + 1])?;
        let rf = b.dim().0;
        let omega = Array2::from_shape_fn((widths[k], n * widths[k + 1]), |_| StandardNormal.sample(&mut rng));
        let mut wk = b.into_shape_c((rf, n * widths[k + 1]))?.dot(&omega.t());
        let scale = wk.iter().map(|v| v * v).sum::<f64>().sqrt();
        if scale > 0.0 {
            wk.mapv_inplace(|v| v / scale);
        }
        w[k] = wk;
    }
    let mut carry = Array2::eye(1);
    let mut cores = Vec::with_capacity(d);
    for k in 0..d {
        let z = src.contract_left(k, &carry)?;
        let (r, n, rf) = z.dim();
        if k + 1 == d {
            cores.push(z);
            break;
        }
        let zm = z.into_shape_c((r * n, rf))?;
        let (q, _) = qr_thin(zm.dot(&w[k + 1]).view())?;
        carry = q.t().dot(&zm);
        let qc = q.ncols();
        cores.push(q.into_shape_c((r, n, qc))?);
    }
    TtTensor::new(cores)
}

fn round_exact<S: TtSource + ?Sized>(src: &S, spec: &TruncationSpec) -> Result<TtTensor> {
    let d = src.order();
    let (first, right, norm) = right_orthogonalize(src)?;
    let mut cores: Vec<Array3<f64>> = Vec::with_capacity(d);
    let sizes: Vec<usize> = (0..d).map(|k| src.mode_size(k)).collect();
    if norm == 0.0 {
        return Ok(TtTensor::zeros(&crate::tt::Shape::new(sizes)?));
    }
    cores.push(first);
    cores.extend(right.into_iter().rev());

    let tol = spec.policy.local(spec.eps, d) * norm;
    for k in 0..d.saturating_sub(1) {
        let (r0, n, r1) = cores[k].dim();
        let m = (&cores[k]).into_shape_c((r0 * n, r1))?;
        let (u, sv, vt) = svd_thin(m.view())?;
        let r = truncation_rank(&sv, tol, spec.rmax);
        cores[k] = u.slice(s![.., ..r]).to_owned().into_shape_c((r0, n, r))?;
        let mut carry = vt.slice(s![..r, ..]).to_owned();
        for (mut row, &sigma) in carry.outer_iter_mut().zip(sv.iter()) {
            row.mapv_inplace(|v| v * sigma);
        }
        let (_, n1, r2) = cores[k + 1].dim();
        let next = (&cores[k + 1]).into_shape_c((r1, n1 * r2))?;
        cores[k + 1] = carry.dot(&next).into_shape_c((r, n1, r2))?;
    }
    TtTensor::new(cores)
}

/// `T_{ε,R}(t)`.
pub fn round(t: &TtTensor, spec: &TruncationSpec) -> Result<TtTensor> {
    round_source(t, spec)
}

/// `T_{ε,R}(Σ_i c_i·t_i)` without forming the exact sum.
pub fn round_sum(terms: &[(f64, &TtTensor)], spec: &TruncationSpec) -> Result<TtTensor> {
    round_source(&Combination::new(terms)?, spec)
}

/// `T_{ε,R}(A·x)` without forming the exact product.
pub fn rounded_matvec(op: &TtMatrix, x: &TtTensor, spec: &TruncationSpec) -> Result<TtTensor> {
    round_source(&Product::new(op, x)?, spec)
}

/// Sequentially rounded preconditioned product `T(M·T(A·v))`.
pub fn preconditioned_matvec(
    precond: &TtMatrix,
    op: &TtMatrix,
    v: &TtTensor,
    spec: &TruncationSpec,
) -> Result<TtTensor> {
    let av = rounded_matvec(op, v, spec)?;
    rounded_matvec(precond, &av, spec)
}

/// Rounds an operator through its merged-mode tensor view (relative to its Frobenius norm).
pub fn round_matrix(op: &TtMatrix, spec: &TruncationSpec) -> Result<TtMatrix> {
    let t = round(&op.to_tensor_view(), spec)?;
    TtMatrix::from_tensor_view(&t, &op.row_shape(), &op.col_shape())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tt::Shape;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_input_gives_rank_one_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = TtTensor::random(&Shape::uniform(4, 3).unwrap(), &[2, 3, 2], &mut rng).unwrap();
        let spec = TruncationSpec::new(1e-10).unwrap();
        let z = round(&arith::scale(&a, 0.0), &spec).unwrap();
        assert_eq!(z.ranks(), vec![1; 5]);
        assert_eq!(arith::norm(&z), 0.0);
        let cancelled = round_sum(&[(1.0, &a), (-1.0, &a)], &spec).unwrap();
        assert!(arith::norm(&cancelled) < 1e-12 * arith::norm(&a));
    }

    #[test]
    fn truncation_spec_validation() {
        assert!(TruncationSpec::new(-1e-3).is_err());
        assert!(TruncationSpec::new(f64::NAN).is_err());
        assert!(TruncationSpec::exact().with_rmax(Some(0)).is_err());
        assert_eq!(LocalPolicy::SplitD.local(1.0, 4), 0.25);
        assert!((LocalPolicy::SplitSqrt.local(1.0, 5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn lazy_sum_matches_materialized() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let shape = Shape::uniform(3, 4).unwrap();
        let a = TtTensor::random(&shape, &[2, 3], &mut rng).unwrap();
        let b = TtTensor::random(&shape, &[3, 2], &mut rng).unwrap();
        let lazy = round_sum(&[(2.0, &a), (-0.5, &b)], &TruncationSpec::exact()).unwrap();
        let exact = arith::add(&arith::scale(&a, 2.0), &arith::scale(&b, -0.5)).unwrap();
        let diff = lazy.full().unwrap().distance(&exact.full().unwrap()).unwrap();
        assert!(diff < 1e-12 * arith::norm(&exact));
    }

    fn materialize<S: TtSource>(src: &S) -> TtTensor {
        let d = src.order();
        let cores = (0..d)
            .map(|k| src.contract_left(k, &Array2::eye(src.formal_rank(k))).unwrap())
            .collect();
        TtTensor::new(cores).unwrap()
    }

    #[test]
    fn left_and_right_contractions_agree_with_exact_arithmetic() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let shape = Shape::new(vec![3, 2, 4]).unwrap();
        let a = TtTensor::random(&shape, &[2, 3], &mut rng).unwrap();
        let b = TtTensor::random(&shape, &[1, 2], &mut rng).unwrap();
        let comb = Combination::new(&[(1.5, &a), (-2.0, &b)]).unwrap();
        let exact = arith::add(&arith::scale(&a, 1.5), &arith::scale(&b, -2.0)).unwrap();
        let dense = exact.full().unwrap();
        assert!(materialize(&comb).full().unwrap().distance(&dense).unwrap() < 1e-12);

        let op = TtMatrix::from_tensor_view(
            &TtTensor::random(&Shape::new(vec![9, 4, 16]).unwrap(), &[2, 2], &mut rng).unwrap(),
            &Shape::new(vec![3, 2, 4]).unwrap(),
            &shape,
        )
        .unwrap();
        let prod = Product::new(&op, &a).unwrap();
        let exact = arith::matvec(&op, &a).unwrap();
        let dense = exact.full().unwrap();
        assert!(materialize(&prod).full().unwrap().distance(&dense).unwrap() < 1e-12);
        let rounded = rounded_matvec(&op, &a, &TruncationSpec::exact()).unwrap();
        assert!(rounded.full().unwrap().distance(&dense).unwrap() < 1e-10 * arith::norm(&exact));
    }

    #[test]
    fn single_mode_rounding_is_exact() {
        let t = TtTensor::rank_one(&[ndarray::array![1.0, 2.0, 3.0]]).unwrap();
        let r = round(&t, &TruncationSpec::new(0.9).unwrap()).unwrap();
        assert_eq!(r.full().unwrap(), t.full().unwrap());
    }
}
