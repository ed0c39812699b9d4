use ndarray::{Array1, Array2, Array3, Axis};
use rand::Rng;
use rand_distr::StandardNormal;

use super::{DenseTensor, InvalidTt, Shape, DEFAULT_DENSE_GUARD};
use crate::error::{Error, Result};
use crate::linalg::ReshapeC;

/// Hard cap on any TT rank the library will form; exceeding it is an error.
pub const DEFAULT_RANK_CAP: usize = 8192;

pub(crate) fn check_rank_cap(rank: usize, context: &'static str) -> Result<()> {
    if rank > DEFAULT_RANK_CAP {
        return Err(Error::RankCapExceeded {
            rank,
            cap: DEFAULT_RANK_CAP,
            context,
        });
    }
    Ok(())
}

/// A d-dimensional tensor as a chain of order-3 cores `G_k` of extent `r_{k-1} × n_k × r_k`,
/// so that `A(i_1,…,i_d) = G_1(i_1)⋯G_d(i_d)`.
#[derive(Clone, Debug)]
pub struct TtTensor {
    cores: Vec<Array3<f64>>,
}

impl TtTensor {
    /// Builds a tensor train and checks every structural invariant.
    pub fn new(cores: Vec<Array3<f64>>) -> Result<Self> {
        let t = TtTensor { cores };
        t.validate()?;
        Ok(t)
    }

    /// Skips validation. Use [`TtTensor::validate`] to diagnose the result.
    pub fn from_cores_unchecked(cores: Vec<Array3<f64>>) -> Self {
        TtTensor { cores }
    }

    pub fn validate(&self) -> std::result::Result<(), InvalidTt> {
        let d = self.cores.len();
        if d == 0 {
            return Err(InvalidTt::Empty);
        }
        let first = self.cores[0].dim().0;
        if first != 1 {
            return Err(InvalidTt::BoundaryRank { side: "left", rank: first });
        }
        let last = self.cores[d - 1].dim().2;
        if last != 1 {
            return Err(InvalidTt::BoundaryRank { side: "right", rank: last });
        }
        for (k, core) in self.cores.iter().enumerate() {
            let (r0, n, r1) = core.dim();
            if n == 0 {
                return Err(InvalidTt::EmptyMode { core: k + 1 });
            }
            if r0 == 0 || r1 == 0 {
                return Err(InvalidTt::ZeroRank { core: k + 1 });
            }
            if k + 1 < d && r1 != self.cores[k + 1].dim().0 {
                return Err(InvalidTt::RankChain {
                    core: k + 1,
                    right: r1,
                    next_left: self.cores[k + 1].dim().0,
                });
            }
        }
        Ok(())
    }

    /// Rank-1 tensor `v_1 ⊗ ⋯ ⊗ v_d`.
    pub fn rank_one(factors: &[Array1<f64>]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidShape("rank-one tensor needs at least one factor".into()));
        }
        let cores = factors
            .iter()
            .map(|v| v.clone().into_shape_c((1, v.len(), 1)).map_err(Error::from))
            .collect::<Result<Vec<_>>>()?;
        TtTensor::new(cores)
    }

    pub fn ones(shape: &Shape) -> Self {
        TtTensor {
            cores: shape.dims().iter().map(|&n| Array3::ones((1, n, 1))).collect(),
        }
    }

    /// The canonical zero tensor: all ranks 1, all entries 0.
    pub fn zeros(shape: &Shape) -> Self {
        TtTensor {
            cores: shape.dims().iter().map(|&n| Array3::zeros((1, n, 1))).collect(),
        }
    }

    /// Random cores with i.i.d. standard normal entries. `ranks` are the `d − 1` interior ranks.
    pub fn random<R: Rng + ?Sized>(shape: &Shape, ranks: &[usize], rng: &mut R) -> Result<Self> {
        let d = shape.order();
        if ranks.len() + 1 != d {
            return Err(Error::InvalidShape(format!(
                "{} interior ranks given for order {}",
                ranks.len(),
                d
            )));
        }
        let mut full_ranks = vec![1];
        full_ranks.extend_from_slice(ranks);
        full_ranks.push(1);
        let cores = (0..d)
            .map(|k| {
                Array3::from_shape_simple_fn((full_ranks[k], shape.dims()[k], full_ranks[k + 1]), || {
                    rng.sample::<f64, _>(StandardNormal)
                })
            })
            .collect();
        TtTensor::new(cores)
    }

    pub fn cores(&self) -> &[Array3<f64>] {
        &self.cores
    }

    pub fn core(&self, k: usize) -> &Array3<f64> {
        &self.cores[k]
    }

    pub fn into_cores(self) -> Vec<Array3<f64>> {
        self.cores
    }

    pub(crate) fn cores_mut(&mut self) -> &mut [Array3<f64>] {
        &mut self.cores
    }

    pub fn order(&self) -> usize {
        self.cores.len()
    }

    /// `r_0, …, r_d`.
    pub fn ranks(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.cores.iter().map(|c| c.dim().0).collect();
        r.push(self.cores.last().map_or(1, |c| c.dim().2));
        r
    }

    pub fn max_rank(&self) -> usize {
        self.ranks().into_iter().max().unwrap_or(1)
    }

    pub fn mode_sizes(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.dim().1).collect()
    }

    pub fn shape(&self) -> Shape {
        Shape::new(self.mode_sizes()).expect("validated cores have positive mode sizes")
    }

    /// Number of stored scalars.
    pub fn storage(&self) -> usize {
        self.cores.iter().map(|c| c.len()).sum()
    }

    /// Evaluates `G_1(i_1)⋯G_d(i_d)` as a chain of vector–matrix products.
    pub fn element(&self, idx: &[usize]) -> Result<f64> {
        self.shape().check_index(idx)?;
        let mut row = Array1::from_elem(1, 1.0);
        for (core, &i) in self.cores.iter().zip(idx) {
            row = row.dot(&core.index_axis(Axis(1), i));
        }
        Ok(row[0])
    }

    /// Dense reconstruction under the default size guard.
    pub fn full(&self) -> Result<DenseTensor> {
        self.full_with_guard(DEFAULT_DENSE_GUARD)
    }

    pub fn full_with_guard(&self, guard: usize) -> Result<DenseTensor> {
        let shape = self.shape();
        let size = shape.checked_numel().unwrap_or(usize::MAX);
        if size > guard {
            return Err(Error::GuardExceeded {
                what: "full tensor",
                size,
                limit: guard,
            });
        }
        // rows: prefix multi-index (first index fastest), columns: current right rank
        let mut partial = Array2::from_elem((1, 1), 1.0);
        for core in &self.cores {
            let (_, n, r1) = core.dim();
            let rows = partial.nrows();
            let mut next = Array2::zeros((rows * n, r1));
            for i in 0..n {
                let block = partial.dot(&core.index_axis(Axis(1), i));
                next.slice_mut(ndarray::s![i * rows..(i + 1) * rows, ..])
                    .assign(&block);
            }
            partial = next;
        }
        DenseTensor::new(shape, partial.column(0).to_vec())
    }

    /// True when some core is identically zero, which makes the whole tensor zero.
    pub(crate) fn is_zero(&self) -> bool {
        self.cores.iter().any(|c| c.iter().all(|&v| v == 0.0))
    }
}
