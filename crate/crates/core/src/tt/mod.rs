//! Tensor-train tensors and operators, dense conversion, TT-SVD, quantization and storage.
//!
//! Dense tensors use a first-index-fastest linearization throughout: the entry at
//! `(i_1, …, i_d)` lives at `i_1 + n_1·(i_2 + n_2·(…))`. Operator matricizations use the
//! same order for both row and column multi-indices.

mod decompose;
mod dense;
mod io;
mod kron;
mod matrix;
mod quantize;
mod shape;
mod tensor;

pub use decompose::{tt_svd, tt_svd_with_caps};
pub use dense::{DenseTensor, DEFAULT_DENSE_GUARD};
pub use io::{read_any, read_matrix, read_tensor, write_matrix, write_tensor, TtFile, FORMAT_VERSION, MAGIC};
pub use kron::KronTerm;
pub use matrix::TtMatrix;
pub use quantize::{dequantize, quantization_grouping, quantize, quantize_matrix_modes, quantize_modes};
pub use shape::Shape;
pub use tensor::{TtTensor, DEFAULT_RANK_CAP};

pub(crate) use tensor::check_rank_cap;

use thiserror::Error;

/// First violated structural invariant of a tensor train. Core indices are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum InvalidTt {
    #[error("no cores")]
    Empty,
    #[error("boundary rank: {side} boundary rank is {rank}, expected 1")]
    BoundaryRank { side: &'static str, rank: usize },
    #[error("rank chain at k={core}: right rank {right} but core {} has left rank {next_left}", core + 1)]
    RankChain {
        core: usize,
        right: usize,
        next_left: usize,
    },
    #[error("zero rank at core {core}")]
    ZeroRank { core: usize },
    #[error("empty mode at core {core}")]
    EmptyMode { core: usize },
}
