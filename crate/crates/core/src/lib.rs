//! Tensor-train arithmetic and rounding, with a relaxed inexact GMRES solver for linear
//! systems whose operator and iterates are kept in TT format.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod dmrg;
pub mod experiment;
pub mod error;
pub mod krylov;
pub mod linalg;
pub mod operators;
pub mod oracle;
pub mod round;
pub mod tt;

pub use error::{Error, Result};
pub use round::{round, round_sum, rounded_matvec, source_norm, LocalPolicy, TruncationSpec, TtSource};
pub use tt::{DenseTensor, Shape, TtMatrix, TtTensor};
