//! Restarted GMRES with relaxed matrix–vector accuracy.
//!
//! The driver is generic over [`KrylovVector`], so the same code runs on TT tensors and on
//! dense `Array1<f64>` vectors. The operator is a closure `(v, δ) -> A·v` evaluated with
//! relative accuracy `δ`; the relaxation schedule lets `δ` grow as the computed residual
//! shrinks.

mod config;
mod gmres;
mod hessenberg;
mod record;
mod vector;

pub use config::{relax_schedule, SolverConfig};
pub use gmres::{relaxed_gmres, Arnoldi, ArnoldiStep};
pub use hessenberg::{hessenberg_lsq, sigma_min, HessenbergLs, LsSolution};
pub use record::{ConvergenceRecord, IterationRow, RestartRow, CSV_HEADER};
pub use vector::KrylovVector;
