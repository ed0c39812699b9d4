//! Experiment drivers behind the `ttkry` binary: configuration, operator caching, the
//! convection–diffusion and parametric solver runs, and the randomized property suite.

mod cache;
mod config;
mod convdiff;
mod output;
mod ppde;
pub mod proptests;

pub use cache::OperatorCache;
pub use config::{Experiment, ExperimentConfig, Precond};
pub use convdiff::{run_convdiff, solve_convdiff, ConvDiffSystem};
pub use output::{RunOutput, Summary, SUMMARY_SCHEMA, SUMMARY_VERSION};
pub use ppde::{run_ppde, solve_ppde, PpdeSystem};
pub use proptests::{run_proptests, PropOutcome, PropReport};
