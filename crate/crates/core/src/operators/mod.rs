//! Benchmark operators: 1D finite-difference stencils, the 3D convection–diffusion problem,
//! the exponential-sum inverse Laplacian, and the parametric KL diffusion problem.

mod convdiff;
mod expsum;
mod parametric;
mod stencil;

pub use convdiff::{conv_diff_3d, conv_diff_rhs, conv_diff_terms, ASSEMBLY_EPS};
pub use expsum::{expsum_nodes, inv_laplace_expsum, inv_laplace_expsum_on};
pub use parametric::{
    kl_coefficient, kl_stiffness, newton_reciprocal, p2_preconditioner, parametric_inv_laplace, KlCoefficient,
    NewtonResult, P2Preconditioner, ParametricProblem, NEWTON_MAXIT,
};
pub use stencil::{grad_1d, laplace_1d, laplace_eigen, stiffness_1d, Grid1D};
