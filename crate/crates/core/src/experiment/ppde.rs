use super::config::ExperimentConfig;
use super::output::{RunOutput, Summary};
use crate::error::Result;
use crate::krylov::relaxed_gmres;
use crate::operators::{P2Preconditioner, ParametricProblem};
use crate::round::{rounded_matvec, TruncationSpec};
use crate::tt::{dequantize, quantization_grouping, quantize_matrix_modes, quantize_modes, TtMatrix, TtTensor};

/// The parametric system `P₂Γ(a)u = P₂1`, optionally with the spatial mode quantized.
#[derive(Clone, Debug)]
pub struct PpdeSystem {
    pub problem: ParametricProblem,
    pub stiffness: TtMatrix,
    pub precond: P2Preconditioner,
    pub rhs: TtTensor,
    /// Digit grouping used to undo the quantization, when active.
    pub grouping: Option<Vec<usize>>,
    /// Tolerance factor of the inner `A·v` stage.
    pub stage_scale: f64,
}

impl PpdeSystem {
    pub fn assemble(cfg: &ExperimentConfig) -> Result<Self> {
        let newton = TruncationSpec::new(cfg.eps)?;
        let problem = ParametricProblem::assemble(cfg.nx, cfg.ny, cfg.d, cfg.m, &newton)?;
        if !cfg.qtt {
            return Ok(PpdeSystem {
                stiffness: problem.stiffness.clone(),
                precond: problem.precond.clone(),
                rhs: problem.rhs.clone(),
                problem,
                grouping: None,
                stage_scale: cfg.stage_scale,
            });
        }
        let mut which = vec![false; cfg.d + 1];
        which[0] = true;
        let mut sizes = vec![cfg.ny; cfg.d + 1];
        sizes[0] = cfg.nx;
        let q = |a: &TtMatrix| quantize_matrix_modes(a, 2, &which);
        Ok(PpdeSystem {
            stiffness: q(&problem.stiffness)?,
            precond: P2Preconditioner {
                inv_laplace: q(&problem.precond.inv_laplace)?,
                inverse_stiffness: q(&problem.precond.inverse_stiffness)?,
            },
            rhs: quantize_modes(&problem.rhs, 2, &which)?,
            grouping: Some(quantization_grouping(&sizes, 2)?),
            stage_scale: cfg.stage_scale,
            problem,
        })
    }

    /// `T_δ(P₂·T_{sδ}(Γ(a)·v))` with `s = stage_scale`.
    pub fn apply(&self, v: &TtTensor, spec: &TruncationSpec) -> Result<TtTensor> {
        let inner = TruncationSpec { eps: spec.eps * self.stage_scale, ..*spec };
        let w = rounded_matvec(&self.stiffness, v, &inner)?;
        self.precond.apply(&w, spec)
    }

    /// Undoes the quantization of a solution (identity when QTT is off).
    pub fn to_tt(&self, x: &TtTensor) -> Result<TtTensor> {
        match &self.grouping {
            Some(g) => dequantize(x, g, 2),
            None => Ok(x.clone()),
        }
    }
}

/// Solves the preconditioned parametric problem from a zero initial guess; the returned
/// solution is in the (unquantized) TT format.
pub fn solve_ppde(cfg: &ExperimentConfig) -> Result<(TtTensor, RunOutput)> {
    cfg.validate()?;
    let system = PpdeSystem::assemble(cfg)?;
    let b = system.precond.apply(&system.rhs, &TruncationSpec::new(cfg.eps * 1e-2)?)?;
    let x0 = TtTensor::zeros(&b.shape());
    let rmax = cfg.rmax;
    let (x, record) = relaxed_gmres(
        |v: &TtTensor, delta: f64| system.apply(v, &TruncationSpec::new(delta)?.with_rmax(rmax)?),
        &b,
        &x0,
        &cfg.solver(),
    )?;
    let extra = vec![
        ("coefficient_rank".to_string(), system.problem.coefficient.max_rank() as f64),
        ("reciprocal_rank".to_string(), system.problem.reciprocal.x.max_rank() as f64),
        ("newton_iterations".to_string(), system.problem.reciprocal.iterations as f64),
        ("newton_residual".to_string(), system.problem.reciprocal.residual),
        ("kl_grid_minimum".to_string(), system.problem.kl.grid_minimum()),
    ];
    let summary = Summary::new(cfg, &record, extra);
    Ok((system.to_tt(&x)?, RunOutput { record, summary }))
}

pub fn run_ppde(cfg: &ExperimentConfig) -> Result<RunOutput> {
    Ok(solve_ppde(cfg)?.1)
}
