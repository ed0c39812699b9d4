use super::cache::{cached, OperatorCache};
use super::config::{ExperimentConfig, Precond};
use super::output::{RunOutput, Summary};
use crate::error::Result;
use crate::krylov::relaxed_gmres;
use crate::operators::{conv_diff_3d, conv_diff_rhs, inv_laplace_expsum};
use crate::round::{rounded_matvec, TruncationSpec};
use crate::tt::{TtMatrix, TtTensor};

/// Assembled convection–diffusion system with its optional left preconditioner.
#[derive(Clone, Debug)]
pub struct ConvDiffSystem {
    pub op: TtMatrix,
    pub rhs: TtTensor,
    pub precond: Option<TtMatrix>,
    /// Tolerance factor of the inner `A·v` stage.
    pub stage_scale: f64,
}

impl ConvDiffSystem {
    pub fn assemble(cfg: &ExperimentConfig) -> Result<Self> {
        let cache = cfg.cache.as_ref().map(OperatorCache::new);
        let (n, alpha, m) = (cfg.n, cfg.alpha, cfg.m);
        let op = cached(cache.as_ref(), &format!("convdiff n={n} alpha={alpha:e}"), || {
            conv_diff_3d(n, alpha)
        })?;
        let precond = match cfg.precond {
            Precond::Expsum => Some(cached(cache.as_ref(), &format!("expsum n={n} d=3 M={m}"), || {
                inv_laplace_expsum(n, 3, m)
            })?),
            Precond::Identity => None,
        };
        Ok(ConvDiffSystem {
            op,
            rhs: conv_diff_rhs(n, alpha)?,
            precond,
            stage_scale: cfg.stage_scale,
        })
    }

    /// `T_δ(M·T_{sδ}(A·v))` with `s = stage_scale`, or `T_δ(A·v)` without preconditioner.
    pub fn apply(&self, v: &TtTensor, spec: &TruncationSpec) -> Result<TtTensor> {
        match &self.precond {
            Some(m) => {
                let inner = TruncationSpec { eps: spec.eps * self.stage_scale, ..*spec };
                let av = rounded_matvec(&self.op, v, &inner)?;
                rounded_matvec(m, &av, spec)
            }
            None => rounded_matvec(&self.op, v, spec),
        }
    }

    /// Preconditioned right-hand side `T(M·b)`, rounded well below `eps`.
    pub fn preconditioned_rhs(&self, eps: f64) -> Result<TtTensor> {
        match &self.precond {
            Some(m) => rounded_matvec(m, &self.rhs, &TruncationSpec::new(eps * 1e-2)?),
            None => Ok(self.rhs.clone()),
        }
    }
}

/// Solves the preconditioned convection–diffusion system with relaxed GMRES from a zero
/// initial guess. Returns the solution alongside the run record.
pub fn solve_convdiff(cfg: &ExperimentConfig) -> Result<(TtTensor, RunOutput)> {
    cfg.validate()?;
    let system = ConvDiffSystem::assemble(cfg)?;
    let solver = cfg.solver();
    let b = system.preconditioned_rhs(cfg.eps)?;
    let x0 = TtTensor::zeros(&b.shape());
    let rmax = cfg.rmax;
    let (x, record) = relaxed_gmres(
        |v: &TtTensor, delta: f64| system.apply(v, &TruncationSpec::new(delta)?.with_rmax(rmax)?),
        &b,
        &x0,
        &solver,
    )?;
    let extra = vec![
        ("operator_rank".to_string(), system.op.max_rank() as f64),
        (
            "precond_rank".to_string(),
            system.precond.as_ref().map_or(0, |m| m.max_rank()) as f64,
        ),
    ];
    let summary = Summary::new(cfg, &record, extra);
    Ok((x, RunOutput { record, summary }))
}

pub fn run_convdiff(cfg: &ExperimentConfig) -> Result<RunOutput> {
    Ok(solve_convdiff(cfg)?.1)
}
