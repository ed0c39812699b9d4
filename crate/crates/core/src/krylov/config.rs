use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the relaxed GMRES(m) driver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Target relative residual `‖r̃‖/‖b‖`; also the accuracy of the solution update.
    pub eps: f64,
    /// Krylov vectors per restart cycle.
    pub restart_m: usize,
    /// Cycles after the first one.
    pub max_restarts: usize,
    /// Rank cap applied by every rounding inside the solver.
    pub rmax: Option<usize>,
    /// Loosen the matvec accuracy as the computed residual falls.
    pub relaxation: bool,
    /// Upper bound for the relaxed tolerance.
    pub delta_cap: f64,
    /// Estimate of `cond(A)`, used only to report the residual-gap bound.
    pub cond_estimate: f64,
    /// Breakdown is declared when `h_{j+1,j} ≤ breakdown_tol·‖T_δ(A v_j)‖`.
    pub breakdown_tol: f64,
    /// Forces every matvec and orthogonalization tolerance to this value.
    pub delta_override: Option<f64>,
    /// Repeat the Gram–Schmidt pass once.
    pub second_pass: bool,
    /// Round after every term of the solution update instead of once at the end.
    pub per_addition_update: bool,
    /// Form the iterate and its true residual after every iteration (expensive).
    pub track_solution: bool,
    /// Record wall-clock times; when off every time is reported as zero.
    pub record_timing: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            eps: 1e-5,
            restart_m: 80,
            max_restarts: 10,
            rmax: None,
            relaxation: true,
            delta_cap: 0.5,
            cond_estimate: 1.0,
            breakdown_tol: 1e-12,
            delta_override: None,
            second_pass: false,
            per_addition_update: false,
            track_solution: false,
            record_timing: true,
        }
    }
}

impl SolverConfig {
    pub fn with_eps(eps: f64) -> Self {
        SolverConfig {
            eps,
            ..SolverConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad(format!("eps must lie in (0, 1), got {}", self.eps));
        }
        if self.restart_m == 0 {
            return bad("restart_m must be ≥ 1".into());
        }
        if !(self.delta_cap >= self.eps) || !self.delta_cap.is_finite() {
            return bad(format!("delta_cap {} must be ≥ eps {}", self.delta_cap, self.eps));
        }
        if !(self.cond_estimate > 0.0) || !self.cond_estimate.is_finite() {
            return bad(format!("cond_estimate must be positive, got {}", self.cond_estimate));
        }
        if !(self.breakdown_tol >= 0.0) {
            return bad(format!("breakdown_tol must be ≥ 0, got {}", self.breakdown_tol));
        }
        if let Some(d) = self.delta_override {
            if !(d >= 0.0) || !d.is_finite() {
                return bad(format!("delta_override must be ≥ 0, got {d}"));
            }
        }
        if self.rmax == Some(0) {
            return bad("rank cap must be ≥ 1".into());
        }
        Ok(())
    }

    /// `restart_m·cond_estimate·eps`, the bound on `|‖r_true‖ − ‖r̃‖|/‖b‖` at exit.
    pub fn gap_bound(&self) -> f64 {
        self.restart_m as f64 * self.cond_estimate * self.eps
    }
}

/// Tolerance for the next matvec given the computed residual relative to the cycle's `β`.
///
/// With relaxation the tolerance is `min(delta_cap, eps/resid_rel)`; otherwise it is `eps`.
pub fn relax_schedule(eps: f64, computed_resid_rel: f64, cfg: &SolverConfig) -> f64 {
    if let Some(d) = cfg.delta_override {
        return d;
    }
    if !cfg.relaxation {
        return eps;
    }
    if !(computed_resid_rel > 0.0) {
        return cfg.delta_cap;
    }
    (eps / computed_resid_rel).min(cfg.delta_cap)
}
