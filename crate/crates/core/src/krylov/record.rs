use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Header of the per-iteration CSV.
pub const CSV_HEADER: &str =
    "iter,resid_computed_rel,resid_true_rel,delta,rank_krylov_max,rank_solution_max,wall_ms";

/// One Arnoldi step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRow {
    /// Global iteration index, starting at 1.
    pub iter: usize,
    /// Restart cycle, starting at 0.
    pub cycle: usize,
    /// `‖r̃_j‖/‖b‖` from the reduced problem.
    pub resid_computed_rel: f64,
    /// `‖b − A x_j‖/‖b‖`; only present at the end of a cycle or when tracking the solution.
    pub resid_true_rel: Option<f64>,
    pub delta: f64,
    /// Maximal TT rank of the new Krylov vector.
    pub rank_krylov_max: usize,
    pub rank_solution_max: Option<usize>,
    /// Time since the solver started.
    pub wall_ms: f64,
}

/// State at a cycle boundary; row 0 describes the initial guess.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartRow {
    pub cycle: usize,
    /// Iterations performed before this row.
    pub iterations: usize,
    pub resid_true_rel: f64,
    pub rank_solution_max: usize,
    /// Smallest singular value of the cycle's `H̄` (absent for the initial row).
    pub sigma_min_hbar: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub iterations: Vec<IterationRow>,
    pub restarts: Vec<RestartRow>,
    /// The computed residual reached `eps`.
    pub converged: bool,
    /// Some Arnoldi step closed the subspace.
    pub breakdown: bool,
    /// Some rounding inside the solver was limited by the rank cap.
    pub rank_cap_hit: bool,
    /// The reduced problem was rank deficient in some cycle.
    pub rank_deficient_ls: bool,
    pub final_computed_rel: f64,
    pub final_true_rel: f64,
}

impl ConvergenceRecord {
    pub fn total_iterations(&self) -> usize {
        self.iterations.len()
    }

    pub fn max_krylov_rank(&self) -> usize {
        self.iterations.iter().map(|r| r.rank_krylov_max).max().unwrap_or(0)
    }

    pub fn max_solution_rank(&self) -> usize {
        let from_iters = self.iterations.iter().filter_map(|r| r.rank_solution_max).max();
        let from_restarts = self.restarts.iter().map(|r| r.rank_solution_max).max();
        from_iters.into_iter().chain(from_restarts).max().unwrap_or(0)
    }

    pub fn computed_history(&self) -> Vec<f64> {
        self.iterations.iter().map(|r| r.resid_computed_rel).collect()
    }

    pub fn wall_ms(&self) -> f64 {
        self.iterations.last().map_or(0.0, |r| r.wall_ms)
    }

    /// Writes the per-iteration CSV; absent values are empty cells.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for r in &self.iterations {
            let true_rel = r.resid_true_rel.map(fmt_float).unwrap_or_default();
            let sol_rank = r.rank_solution_max.map(|v| v.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{},{:.3}",
                r.iter,
                fmt_float(r.resid_computed_rel),
                true_rel,
                fmt_float(r.delta),
                r.rank_krylov_max,
                sol_rank,
                r.wall_ms
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii csv")
    }
}

fn fmt_float(v: f64) -> String {
    format!("{v:.6e}")
}
