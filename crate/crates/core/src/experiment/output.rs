use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::Result;
use crate::krylov::ConvergenceRecord;

/// Identifies the summary layout; bump on incompatible changes.
pub const SUMMARY_SCHEMA: &str = "ttkry-summary";
pub const SUMMARY_VERSION: u32 = 1;

/// Machine-readable outcome of a solver run, written as `summary.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema: String,
    pub version: u32,
    pub config: ExperimentConfig,
    pub converged: bool,
    pub iterations: usize,
    pub restarts: usize,
    pub final_computed_rel: f64,
    pub final_true_rel: f64,
    pub max_solution_rank: usize,
    pub max_krylov_rank: usize,
    pub breakdown: bool,
    pub rank_cap_hit: bool,
    pub wall_ms: f64,
    /// Experiment-specific diagnostics as `(name, value)` pairs.
    pub extra: Vec<(String, f64)>,
}

impl Summary {
    pub fn new(config: &ExperimentConfig, record: &ConvergenceRecord, extra: Vec<(String, f64)>) -> Self {
        Summary {
            schema: SUMMARY_SCHEMA.into(),
            version: SUMMARY_VERSION,
            config: config.clone(),
            converged: record.converged,
            iterations: record.total_iterations(),
            restarts: record.restarts.len().saturating_sub(1),
            final_computed_rel: record.final_computed_rel,
            final_true_rel: record.final_true_rel,
            max_solution_rank: record.max_solution_rank(),
            max_krylov_rank: record.max_krylov_rank(),
            breakdown: record.breakdown,
            rank_cap_hit: record.rank_cap_hit,
            wall_ms: record.wall_ms(),
            extra,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary is serializable") + "\n"
    }
}

/// Result of a solver experiment.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub record: ConvergenceRecord,
    pub summary: Summary,
}

impl RunOutput {
    /// Writes `history.csv` and `summary.json` into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("history.csv"), self.record.to_csv_string())?;
        fs::write(dir.join("summary.json"), self.summary.to_json())?;
        Ok(())
    }
}
