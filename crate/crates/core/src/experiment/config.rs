use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::krylov::SolverConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Convdiff,
    Ppde,
    Proptests,
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "convdiff" => Ok(Experiment::Convdiff),
            "ppde" => Ok(Experiment::Ppde),
            "proptests" => Ok(Experiment::Proptests),
            _ => Err(Error::Config(format!("unknown experiment '{s}'"))),
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::Convdiff => "convdiff",
            Experiment::Ppde => "ppde",
            Experiment::Proptests => "proptests",
        })
    }
}

/// Left preconditioner of the convection–diffusion runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precond {
    Expsum,
    Identity,
}

/// Parameters of one experiment run. Every field can be set from a `key = value` file and
/// from a command-line flag of the same name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Interior points per axis (convection–diffusion).
    pub n: usize,
    /// Spatial interior points (parametric problem).
    pub nx: usize,
    /// Collocation points per parameter.
    pub ny: usize,
    pub alpha: f64,
    /// Number of parameters.
    pub d: usize,
    pub eps: f64,
    pub restart: usize,
    pub max_restarts: usize,
    pub rmax: Option<usize>,
    pub relax: bool,
    /// Upper bound of the relaxed Krylov tolerance.
    pub delta_cap: f64,
    /// The inner product `A·v` of a preconditioned matvec is rounded at `stage_scale·δ`;
    /// the preconditioner amplifies that error, so it is rounded tighter than the outer stage.
    pub stage_scale: f64,
    pub qtt: bool,
    /// Quadrature half-width of the exponential-sum inverse Laplacian.
    pub m: usize,
    pub precond: Precond,
    pub seed: u64,
    /// Record wall-clock times (outputs are then no longer byte-reproducible).
    pub timing: bool,
    /// Random cases per property (proptests).
    pub cases: usize,
    /// Corrupt one rounding threshold to check that the property suite notices.
    pub fault: bool,
    pub out: Option<PathBuf>,
    pub cache: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: Experiment::Convdiff,
            n: 64,
            nx: 64,
            ny: 16,
            alpha: 1.0,
            d: 10,
            eps: 1e-5,
            restart: 80,
            max_restarts: 10,
            rmax: None,
            relax: true,
            delta_cap: 1e-2,
            stage_scale: 1e-2,
            qtt: false,
            m: 36,
            precond: Precond::Expsum,
            seed: 42,
            timing: false,
            cases: 100,
            fault: false,
            out: None,
            cache: None,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse '{value}' for key '{key}'")))
}

fn parse_switch(key: &str, value: &str) -> Result<bool> {
    match value {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("key '{key}' expects on/off, got '{value}'"))),
    }
}

fn parse_optional_path(value: &str) -> Option<PathBuf> {
    match value {
        "" | "none" | "off" => None,
        p => Some(PathBuf::from(p)),
    }
}

impl ExperimentConfig {
    pub fn for_experiment(experiment: Experiment) -> Self {
        ExperimentConfig {
            experiment,
            ..Self::default()
        }
    }

    /// Sets one key. Keys match the field names; `restart_m` and `M` are accepted as aliases.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "experiment" => self.experiment = value.parse()?,
            "n" => self.n = parse(key, value)?,
            "nx" => self.nx = parse(key, value)?,
            "ny" => self.ny = parse(key, value)?,
            "alpha" => self.alpha = parse(key, value)?,
            "d" => self.d = parse(key, value)?,
            "eps" => self.eps = parse(key, value)?,
            "restart" | "restart_m" => self.restart = parse(key, value)?,
            "max_restarts" => self.max_restarts = parse(key, value)?,
            "rmax" => {
                self.rmax = match value {
                    "none" | "off" | "" => None,
                    v => Some(parse(key, v)?),
                }
            }
            "relax" => self.relax = parse_switch(key, value)?,
            "delta_cap" => self.delta_cap = parse(key, value)?,
            "stage_scale" => self.stage_scale = parse(key, value)?,
            "qtt" => self.qtt = parse_switch(key, value)?,
            "m" | "M" => self.m = parse(key, value)?,
            "precond" => {
                self.precond = match value {
                    "expsum" => Precond::Expsum,
                    "identity" => Precond::Identity,
                    _ => return Err(Error::Config(format!("unknown preconditioner '{value}'"))),
                }
            }
            "seed" => self.seed = parse(key, value)?,
            "timing" => self.timing = parse_switch(key, value)?,
            "cases" => self.cases = parse(key, value)?,
            "fault" => self.fault = parse_switch(key, value)?,
            "out" => self.out = parse_optional_path(value),
            "cache" => self.cache = parse_optional_path(value),
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Applies a flat `key = value` text, one key per line; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        self.apply_text(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad(format!("eps must lie in (0, 1), got {}", self.eps));
        }
        match self.experiment {
            Experiment::Convdiff => {
                if self.n < 2 {
                    return bad(format!("n must be ≥ 2, got {}", self.n));
                }
                if !(self.alpha > 0.0 && self.alpha.is_finite()) {
                    return bad(format!("alpha must be positive, got {}", self.alpha));
                }
            }
            Experiment::Ppde => {
                if self.nx < 2 || self.ny < 2 {
                    return bad(format!("need nx, ny ≥ 2, got {} and {}", self.nx, self.ny));
                }
                if self.d > 20 {
                    return bad(format!("d = {} exceeds the supported maximum of 20", self.d));
                }
                if self.qtt && !self.nx.is_power_of_two() {
                    return bad(format!("qtt needs nx to be a power of two, got {}", self.nx));
                }
            }
            Experiment::Proptests => {
                if self.cases == 0 {
                    return bad("cases must be ≥ 1".into());
                }
            }
        }
        if !(self.stage_scale > 0.0 && self.stage_scale <= 1.0) {
            return bad(format!("stage_scale must lie in (0, 1], got {}", self.stage_scale));
        }
        if self.m == 0 {
            return bad("M must be ≥ 1".into());
        }
        self.solver().validate()
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            eps: self.eps,
            restart_m: self.restart,
            max_restarts: self.max_restarts,
            rmax: self.rmax,
            relaxation: self.relax,
            record_timing: self.timing,
            delta_cap: self.delta_cap,
            ..SolverConfig::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_then_flags() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text("# run\nn = 32\nalpha=0.1\nrelax = off\nrmax = 40\n").unwrap();
        cfg.set("n", "16").unwrap();
        assert_eq!(cfg.n, 16);
        assert_eq!(cfg.alpha, 0.1);
        assert!(!cfg.relax);
        assert_eq!(cfg.rmax, Some(40));
        assert!(cfg.apply_text("bogus = 1").is_err());
        assert!(cfg.apply_text("n 3").is_err());
    }

    #[test]
    fn validation_limits_parameter_count() {
        let mut cfg = ExperimentConfig::for_experiment(Experiment::Ppde);
        cfg.d = 21;
        assert!(cfg.validate().is_err());
        cfg.d = 4;
        cfg.validate().unwrap();
    }
}
