//! Command-line runner for the benchmark experiments.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ttkry::experiment::{run_convdiff, run_ppde, run_proptests, Experiment, ExperimentConfig};

#[derive(Parser)]
#[command(name = "ttkry", version, about = "Relaxed TT-GMRES benchmark runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// 3D convection–diffusion with the exponential-sum preconditioner.
    Convdiff(Common),
    /// 1D parametric diffusion with the P2 preconditioner.
    Ppde(Common),
    /// Randomized invariant checks; prints a JSON report.
    Proptests(Common),
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    nx: Option<String>,
    #[arg(long)]
    ny: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    restart: Option<String>,
    #[arg(long)]
    max_restarts: Option<String>,
    /// Rank cap, or `none`.
    #[arg(long)]
    rmax: Option<String>,
    /// on/off
    #[arg(long)]
    relax: Option<String>,
    /// Upper bound of the relaxed matvec tolerance.
    #[arg(long)]
    delta_cap: Option<String>,
    /// Accuracy of the inner `A·v` stage relative to the outer tolerance.
    #[arg(long)]
    stage_scale: Option<String>,
    /// on/off
    #[arg(long)]
    qtt: Option<String>,
    /// Quadrature half-width of the inverse Laplacian.
    #[arg(long = "M", alias = "m")]
    m: Option<String>,
    /// expsum/identity
    #[arg(long)]
    precond: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// on/off; timings make outputs non-reproducible.
    #[arg(long)]
    timing: Option<String>,
    #[arg(long)]
    cases: Option<String>,
    /// on/off; corrupts one rounding threshold in the property suite.
    #[arg(long)]
    fault: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// Operator cache directory.
    #[arg(long)]
    cache: Option<String>,
}

impl Common {
    fn pairs(&self) -> Vec<(&'static str, &String)> {
        let all: [(&'static str, &Option<String>); 21] = [
            ("n", &self.n),
            ("nx", &self.nx),
            ("ny", &self.ny),
            ("alpha", &self.alpha),
            ("d", &self.d),
            ("eps", &self.eps),
            ("restart", &self.restart),
            ("max_restarts", &self.max_restarts),
            ("rmax", &self.rmax),
            ("relax", &self.relax),
            ("delta_cap", &self.delta_cap),
            ("stage_scale", &self.stage_scale),
            ("qtt", &self.qtt),
            ("m", &self.m),
            ("precond", &self.precond),
            ("seed", &self.seed),
            ("timing", &self.timing),
            ("cases", &self.cases),
            ("fault", &self.fault),
            ("out", &self.out),
            ("cache", &self.cache),
        ];
        all.into_iter().filter_map(|(k, v)| v.as_ref().map(|v| (k, v))).collect()
    }
}

fn configure(experiment: Experiment, args: &Common) -> ttkry::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::for_experiment(experiment);
    if let Some(path) = &args.config {
        cfg.apply_file(path)?;
        cfg.experiment = experiment;
    }
    for (key, value) in args.pairs() {
        cfg.set(key, value)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> ttkry::Result<bool> {
    ttkry::linalg::blas_self_check()?;
    let (experiment, args) = match &cli.command {
        Command::Convdiff(a) => (Experiment::Convdiff, a),
        Command::Ppde(a) => (Experiment::Ppde, a),
        Command::Proptests(a) => (Experiment::Proptests, a),
    };
    let cfg = configure(experiment, args)?;
    if experiment == Experiment::Proptests {
        let report = run_proptests(&cfg)?;
        let json = report.to_json();
        print!("{json}");
        if let Some(dir) = &cfg.out {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("proptests.json"), &json)?;
        }
        return Ok(report.all_passed);
    }
    let output = match experiment {
        Experiment::Convdiff => run_convdiff(&cfg)?,
        _ => run_ppde(&cfg)?,
    };
    if let Some(dir) = &cfg.out {
        output.write(dir)?;
    }
    let s = &output.summary;
    println!(
        "{experiment}: converged={} iterations={} computed={:.3e} true={:.3e} max_rank={} krylov_rank={}",
        s.converged, s.iterations, s.final_computed_rel, s.final_true_rel, s.max_solution_rank, s.max_krylov_rank
    );
    Ok(s.converged)
}

fn main() -> ExitCode {
    // the system OpenBLAS picks a faulty kernel on some CPUs unless told otherwise
    if std::env::var_os("OPENBLAS_CORETYPE").is_none() {
        if let Ok(exe) = std::env::current_exe() {
            let status = std::process::Command::new(exe)
                .args(std::env::args_os().skip(1))
                .env("OPENBLAS_CORETYPE", "Haswell")
                .status();
            if let Ok(status) = status {
                return match status.code() {
                    Some(code) => ExitCode::from(code as u8),
                    None => {
                        eprintln!("error: solver process terminated abnormally ({status})");
                        ExitCode::FAILURE
                    }
                };
            }
        }
    }
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
