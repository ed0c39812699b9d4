//! Preconditioned convection–diffusion in TT format: assemble, solve with relaxed GMRES and
//! print the convergence history.

use ttkry::experiment::{solve_convdiff, Experiment, ExperimentConfig};

pub fn run_example() -> ttkry::Result<()> {
    let mut cfg = ExperimentConfig::for_experiment(Experiment::Convdiff);
    cfg.n = 16;
    cfg.alpha = 0.2;
    cfg.eps = 1e-5;
    let (x, out) = solve_convdiff(&cfg)?;
    print!("{}", out.record.to_csv_string());
    println!(
        "converged {} after {} iterations, true residual {:.2e}, solution ranks {:?}",
        out.summary.converged,
        out.summary.iterations,
        out.summary.final_true_rel,
        x.ranks()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> ttkry::Result<()> {
    run_example()
}
