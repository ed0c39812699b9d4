//! The parametric diffusion problem with a Karhunen–Loève coefficient, solved for every
//! parameter value at once.

use ttkry::experiment::{solve_ppde, Experiment, ExperimentConfig};

pub fn run_example() -> ttkry::Result<()> {
    let mut cfg = ExperimentConfig::for_experiment(Experiment::Ppde);
    cfg.nx = 32;
    cfg.ny = 8;
    cfg.d = 4;
    for eps in [1e-3, 1e-5] {
        cfg.eps = eps;
        let (u, out) = solve_ppde(&cfg)?;
        println!(
            "eps {eps:.0e}: {} iterations, true residual {:.2e}, solution ranks {:?}",
            out.summary.iterations,
            out.summary.final_true_rel,
            u.ranks()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> ttkry::Result<()> {
    run_example()
}
