//! The seeded randomized invariant suite, as run by `ttkry proptests`.

use ttkry::experiment::{run_proptests, Experiment, ExperimentConfig};

pub fn run_example() -> ttkry::Result<()> {
    let mut cfg = ExperimentConfig::for_experiment(Experiment::Proptests);
    cfg.cases = 40;
    let report = run_proptests(&cfg)?;
    for p in &report.properties {
        println!("{:22} {:3} cases, {} failures", p.name, p.cases, p.failures);
        if let Some(c) = &p.counterexample {
            println!("    first counterexample: {c}");
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> ttkry::Result<()> {
    run_example()
}
