//! Experiment configuration, reproducible outputs, operator caching and the CLI.

use std::process::Command;

use ndarray::Array1;

use ttkry::experiment::{
    run_convdiff, run_proptests, solve_convdiff, ConvDiffSystem, Experiment, ExperimentConfig, OperatorCache, Precond,
};
use ttkry::krylov::CSV_HEADER;
use ttkry::oracle::{dense_from_tt, dense_gmres, tt_to_vector};
use ttkry::tt::read_matrix;

fn small_convdiff() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::for_experiment(Experiment::Convdiff);
    cfg.apply_text("n = 8\nalpha = 0.5\neps = 1e-6\n").unwrap();
    cfg
}

#[test]
fn config_text_keys_and_errors() {
    let mut cfg = ExperimentConfig::default();
    cfg.apply_text("restart_m = 20 # alias\nM = 16\nprecond = identity\nrmax = 30\ndelta_cap = 0.1\n").unwrap();
    assert_eq!((cfg.restart, cfg.m, cfg.precond, cfg.rmax), (20, 16, Precond::Identity, Some(30)));
    assert_eq!(cfg.solver().delta_cap, 0.1);
    assert!(cfg.set("bogus", "1").is_err());
    assert!(cfg.set("relax", "maybe").is_err());
    assert!(cfg.apply_text("no equals sign").is_err());
    cfg.set("eps", "2").unwrap();
    assert!(cfg.validate().is_err());
    let mut cfg = ExperimentConfig::default();
    cfg.set("stage_scale", "0").unwrap();
    assert!(cfg.validate().is_err());
    let mut ppde = ExperimentConfig::for_experiment(Experiment::Ppde);
    ppde.apply_text("qtt = on\nnx = 48\n").unwrap();
    assert!(ppde.validate().is_err());
}

#[test]
fn summary_json_roundtrips() {
    let out = run_convdiff(&small_convdiff()).unwrap();
    let json = out.summary.to_json();
    let back: ttkry::experiment::Summary = serde_json::from_str(&json).unwrap();
    assert_eq!(back.to_json(), json);
    assert_eq!(back.iterations, out.record.total_iterations());
}

#[test]
fn outputs_are_reproducible_without_timing() {
    let cfg = small_convdiff();
    let a = run_convdiff(&cfg).unwrap();
    let b = run_convdiff(&cfg).unwrap();
    assert!(a.summary.converged);
    assert_eq!(a.record.to_csv_string(), b.record.to_csv_string());
    assert_eq!(a.summary.to_json(), b.summary.to_json());
    let dir = tempfile::tempdir().unwrap();
    a.write(dir.path()).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("history.csv")).unwrap();
    assert!(csv.starts_with(CSV_HEADER));
    assert!(dir.path().join("summary.json").exists());
}

#[test]
fn converged_solution_solves_the_dense_system() {
    let cfg = small_convdiff();
    let (x, out) = solve_convdiff(&cfg).unwrap();
    let sys = ConvDiffSystem::assemble(&cfg).unwrap();
    let a = dense_from_tt(&sys.op).unwrap();
    let m = dense_from_tt(sys.precond.as_ref().unwrap()).unwrap();
    let ma = m.compose(&a).unwrap();
    let b = m.matrix().dot(&tt_to_vector(&sys.rhs).unwrap());
    let r = &b - &ma.matrix().dot(&tt_to_vector(&x).unwrap());
    let rel = r.dot(&r).sqrt() / b.dot(&b).sqrt();
    assert!(rel < 1e-5, "true residual {rel}");
    assert!((rel - out.summary.final_true_rel).abs() < 1e-6);
}

#[test]
fn identity_preconditioned_run_tracks_dense_gmres() {
    let mut cfg = small_convdiff();
    cfg.precond = Precond::Identity;
    cfg.relax = false;
    cfg.eps = 1e-8;
    let out = run_convdiff(&cfg).unwrap();
    let sys = ConvDiffSystem::assemble(&cfg).unwrap();
    assert!(sys.precond.is_none());
    let a = dense_from_tt(&sys.op).unwrap();
    let b = tt_to_vector(&sys.rhs).unwrap();
    let (_, reference) = dense_gmres(&a, &b, &Array1::zeros(b.len()), &cfg.solver()).unwrap();
    let ours = out.record.computed_history();
    let theirs = reference.computed_history();
    // rounding at 1e-8 perturbs the history by a comparable relative amount
    for (p, q) in ours.iter().zip(&theirs).take(20) {
        assert!((p - q).abs() <= 1e-5 * q.max(1e-8), "{p} vs {q}");
    }
    assert!((ours.len() as i64 - theirs.len() as i64).abs() <= 2);
}

#[test]
fn operator_cache_reuses_stored_operators() {
    let dir = tempfile::tempdir().unwrap();
    let cache = OperatorCache::new(dir.path().join("ops"));
    let key = "conv_diff n=4 alpha=1";
    let path = cache.path_for(key);
    assert_ne!(path, cache.path_for("conv_diff n=4 alpha=0.5"));
    let built = cache.get_or_build(key, || ttkry::operators::conv_diff_3d(4, 1.0)).unwrap();
    assert!(path.exists());
    let stored = read_matrix(&mut std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(stored.cores(), built.cores());
    let again = cache
        .get_or_build(key, || panic!("operator should come from the cache"))
        .unwrap();
    assert_eq!(again.cores(), built.cores());
}

#[test]
fn cached_and_uncached_runs_agree() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_convdiff();
    let plain = run_convdiff(&cfg).unwrap();
    cfg.cache = Some(dir.path().to_path_buf());
    let first = run_convdiff(&cfg).unwrap();
    let second = run_convdiff(&cfg).unwrap();
    assert_eq!(plain.record.to_csv_string(), first.record.to_csv_string());
    assert_eq!(first.record.to_csv_string(), second.record.to_csv_string());
    assert!(std::fs::read_dir(dir.path()).unwrap().count() >= 1);
}

#[test]
fn property_report_is_deterministic_and_detects_faults() {
    let mut cfg = ExperimentConfig::for_experiment(Experiment::Proptests);
    cfg.cases = 30;
    let a = run_proptests(&cfg).unwrap();
    let b = run_proptests(&cfg).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    let bound = a.properties.iter().find(|p| p.name == "round_error_bound").unwrap();
    assert!(bound.passed);
    assert_eq!(bound.cases, 30);
    cfg.fault = true;
    let faulty = run_proptests(&cfg).unwrap();
    let bound = faulty.properties.iter().find(|p| p.name == "round_error_bound").unwrap();
    assert!(!bound.passed && bound.counterexample.is_some());
    assert!(!faulty.all_passed);
}

#[test]
fn cli_writes_history_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let status = Command::new(env!("CARGO_BIN_EXE_ttkry"))
        .args(["convdiff", "--n", "8", "--alpha", "0.5", "--eps", "1e-6", "--delta-cap", "0.01"])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["converged"], serde_json::Value::Bool(true));
    assert_eq!(summary["config"]["n"], 8);
    let csv = std::fs::read_to_string(out.join("history.csv")).unwrap();
    assert_eq!(csv.lines().count(), summary["iterations"].as_u64().unwrap() as usize + 1);
}

#[test]
fn cli_rejects_bad_flags() {
    let out = Command::new(env!("CARGO_BIN_EXE_ttkry"))
        .args(["convdiff", "--eps", "abc"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("eps"));
    let out = Command::new(env!("CARGO_BIN_EXE_ttkry"))
        .args(["proptests", "--cases", "5"])
        .output()
        .unwrap();
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["properties"][0]["cases"], 5);
}
