//! Relaxed GMRES on dense and TT vectors against the dense reference solver.

mod common;

use ndarray::{Array1, Array2};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ttkry::krylov::{relax_schedule, relaxed_gmres, SolverConfig, CSV_HEADER};
use ttkry::oracle::{dense_gmres, DenseOperator};
use ttkry::{Error, Shape, TtMatrix, TtTensor};

fn random_system(seed: u64, n: usize) -> (Array2<f64>, Array1<f64>) {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let a = Array2::from_shape_fn((n, n), |(i, j)| {
        let noise: f64 = r.gen_range(-1.0..1.0);
        noise / (n as f64).sqrt() * 0.5 + if i == j { 2.0 } else { 0.0 }
    });
    let b = Array1::from_shape_fn(n, |_| r.gen_range(-1.0..1.0));
    (a, b)
}

fn dense_op(a: &Array2<f64>) -> DenseOperator {
    DenseOperator::new(a.clone(), Shape::new(vec![a.nrows()]).unwrap()).unwrap()
}

#[test]
fn relax_schedule_examples() {
    let cfg = SolverConfig::with_eps(1e-6);
    assert_eq!(relax_schedule(1e-6, 1.0, &cfg), 1e-6);
    assert!((relax_schedule(1e-6, 1e-3, &cfg) - 1e-3).abs() < 1e-18);
    assert_eq!(relax_schedule(1e-6, 1e-8, &cfg), cfg.delta_cap);
    assert_eq!(relax_schedule(1e-6, 0.0, &cfg), cfg.delta_cap);
    let off = SolverConfig { relaxation: false, ..cfg.clone() };
    assert_eq!(relax_schedule(1e-6, 1e-3, &off), 1e-6);
    let forced = SolverConfig { delta_override: Some(1e-14), ..cfg };
    assert_eq!(relax_schedule(1e-6, 1e-3, &forced), 1e-14);
}

#[test]
fn invalid_configurations_are_rejected() {
    for cfg in [
        SolverConfig::with_eps(0.0),
        SolverConfig::with_eps(1.5),
        SolverConfig { restart_m: 0, ..SolverConfig::default() },
        SolverConfig { delta_cap: 1e-9, ..SolverConfig::default() },
        SolverConfig { rmax: Some(0), ..SolverConfig::default() },
        SolverConfig { delta_override: Some(-1.0), ..SolverConfig::default() },
    ] {
        assert!(cfg.validate().is_err(), "{cfg:?}");
    }
    let b = Array1::<f64>::zeros(3);
    let res = relaxed_gmres(|v: &Array1<f64>, _| Ok(v.clone()), &b, &b, &SolverConfig::default());
    assert!(matches!(res, Err(Error::InvalidParameter(_))));
}

#[test]
fn exact_dense_run_matches_reference_history() {
    let (a, b) = random_system(1, 40);
    let cfg = SolverConfig { relaxation: false, restart_m: 4, eps: 1e-10, ..SolverConfig::default() };
    let x0 = Array1::zeros(40);
    let (x, rec) = relaxed_gmres(|v: &Array1<f64>, _| Ok(a.dot(v)), &b, &x0, &cfg).unwrap();
    let (xr, reference) = dense_gmres(&dense_op(&a), &b, &x0, &cfg).unwrap();
    assert!(rec.converged && reference.converged);
    assert_eq!(rec.total_iterations(), reference.total_iterations());
    for (p, q) in rec.computed_history().iter().zip(reference.computed_history()) {
        assert!((p - q).abs() <= 1e-10 * (1.0 + q), "{p} vs {q}");
    }
    assert!((&x - &xr).iter().all(|v| v.abs() < 1e-8));
    assert!(rec.restarts.len() > 2, "restarts expected with m = 4");
}

#[test]
fn identity_breaks_down_after_one_step() {
    let mut r = ChaCha8Rng::seed_from_u64(2);
    let shape = Shape::uniform(3, 4).unwrap();
    let eye = TtMatrix::identity(&shape);
    let b = TtTensor::random(&shape, &[2, 2], &mut r).unwrap();
    let cfg = SolverConfig::with_eps(1e-8);
    let (x, rec) = relaxed_gmres(
        |v: &TtTensor, d| ttkry::rounded_matvec(&eye, v, &ttkry::TruncationSpec::new(d)?),
        &b,
        &TtTensor::zeros(&shape),
        &cfg,
    )
    .unwrap();
    assert!(rec.converged);
    assert_eq!(rec.total_iterations(), 1);
    assert!(x.full().unwrap().relative_distance(&b.full().unwrap()).unwrap() < 1e-8);
}

#[test]
fn exhausted_restarts_return_best_iterate() {
    let (a, b) = random_system(3, 60);
    let cfg = SolverConfig {
        restart_m: 2,
        max_restarts: 1,
        eps: 1e-12,
        relaxation: false,
        ..SolverConfig::default()
    };
    let x0 = Array1::zeros(60);
    let (x, rec) = relaxed_gmres(|v: &Array1<f64>, _| Ok(a.dot(v)), &b, &x0, &cfg).unwrap();
    assert!(!rec.converged);
    assert_eq!(rec.total_iterations(), 4);
    let r = &b - &a.dot(&x);
    let rel = r.dot(&r).sqrt() / b.dot(&b).sqrt();
    assert!((rel - rec.final_true_rel).abs() < 1e-12);
    let best = rec.restarts.iter().map(|row| row.resid_true_rel).fold(f64::INFINITY, f64::min);
    assert_eq!(rec.final_true_rel, best);
}

#[test]
fn record_serializes_one_row_per_iteration() {
    let (a, b) = random_system(4, 20);
    let cfg = SolverConfig { record_timing: false, ..SolverConfig::with_eps(1e-8) };
    let (_, rec) = relaxed_gmres(|v: &Array1<f64>, _| Ok(a.dot(v)), &b, &Array1::zeros(20), &cfg).unwrap();
    let csv = rec.to_csv_string();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), rec.total_iterations() + 1);
    assert!(rec.iterations.iter().all(|row| row.wall_ms == 0.0));
    let json = serde_json::to_string(&rec).unwrap();
    let back: ttkry::krylov::ConvergenceRecord = serde_json::from_str(&json).unwrap();
    assert_eq!(back, rec);
}

#[test]
fn relaxed_tolerances_grow_as_residual_falls() {
    let out = common::gap_outcome(5, 1e-6);
    let deltas: Vec<f64> = out.record.iterations.iter().filter(|r| r.cycle == 0).map(|r| r.delta).collect();
    assert!(deltas.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12)));
    assert!(deltas.last().unwrap() > &deltas[0]);
    assert!(out.record.converged);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Matvecs perturbed by a relative `δ` following the schedule still leave a true residual
    /// within the gap bound of the computed one.
    #[test]
    fn perturbed_dense_matvecs_respect_gap(seed in 0u64..100_000, eps in prop::sample::select(vec![1e-4, 1e-6])) {
        let (a, b) = random_system(seed, 30);
        let cond = dense_op(&a).cond2().unwrap();
        let cfg = SolverConfig { cond_estimate: cond, ..SolverConfig::with_eps(eps) };
        let mut r = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
        let (x, rec) = relaxed_gmres(
            |v: &Array1<f64>, delta| {
                let av = a.dot(v);
                let e: Array1<f64> = Array1::from_shape_fn(av.len(), |_| r.gen_range(-1.0..1.0));
                let scale = delta * av.dot(&av).sqrt() / e.dot(&e).sqrt();
                Ok(&av + &(e * scale))
            },
            &b,
            &Array1::zeros(30),
            &cfg,
        ).unwrap();
        prop_assert!(rec.converged);
        let res = &b - &a.dot(&x);
        let true_rel = res.dot(&res).sqrt() / b.dot(&b).sqrt();
        prop_assert!((true_rel - rec.final_computed_rel).abs() <= cfg.gap_bound());
    }

    #[test]
    fn tt_gap_bound_holds(seed in 0u64..100_000) {
        let out = common::gap_outcome(seed, 1e-4);
        prop_assert!(out.record.converged);
        prop_assert!(out.gap <= out.bound, "gap {} bound {}", out.gap, out.bound);
        prop_assert!(out.cond < 20.0);
    }
}
