//! Helpers shared by integration tests.

#![allow(dead_code)]

use ndarray::{Array1, Array4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ttkry::arith;
use ttkry::krylov::{relaxed_gmres, ConvergenceRecord, SolverConfig};
use ttkry::oracle::{dense_from_tt, tt_to_vector};
use ttkry::{rounded_matvec, Shape, TruncationSpec, TtMatrix, TtTensor};

/// A random preconditioned system `M·A x = M·b` on a `6×6×6` grid.
///
/// `A = I + 0.6·R/‖R‖₂` with a random rank-2 operator `R`, so `cond(A) ≤ 4`, and `M` is a
/// positive diagonal scaling with entries in `[0.5, 2]`.
pub struct GapSystem {
    pub op: TtMatrix,
    pub precond: TtMatrix,
    pub rhs: TtTensor,
}

pub fn gap_system(seed: u64) -> GapSystem {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let shape = Shape::uniform(3, 6).unwrap();
    let cores: Vec<Array4<f64>> = (0..3)
        .map(|k| {
            let r0 = if k == 0 { 1 } else { 2 };
            let r1 = if k == 2 { 1 } else { 2 };
            Array4::from_shape_fn((r0, 6, 6, r1), |_| r.gen_range(-1.0..1.0))
        })
        .collect();
    let rand_op = TtMatrix::new(cores).unwrap();
    let norm = dense_from_tt(&rand_op).unwrap().norm2().unwrap();
    let view = arith::add(
        &TtMatrix::identity(&shape).to_tensor_view(),
        &arith::scale(&rand_op.to_tensor_view(), 0.6 / norm),
    )
    .unwrap();
    let op = TtMatrix::from_tensor_view(&view, &shape, &shape).unwrap();
    let factors: Vec<Array1<f64>> = (0..3)
        .map(|_| Array1::from_shape_fn(6, |_| 2f64.powf(r.gen_range(-1.0 / 3.0..1.0 / 3.0))))
        .collect();
    let precond = TtMatrix::diag(&TtTensor::rank_one(&factors).unwrap());
    let b = TtTensor::random(&shape, &[2, 2], &mut r).unwrap();
    let rhs = arith::matvec(&precond, &b).unwrap();
    GapSystem { op, precond, rhs }
}

pub struct GapOutcome {
    pub gap: f64,
    pub bound: f64,
    pub cond: f64,
    pub record: ConvergenceRecord,
}

/// Solves a [`gap_system`] with relaxation and measures `|‖r_true‖ − ‖r̃‖|/‖b‖` against
/// `restart_m·cond(MA)·ε`, both evaluated densely.
pub fn gap_outcome(seed: u64, eps: f64) -> GapOutcome {
    let sys = gap_system(seed);
    let dense = dense_from_tt(&sys.precond).unwrap().compose(&dense_from_tt(&sys.op).unwrap()).unwrap();
    let cond = dense.cond2().unwrap();
    let cfg = SolverConfig { cond_estimate: cond, record_timing: false, ..SolverConfig::with_eps(eps) };
    let zero = TtTensor::zeros(&sys.rhs.shape());
    let (x, record) = relaxed_gmres(
        |v: &TtTensor, delta| {
            let spec = TruncationSpec::new(delta)?;
            let av = rounded_matvec(&sys.op, v, &spec)?;
            rounded_matvec(&sys.precond, &av, &spec)
        },
        &sys.rhs,
        &zero,
        &cfg,
    )
    .unwrap();
    let b = tt_to_vector(&sys.rhs).unwrap();
    let bnorm = b.dot(&b).sqrt();
    let r = &b - &dense.matrix().dot(&tt_to_vector(&x).unwrap());
    let true_rel = r.dot(&r).sqrt() / bnorm;
    GapOutcome {
        gap: (true_rel - record.final_computed_rel).abs(),
        bound: cfg.gap_bound(),
        cond,
        record,
    }
}
