//! Randomized invariant checks driven by one seed. Each property draws its own cases from a
//! seeded stream, so reports are reproducible byte for byte.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::arith;
use crate::error::Result;
use crate::oracle::{best_rank_error, dense_add, dense_dot, dense_from_tt, dense_hadamard};
use crate::round::{round, rounded_matvec, TruncationSpec};
use crate::tt::{dequantize, quantization_grouping, quantize, read_tensor, write_tensor, Shape, TtMatrix, TtTensor};

pub const REPORT_SCHEMA: &str = "ttkry-proptests";
pub const REPORT_VERSION: u32 = 1;

/// Rounding accuracies exercised by the rounding properties.
pub const ROUNDING_EPS: [f64; 3] = [1e-1, 1e-3, 1e-6];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropOutcome {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub passed: bool,
    /// Description of the first failing case.
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropReport {
    pub schema: String,
    pub version: u32,
    pub seed: u64,
    pub fault: bool,
    pub properties: Vec<PropOutcome>,
    pub all_passed: bool,
}

impl PropReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable") + "\n"
    }
}

/// A random tensor train with order `2..=max_d`, mode sizes `2..=max_n` and interior ranks
/// `1..=max_r`, cores i.i.d. standard normal.
pub fn random_tt<R: Rng>(rng: &mut R, max_d: usize, max_n: usize, max_r: usize) -> TtTensor {
    let d = rng.gen_range(2..=max_d);
    let dims: Vec<usize> = (0..d).map(|_| rng.gen_range(2..=max_n)).collect();
    let ranks: Vec<usize> = (0..d - 1).map(|_| rng.gen_range(1..=max_r)).collect();
    TtTensor::random(&Shape::new(dims).expect("positive sizes"), &ranks, rng).expect("consistent ranks")
}

/// A seeded property check: `Ok(Err(msg))` is a violated invariant.
type Check = fn(&mut ChaCha8Rng) -> Result<std::result::Result<(), String>>;

fn describe(x: &TtTensor) -> String {
    format!("modes {:?} ranks {:?}", x.mode_sizes(), x.ranks())
}

/// `‖T_ε(x) − x‖ ≤ ε‖x‖`. With `fault` the rounding runs at `10ε`.
pub fn check_error_bound(x: &TtTensor, eps: f64, fault: bool) -> Result<std::result::Result<(), String>> {
    let used = if fault { eps * 10.0 } else { eps };
    let y = round(x, &TruncationSpec::new(used)?)?;
    let (fx, fy) = (x.full()?, y.full()?);
    let err = fy.distance(&fx)?;
    let bound = eps * fx.norm() * (1.0 + 1e-10) + 1e-14 * fx.norm();
    Ok(if err <= bound {
        Ok(())
    } else {
        Err(format!("{} eps {eps:e}: error {err:.6e} above bound {bound:.6e}", describe(x)))
    })
}

/// Ranks of `T_ε(x)` never exceed those of `x`.
pub fn check_rank_monotone(x: &TtTensor, eps: f64) -> Result<std::result::Result<(), String>> {
    let y = round(x, &TruncationSpec::new(eps)?)?;
    Ok(if y.ranks().iter().zip(x.ranks()).all(|(a, b)| *a <= b) {
        Ok(())
    } else {
        Err(format!("{} eps {eps:e}: rounded ranks {:?}", describe(x), y.ranks()))
    })
}

/// `T_ε(T_ε(x))` has the ranks of `T_ε(x)` and values within `1e-13` (relative).
pub fn check_idempotent(x: &TtTensor, eps: f64) -> Result<std::result::Result<(), String>> {
    let spec = TruncationSpec::new(eps)?;
    let y = round(x, &spec)?;
    let z = round(&y, &spec)?;
    let fy = y.full()?;
    let diff = z.full()?.distance(&fy)?;
    Ok(if z.ranks() == y.ranks() && diff <= 1e-13 * fy.norm() {
        Ok(())
    } else {
        Err(format!(
            "{} eps {eps:e}: ranks {:?} then {:?}, change {diff:.3e}",
            describe(x),
            y.ranks(),
            z.ranks()
        ))
    })
}

/// Rounding under a rank cap `r` errs by at most `√(d−1)` times the unfolding-SVD lower bound
/// on the best error with the ranks it produced.
pub fn check_quasi_optimal(x: &TtTensor, cap: usize) -> Result<std::result::Result<(), String>> {
    let spec = TruncationSpec::new(0.0)?.with_rmax(Some(cap))?;
    let y = round(x, &spec)?;
    let fx = x.full()?;
    let err = y.full()?.distance(&fx)?;
    let ranks = y.ranks();
    let bounds = best_rank_error(&fx, &ranks[1..ranks.len() - 1])?;
    let d = x.order() as f64;
    let limit = (d - 1.0).sqrt() * bounds.lower_bound * (1.0 + 1e-8) + 1e-12 * fx.norm();
    Ok(if err <= limit && err + 1e-12 * fx.norm() >= bounds.lower_bound {
        Ok(())
    } else {
        Err(format!(
            "{} cap {cap}: error {err:.6e}, lower bound {:.6e}",
            describe(x),
            bounds.lower_bound
        ))
    })
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-11 * scale.max(1e-300)
}

fn check_arith(rng: &mut ChaCha8Rng) -> Result<std::result::Result<(), String>> {
    let a = random_tt(rng, 4, 4, 3);
    let ranks: Vec<usize> = (0..a.order() - 1).map(|_| rng.gen_range(1..=3)).collect();
    let b = TtTensor::random(&a.shape(), &ranks, rng)?;
    let (fa, fb) = (a.full()?, b.full()?);
    let scale = fa.norm() * fb.norm() + fa.norm() + fb.norm();
    let sum = arith::add(&a, &b)?.full()?;
    let prod = arith::hadamard(&a, &b)?.full()?;
    let ok_sum = sum.distance(&dense_add(&fa, &fb)?)? <= 1e-12 * scale;
    let ok_prod = prod.distance(&dense_hadamard(&fa, &fb)?)? <= 1e-12 * scale;
    let ok_dot = close(arith::dot(&a, &b)?, dense_dot(&fa, &fb)?, scale);
    Ok(if ok_sum && ok_prod && ok_dot {
        Ok(())
    } else {
        Err(format!("{} (add {ok_sum}, hadamard {ok_prod}, dot {ok_dot})", describe(&a)))
    })
}

fn check_matvec(rng: &mut ChaCha8Rng) -> Result<std::result::Result<(), String>> {
    let x = random_tt(rng, 3, 4, 3);
    let dims = x.mode_sizes();
    let factors: Vec<Array2<f64>> = dims
        .iter()
        .map(|&n| Array2::from_shape_fn((n, n), |_| rng.gen_range(-1.0..1.0)))
        .collect();
    let other: Vec<Array2<f64>> = dims.iter().map(|&n| Array2::eye(n)).collect();
    let op = TtMatrix::from_kron(&[
        crate::tt::KronTerm::new(1.0, factors),
        crate::tt::KronTerm::new(0.5, other),
    ])?;
    let dense = dense_from_tt(&op)?;
    let expected = dense.apply(&x.full()?)?;
    let exact = arith::matvec(&op, &x)?.full()?;
    let lazy = rounded_matvec(&op, &x, &TruncationSpec::new(1e-14)?)?.full()?;
    let scale = expected.norm();
    let (e1, e2) = (exact.distance(&expected)?, lazy.distance(&expected)?);
    Ok(if e1 <= 1e-12 * scale && e2 <= 1e-12 * scale {
        Ok(())
    } else {
        Err(format!("{}: exact {e1:.3e}, rounded {e2:.3e}", describe(&x)))
    })
}

fn check_qtt(rng: &mut ChaCha8Rng) -> Result<std::result::Result<(), String>> {
    let d = rng.gen_range(1..=3);
    let dims: Vec<usize> = (0..d).map(|_| 1 << rng.gen_range(1..=3)).collect();
    let ranks: Vec<usize> = (0..d - 1).map(|_| rng.gen_range(1..=3)).collect();
    let x = TtTensor::random(&Shape::new(dims.clone())?, &ranks, rng)?;
    let q = quantize(&x, 2)?;
    let back = dequantize(&q, &quantization_grouping(&dims, 2)?, 2)?;
    let fx = x.full()?;
    let (e1, e2) = (
        q.full()?.reshaped(fx.shape().clone())?.distance(&fx)?,
        back.full()?.distance(&fx)?,
    );
    Ok(if e1 <= 1e-12 * fx.norm() && e2 <= 1e-12 * fx.norm() {
        Ok(())
    } else {
        Err(format!("{}: quantized {e1:.3e}, restored {e2:.3e}", describe(&x)))
    })
}

fn check_io(rng: &mut ChaCha8Rng) -> Result<std::result::Result<(), String>> {
    let x = random_tt(rng, 4, 5, 4);
    let mut buf = Vec::new();
    write_tensor(&mut buf, &x)?;
    let y = read_tensor(&mut buf.as_slice())?;
    let same = x.cores().iter().zip(y.cores()).all(|(a, b)| a == b) && x.order() == y.order();
    Ok(if same { Ok(()) } else { Err(describe(&x)) })
}

struct Tally {
    name: &'static str,
    cases: usize,
    failures: usize,
    first: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            name,
            cases: 0,
            failures: 0,
            first: None,
        }
    }

    fn record(&mut self, case: usize, outcome: Result<std::result::Result<(), String>>) {
        self.cases += 1;
        let failure = match outcome {
            Ok(Ok(())) => return,
            Ok(Err(msg)) => msg,
            Err(e) => format!("error: {e}"),
        };
        self.failures += 1;
        self.first.get_or_insert(format!("case {case}: {failure}"));
    }

    fn finish(self) -> PropOutcome {
        PropOutcome {
            name: self.name.to_string(),
            cases: self.cases,
            failures: self.failures,
            passed: self.failures == 0,
            counterexample: self.first,
        }
    }
}

fn stream(seed: u64, property: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(property);
    rng
}

/// Runs every property for `cfg.cases` cases each.
pub fn run_proptests(cfg: &ExperimentConfig) -> Result<PropReport> {
    let cases = cfg.cases;
    let seed = cfg.seed;
    let mut out = Vec::new();

    let rounding: [(&'static str, u64); 3] = [("round_error_bound", 1), ("round_rank_monotone", 2), ("round_idempotent", 3)];
    for (name, id) in rounding {
        let mut rng = stream(seed, id);
        let mut tally = Tally::new(name);
        for case in 0..cases {
            let x = random_tt(&mut rng, 5, 6, 8);
            let eps = ROUNDING_EPS[case % ROUNDING_EPS.len()];
            let outcome = match id {
                1 => check_error_bound(&x, eps, cfg.fault),
                2 => check_rank_monotone(&x, eps),
                _ => check_idempotent(&x, eps),
            };
            tally.record(case, outcome);
        }
        out.push(tally.finish());
    }

    let mut rng = stream(seed, 4);
    let mut tally = Tally::new("round_quasi_optimal");
    for case in 0..cases {
        let x = random_tt(&mut rng, 5, 6, 8);
        let cap = rng.gen_range(1..=4);
        tally.record(case, check_quasi_optimal(&x, cap));
    }
    out.push(tally.finish());

    let others: [(&'static str, u64, Check); 4] = [
        ("arith_matches_dense", 5, check_arith),
        ("matvec_matches_dense", 6, check_matvec),
        ("qtt_roundtrip", 7, check_qtt),
        ("io_roundtrip", 8, check_io),
    ];
    for (name, id, check) in others {
        let mut rng = stream(seed, id);
        let mut tally = Tally::new(name);
        for case in 0..cases {
            let outcome = check(&mut rng);
            tally.record(case, outcome);
        }
        out.push(tally.finish());
    }

    let all_passed = out.iter().all(|p| p.passed);
    Ok(PropReport {
        schema: REPORT_SCHEMA.into(),
        version: REPORT_VERSION,
        seed,
        fault: cfg.fault,
        properties: out,
        all_passed,
    })
}
