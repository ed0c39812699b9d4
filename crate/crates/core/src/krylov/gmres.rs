use std::time::Instant;

use super::config::{relax_schedule, SolverConfig};
use super::hessenberg::{sigma_min, HessenbergLs};
use super::record::{ConvergenceRecord, IterationRow, RestartRow};
use super::vector::KrylovVector;
use crate::error::{Error, Result};

/// Orthonormal Krylov basis of one restart cycle.
#[derive(Clone, Debug)]
pub struct Arnoldi<V> {
    basis: Vec<V>,
    /// `gram[i][l] = ⟨v_i, v_l⟩` for `l ≤ i`.
    gram: Vec<Vec<f64>>,
}

/// Result of one Arnoldi step.
#[derive(Clone, Debug)]
pub struct ArnoldiStep {
    /// `h_{1,j} … h_{j+1,j}`.
    pub column: Vec<f64>,
    /// `‖T_δ(A v_j)‖`.
    pub product_norm: f64,
    /// Maximal rank of the new (unnormalized) Krylov vector.
    pub rank: usize,
    pub breakdown: bool,
}

impl<V: KrylovVector> Arnoldi<V> {
    /// Starts from a unit vector.
    pub fn new(v1: V) -> Result<Self> {
        let g = if V::USES_GRAM { v1.dot(&v1)? } else { 1.0 };
        Ok(Arnoldi {
            basis: vec![v1],
            gram: vec![vec![g]],
        })
    }

    pub fn basis(&self) -> &[V] {
        &self.basis
    }

    /// Applies the operator at tolerance `delta` to the last basis vector, orthogonalizes,
    /// and appends the normalized result unless the step breaks down.
    pub fn step<F>(&mut self, apply: &mut F, delta: f64, cfg: &SolverConfig) -> Result<ArnoldiStep>
    where
        F: FnMut(&V, f64) -> Result<V>,
    {
        let last = self.basis.last().expect("basis is never empty");
        let av = apply(last, delta)?;
        let product_norm = av.norm();
        let (mut w, mut h) = V::orthogonalize(&av, &self.basis, &self.gram, delta, cfg.rmax)?;
        if cfg.second_pass {
            let (w2, h2) = V::orthogonalize(&w, &self.basis, &self.gram, delta, cfg.rmax)?;
            for (a, b) in h.iter_mut().zip(h2) {
                *a += b;
            }
            w = w2;
        }
        let hn = w.norm();
        h.push(hn);
        let rank = w.max_rank();
        let breakdown = hn == 0.0 || hn <= cfg.breakdown_tol * product_norm;
        if !breakdown {
            let v = w.scaled(1.0 / hn);
            if V::USES_GRAM {
                let mut row = Vec::with_capacity(self.basis.len() + 1);
                for u in &self.basis {
                    row.push(v.dot(u)?);
                }
                row.push(v.dot(&v)?);
                self.gram.push(row);
            } else {
                self.gram.push(Vec::new());
            }
            self.basis.push(v);
        }
        Ok(ArnoldiStep {
            column: h,
            product_norm,
            rank,
            breakdown,
        })
    }
}

/// `x + Σ y_i v_i`, summed exactly and rounded once at `eps` (or after every term).
fn update<V: KrylovVector>(x: &V, basis: &[V], y: &[f64], cfg: &SolverConfig) -> Result<V> {
    let x_zero = x.is_zero();
    if cfg.per_addition_update {
        let mut acc = x.clone();
        let mut acc_zero = x_zero;
        for (c, v) in y.iter().zip(basis) {
            acc = if acc_zero {
                V::combine(&[(*c, v)], cfg.eps, cfg.rmax)?
            } else {
                V::combine(&[(1.0, &acc), (*c, v)], cfg.eps, cfg.rmax)?
            };
            acc_zero = false;
        }
        return Ok(acc);
    }
    let mut terms: Vec<(f64, &V)> = Vec::with_capacity(y.len() + 1);
    if !x_zero {
        terms.push((1.0, x));
    }
    terms.extend(y.iter().zip(basis).map(|(c, v)| (*c, v)));
    if terms.is_empty() {
        return Ok(x.clone());
    }
    V::combine(&terms, cfg.eps, cfg.rmax)
}

/// `T_ε(b − A x)` with the operator applied at tolerance `ε`.
fn residual<V, F>(apply: &mut F, b: &V, x: &V, cfg: &SolverConfig) -> Result<V>
where
    V: KrylovVector,
    F: FnMut(&V, f64) -> Result<V>,
{
    if x.is_zero() {
        return V::combine(&[(1.0, b)], cfg.eps, cfg.rmax);
    }
    let ax = apply(x, cfg.eps)?;
    V::combine(&[(1.0, b), (-1.0, &ax)], cfg.eps, cfg.rmax)
}

/// Restarted GMRES(m) with relaxed matvec accuracy.
///
/// `apply(v, δ)` must return the operator applied to `v` with relative accuracy `δ`. The
/// iteration stops once the computed residual `‖r̃_j‖/‖b‖` reaches `cfg.eps`; the true
/// residual is evaluated at every restart and at exit. When the restarts run out the
/// iterate with the smallest true residual is returned and `record.converged` is false.
pub fn relaxed_gmres<V, F>(mut apply: F, b: &V, x0: &V, cfg: &SolverConfig) -> Result<(V, ConvergenceRecord)>
where
    V: KrylovVector,
    F: FnMut(&V, f64) -> Result<V>,
{
    cfg.validate()?;
    let bnorm = b.norm();
    if !(bnorm > 0.0) || !bnorm.is_finite() {
        return Err(Error::InvalidParameter("right-hand side must be nonzero and finite".into()));
    }
    let start = Instant::now();
    let elapsed = || {
        if cfg.record_timing {
            start.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        }
    };
    let cap_hit = |rank: usize| cfg.rmax.is_some_and(|c| rank >= c);

    let mut record = ConvergenceRecord::default();
    let mut x = x0.clone();
    let mut r = residual(&mut apply, b, &x, cfg)?;
    let mut true_rel = r.norm() / bnorm;
    let mut computed_rel = true_rel;
    record.restarts.push(RestartRow {
        cycle: 0,
        iterations: 0,
        resid_true_rel: true_rel,
        rank_solution_max: x.max_rank(),
        sigma_min_hbar: None,
    });
    let mut best = (true_rel, x.clone());
    let mut iter = 0;

    if true_rel <= cfg.eps {
        record.converged = true;
    } else {
        for cycle in 0..=cfg.max_restarts {
            let beta = r.norm();
            let mut arnoldi = Arnoldi::new(r.scaled(1.0 / beta))?;
            let mut ls = HessenbergLs::new(beta);
            let mut resid = beta;
            let mut reached = false;
            for _ in 0..cfg.restart_m {
                let delta = relax_schedule(cfg.eps, resid / beta, cfg);
                let step = arnoldi.step(&mut apply, delta, cfg)?;
                resid = ls.push(&step.column)?;
                iter += 1;
                computed_rel = resid / bnorm;
                record.rank_cap_hit |= cap_hit(step.rank);
                let mut row = IterationRow {
                    iter,
                    cycle,
                    resid_computed_rel: computed_rel,
                    resid_true_rel: None,
                    delta,
                    rank_krylov_max: step.rank,
                    rank_solution_max: None,
                    wall_ms: 0.0,
                };
                if cfg.track_solution {
                    let sol = ls.solve()?;
                    let xj = update(&x, arnoldi.basis(), &sol.y, cfg)?;
                    let rj = residual(&mut apply, b, &xj, cfg)?;
                    row.resid_true_rel = Some(rj.norm() / bnorm);
                    row.rank_solution_max = Some(xj.max_rank());
                }
                row.wall_ms = elapsed();
                record.iterations.push(row);
                if step.breakdown {
                    record.breakdown = true;
                    reached = computed_rel <= cfg.eps;
                    break;
                }
                if computed_rel <= cfg.eps {
                    reached = true;
                    break;
                }
            }

            let sigma = sigma_min(&ls)?;
            let sol = ls.solve()?;
            record.rank_deficient_ls |= sol.rank_deficient;
            x = update(&x, arnoldi.basis(), &sol.y, cfg)?;
            record.rank_cap_hit |= cap_hit(x.max_rank());
            r = residual(&mut apply, b, &x, cfg)?;
            true_rel = r.norm() / bnorm;
            if let Some(last) = record.iterations.last_mut() {
                last.resid_true_rel = Some(true_rel);
                last.rank_solution_max = Some(x.max_rank());
                last.wall_ms = elapsed();
            }
            record.restarts.push(RestartRow {
                cycle: cycle + 1,
                iterations: iter,
                resid_true_rel: true_rel,
                rank_solution_max: x.max_rank(),
                sigma_min_hbar: sigma,
            });
            if true_rel < best.0 {
                best = (true_rel, x.clone());
            }
            if reached {
                record.converged = true;
                break;
            }
        }
    }

    record.final_computed_rel = computed_rel;
    if record.converged {
        record.final_true_rel = true_rel;
        Ok((x, record))
    } else {
        record.final_true_rel = best.0;
        Ok((best.1, record))
    }
}
