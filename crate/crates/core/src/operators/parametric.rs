use std::f64::consts::PI;

use ndarray::{s, Array1, Array2, Array3, Array4};

use super::convdiff::ASSEMBLY_EPS;
use super::expsum::inv_laplace_expsum_on;
use super::stencil::{stiffness_1d, Grid1D};
use crate::error::{Error, Result};
use crate::round::{round, round_source, round_sum, rounded_matvec, source_norm, Combination, TruncationSpec};
use crate::linalg::ReshapeC;
use crate::tt::{TtMatrix, TtTensor};

/// Karhunen–Loève coefficient `a(x, y) = 1 + Σ_{j=1}^d √λ_j sin(πjx) y_j` with
/// `√λ_j = 1/(2(j+1)²)`, sampled at the cell midpoints of a symmetric grid on `[−1, 1]` and on
/// `ny` equispaced collocation points of `[−1, 1]` per parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KlCoefficient {
    grid: Grid1D,
    ny: usize,
    d: usize,
}

impl KlCoefficient {
    pub fn new(nx: usize, ny: usize, d: usize) -> Result<Self> {
        if ny < 2 {
            return Err(Error::InvalidParameter(format!("parameter grid needs ny ≥ 2, got {ny}")));
        }
        let kl = KlCoefficient {
            grid: Grid1D::symmetric(nx)?,
            ny,
            d,
        };
        let min = kl.grid_minimum();
        if !(min > 0.0) {
            return Err(Error::Ellipticity { min });
        }
        Ok(kl)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `√λ_j` for `j ≥ 1`.
    pub fn amplitude(j: usize) -> f64 {
        let q = (j + 1) as f64;
        1.0 / (2.0 * q * q)
    }

    pub fn y_grid(&self) -> Array1<f64> {
        Array1::linspace(-1.0, 1.0, self.ny)
    }

    /// Pointwise value; `y` holds one value per parameter.
    pub fn eval(&self, x: f64, y: &[f64]) -> f64 {
        1.0 + y
            .iter()
            .enumerate()
            .map(|(j, &yj)| Self::amplitude(j + 1) * (PI * (j + 1) as f64 * x).sin() * yj)
            .sum::<f64>()
    }

    /// Minimum of the coefficient over the discrete grid. The parameter grid contains `±1`,
    /// so each term can take its most negative value independently.
    pub fn grid_minimum(&self) -> f64 {
        self.grid
            .midpoints()
            .iter()
            .map(|&x| {
                1.0 - (1..=self.d)
                    .map(|j| (Self::amplitude(j) * (PI * j as f64 * x).sin()).abs())
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Samples as a TT tensor of shape `(nx + 1, ny, …, ny)`, rounded at [`ASSEMBLY_EPS`].
    pub fn tensor(&self) -> Result<TtTensor> {
        let d = self.d;
        let xm = self.grid.midpoints();
        let nm = xm.len();
        let y = self.y_grid();
        let ny = self.ny;
        if d == 0 {
            return TtTensor::new(vec![Array3::ones((1, nm, 1))]);
        }
        // rank index t = 0 carries the constant term, t = j the j-th parameter term
        let mut cores = Vec::with_capacity(d + 1);
        cores.push(Array3::from_shape_fn((1, nm, d + 1), |(_, i, t)| {
            if t == 0 {
                1.0
            } else {
                Self::amplitude(t) * (PI * t as f64 * xm[i]).sin()
            }
        }));
        for j in 1..=d {
            let slot = |t: usize, i: usize| if t == j { y[i] } else { 1.0 };
            cores.push(if j == d {
                Array3::from_shape_fn((d + 1, ny, 1), |(t, i, _)| slot(t, i))
            } else {
                Array3::from_shape_fn((d + 1, ny, d + 1), |(a, i, b)| if a == b { slot(a, i) } else { 0.0 })
            });
        }
        round(&TtTensor::new(cores)?, &TruncationSpec::new(ASSEMBLY_EPS)?)
    }
}

/// KL coefficient samples for `nx` interior points and `d` parameters; see [`KlCoefficient`].
pub fn kl_coefficient(nx: usize, ny: usize, d: usize) -> Result<TtTensor> {
    KlCoefficient::new(nx, ny, d)?.tensor()
}

/// Parametric stiffness `Γ(c)` for a coefficient `c` given at the `n + 1` midpoints of `g` in
/// mode 0 and on parameter grids in the other modes. `Γ` is linear in `c`, so every rank
/// slice of the first core becomes a 1D stiffness matrix and parameter cores become diagonal.
pub fn kl_stiffness(coeff: &TtTensor, g: &Grid1D) -> Result<TtMatrix> {
    let first = coeff.core(0);
    let (_, nm, r1) = first.dim();
    if nm != g.n() + 1 {
        return Err(Error::ShapeMismatch {
            context: "coefficient midpoints",
            expected: vec![g.n() + 1],
            found: vec![nm],
        });
    }
    let n = g.n();
    let mut core0 = Array4::zeros((1, n, n, r1));
    for b in 0..r1 {
        let k = stiffness_1d(g, first.slice(s![0, .., b]))?;
        core0.slice_mut(s![0, .., .., b]).assign(&k);
    }
    let mut cores = vec![core0];
    if coeff.order() > 1 {
        let rest = TtTensor::from_cores_unchecked(
            std::iter::once(Array3::ones((1, 1, 1)))
                .chain(coeff.cores()[1..].iter().cloned())
                .collect(),
        );
        cores.extend(TtMatrix::diag(&rest).cores()[1..].iter().cloned());
    }
    TtMatrix::new(cores)
}

/// Outcome of [`newton_reciprocal`].
#[derive(Clone, Debug)]
pub struct NewtonResult {
    pub x: TtTensor,
    /// `‖a ⊙ x − 1‖ / ‖1‖` (an upper bound including the rounding of `a ⊙ x`).
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Relative rounding accuracy of the Newton correction.
pub const NEWTON_CORRECTION_EPS: f64 = 1e-2;

/// TT Newton–Schulz iteration for the elementwise reciprocal of `a`, written in residual
/// form: `e = T(1 − a ⊙ x)`, `x ← T(x + x ⊙ e)` from `x₀ = 1`.
///
/// `a ⊙ x` is rounded at `eps/100`, `x ⊙ e` at `eps/100` relative to `‖x‖`, the update at
/// `eps/10`. The correction `e` only needs [`NEWTON_CORRECTION_EPS`] relative accuracy: an
/// error `η` in it changes the next residual from `e²` to about `e² + η`, so convergence
/// stays at least linear with that rate.
///
/// Stops once `‖a ⊙ x − 1‖/‖1‖ ≤ eps`, with the rounding of `a ⊙ x` counted in; three
/// consecutive residual increases are reported as divergence.
pub fn newton_reciprocal(a: &TtTensor, spec: &TruncationSpec, maxit: usize) -> Result<NewtonResult> {
    if !(spec.eps > 0.0) {
        return Err(Error::InvalidParameter("Newton iteration needs eps > 0".into()));
    }
    let ones = TtTensor::ones(&a.shape());
    let ones_norm = (ones.shape().numel() as f64).sqrt();
    let update_spec = spec.at(spec.eps / 10.0);
    let product_spec = spec.at(spec.eps / 100.0);
    let diag_a = TtMatrix::diag(a);

    // (e, residual bound)
    let residual = |x: &TtTensor| -> Result<(TtTensor, f64)> {
        let ax = rounded_matvec(&diag_a, x, &product_spec)?;
        let diff = Combination::new(&[(1.0, &ones), (-1.0, &ax)])?;
        let exact = source_norm(&diff)?;
        let slack = product_spec.eps * crate::arith::norm(&ax);
        let e = round_source(&diff, &spec.at(NEWTON_CORRECTION_EPS))?;
        Ok((e, (exact + slack) / ones_norm))
    };

    let mut x = ones.clone();
    let (mut e, mut res) = residual(&x)?;
    let mut increases = 0;
    let mut history = vec![res];
    for it in 1..=maxit {
        // only the absolute error of the small correction matters, so its relative accuracy
        // can be loosened by the current residual
        let xe_spec = spec.at((product_spec.eps / res).min(NEWTON_CORRECTION_EPS));
        let xe = rounded_matvec(&TtMatrix::diag(&x), &e, &xe_spec)?;
        x = round_sum(&[(1.0, &x), (1.0, &xe)], &update_spec)?;
        let (next_e, next_res) = residual(&x)?;
        if !next_res.is_finite() || next_res > res {
            increases += 1;
        } else {
            increases = 0;
        }
        history.push(next_res);
        e = next_e;
        res = next_res;
        if res <= spec.eps {
            return Ok(NewtonResult {
                x,
                residual: res,
                iterations: it,
                converged: true,
            });
        }
        if increases >= 3 || !res.is_finite() {
            return Err(Error::Divergence(format!(
                "residual grew for {increases} consecutive iterations: {history:?}"
            )));
        }
    }
    Ok(NewtonResult {
        x,
        residual: res,
        iterations: maxit,
        converged: false,
    })
}

/// `Δ_x⁻¹ ⊗ I ⊗ ⋯ ⊗ I` from the exponential-sum inverse in the spatial slot.
pub fn parametric_inv_laplace(g: &Grid1D, ny: usize, d: usize, m: usize) -> Result<TtMatrix> {
    let spatial = inv_laplace_expsum_on(g, 1, m)?;
    let eye = Array2::<f64>::eye(ny);
    let mut cores = vec![spatial.core(0).clone()];
    for _ in 0..d {
        cores.push(eye.clone().into_shape_c((1, ny, ny, 1))?);
    }
    TtMatrix::new(cores)
}

/// `P₂ = Δ⁻¹ Γ(1/a) Δ⁻¹`, applied with one rounding per stage.
#[derive(Clone, Debug)]
pub struct P2Preconditioner {
    pub inv_laplace: TtMatrix,
    pub inverse_stiffness: TtMatrix,
}

impl P2Preconditioner {
    /// `v ↦ T(Δ⁻¹·T(Γ(1/a)·T(Δ⁻¹·v)))`.
    pub fn apply(&self, v: &TtTensor, spec: &TruncationSpec) -> Result<TtTensor> {
        let w = rounded_matvec(&self.inv_laplace, v, spec)?;
        let w = rounded_matvec(&self.inverse_stiffness, &w, spec)?;
        rounded_matvec(&self.inv_laplace, &w, spec)
    }
}

/// Assembled parametric diffusion problem `Γ(a)u = 1` with its `P₂` preconditioner.
#[derive(Clone, Debug)]
pub struct ParametricProblem {
    pub kl: KlCoefficient,
    pub coefficient: TtTensor,
    pub stiffness: TtMatrix,
    pub rhs: TtTensor,
    pub reciprocal: NewtonResult,
    pub precond: P2Preconditioner,
}

/// Newton iterations allowed when inverting the coefficient.
pub const NEWTON_MAXIT: usize = 40;

impl ParametricProblem {
    /// `m` is the quadrature half-width of `Δ⁻¹`; `spec` controls the reciprocal `1/a`.
    pub fn assemble(nx: usize, ny: usize, d: usize, m: usize, spec: &TruncationSpec) -> Result<Self> {
        let kl = KlCoefficient::new(nx, ny, d)?;
        let coefficient = kl.tensor()?;
        let stiffness = kl_stiffness(&coefficient, kl.grid())?;
        let reciprocal = newton_reciprocal(&coefficient, spec, NEWTON_MAXIT)?;
        if !reciprocal.converged {
            return Err(Error::Divergence(format!(
                "reciprocal coefficient stalled at residual {:.3e}",
                reciprocal.residual
            )));
        }
        let precond = P2Preconditioner {
            inv_laplace: parametric_inv_laplace(kl.grid(), ny, d, m)?,
            inverse_stiffness: kl_stiffness(&reciprocal.x, kl.grid())?,
        };
        let rhs = TtTensor::ones(&stiffness.row_shape());
        Ok(ParametricProblem {
            kl,
            coefficient,
            stiffness,
            rhs,
            reciprocal,
            precond,
        })
    }
}

/// Builds only the `P₂` preconditioner of [`ParametricProblem::assemble`].
pub fn p2_preconditioner(nx: usize, ny: usize, d: usize, m: usize, spec: &TruncationSpec) -> Result<P2Preconditioner> {
    Ok(ParametricProblem::assemble(nx, ny, d, m, spec)?.precond)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amplitudes_decrease() {
        assert_eq!(KlCoefficient::amplitude(1), 0.125);
        assert!(KlCoefficient::amplitude(2) < KlCoefficient::amplitude(1));
    }

    #[test]
    fn reciprocal_of_ones_is_immediate() {
        let ones = TtTensor::ones(&crate::tt::Shape::new(vec![5, 3, 3]).unwrap());
        let r = newton_reciprocal(&ones, &TruncationSpec::new(1e-8).unwrap(), 5).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 1);
    }
}
