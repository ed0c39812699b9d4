//! Dense reference computations: the exponential-sum inverse Laplacian against the exact
//! inverse, and the unfolding bound on the best low-rank error.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ttkry::operators::{inv_laplace_expsum, laplace_1d, Grid1D};
use ttkry::oracle::{best_rank_error, dense_from_tt, kron_sum, DenseOperator};
use ttkry::tt::tt_svd_with_caps;
use ttkry::{DenseTensor, Shape};

pub fn run_example() -> ttkry::Result<()> {
    let n = 8;
    let exact = kron_sum(&laplace_1d(&Grid1D::symmetric(n)?), 3)?.inverse()?;
    for m in [9, 16, 25, 36] {
        let approx = dense_from_tt(&inv_laplace_expsum(n, 3, m)?)?;
        let diff = DenseOperator::new(approx.matrix() - exact.matrix(), exact.shape().clone())?;
        println!("M = {m:2}: relative spectral error {:.2e}", diff.norm2()? / exact.norm2()?);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x = DenseTensor::random(Shape::uniform(4, 5)?, &mut rng);
    let caps = [3, 5, 3];
    let bounds = best_rank_error(&x, &caps)?;
    let err = tt_svd_with_caps(&x, 0.0, &caps)?.full()?.distance(&x)?;
    println!(
        "ranks {caps:?}: lower bound {:.4}, TT-SVD error {err:.4}, √(d−1)·bound {:.4}",
        bounds.lower_bound,
        3f64.sqrt() * bounds.lower_bound
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> ttkry::Result<()> {
    run_example()
}
