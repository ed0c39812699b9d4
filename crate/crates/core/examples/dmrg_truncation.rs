//! Two-site DMRG truncation of a lazily contracted product `A·x`, compared with SVD rounding.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ttkry::dmrg::{dmrg_truncate, DmrgOptions, DmrgTarget};
use ttkry::{rounded_matvec, Shape, TruncationSpec, TtTensor};

pub fn run_example() -> ttkry::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 12;
    let op = ttkry::operators::conv_diff_3d(n, 0.5)?;
    let shape = Shape::uniform(3, n)?;
    let x = TtTensor::random(&shape, &[3, 3], &mut rng)?;
    let x0 = TtTensor::random(&shape, &[1, 1], &mut rng)?;
    let eps = 1e-6;

    for boost in [0, 3] {
        let opts = DmrgOptions { eps, rank_boost: boost, ..DmrgOptions::default() };
        let res = dmrg_truncate(DmrgTarget::MatVec(&op, &x), &x0, &opts)?;
        println!(
            "boost {boost}: ranks {:?}, error {:.2e}, converged {}, sweeps {}",
            res.tensor.ranks(),
            res.relative_error,
            res.converged,
            res.sweeps
        );
    }
    let svd = rounded_matvec(&op, &x, &TruncationSpec::new(eps)?)?;
    println!("SVD rounding: ranks {:?}", svd.ranks());
    Ok(())
}

#[allow(dead_code)]
fn main() -> ttkry::Result<()> {
    run_example()
}
