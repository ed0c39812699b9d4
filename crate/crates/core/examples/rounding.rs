//! Rounding sums and operator products lazily, without forming the exact result first.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ttkry::{arith, round, round_sum, rounded_matvec, Shape, TruncationSpec, TtTensor};

pub fn run_example() -> ttkry::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let shape = Shape::uniform(5, 6)?;
    let x = TtTensor::random(&shape, &[3, 4, 4, 3], &mut rng)?;
    let y = TtTensor::random(&shape, &[3, 4, 4, 3], &mut rng)?;

    let exact = arith::add(&x, &arith::scale(&y, 1e-3))?;
    println!("exact sum ranks {:?}", exact.ranks());
    for eps in [1e-1, 1e-3, 1e-8] {
        let spec = TruncationSpec::new(eps)?;
        let r = round_sum(&[(1.0, &x), (1e-3, &y)], &spec)?;
        let err = arith::norm(&arith::sub(&r, &exact)?) / arith::norm(&exact);
        println!("eps {eps:.0e}: ranks {:?}, relative error {err:.2e}", r.ranks());
    }

    // the same rounding through an explicit sum, capped at rank 3
    let capped = round(&exact, &TruncationSpec::exact().with_rmax(Some(3))?)?;
    println!("rank cap 3: ranks {:?}", capped.ranks());

    let op = ttkry::operators::conv_diff_3d(16, 0.2)?;
    let v = TtTensor::random(&Shape::uniform(3, 16)?, &[4, 4], &mut rng)?;
    let av = rounded_matvec(&op, &v, &TruncationSpec::new(1e-6)?)?;
    println!("A·v: operator ranks {:?}, input ranks {:?}, rounded product ranks {:?}", op.ranks(), v.ranks(), av.ranks());
    Ok(())
}

#[allow(dead_code)]
fn main() -> ttkry::Result<()> {
    run_example()
}
