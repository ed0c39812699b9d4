//! Building tensor trains, reading entries, and compressing a dense tensor with TT-SVD.

use ndarray::Array1;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ttkry::tt::tt_svd;
use ttkry::{DenseTensor, Shape, TtTensor};

pub fn run_example() -> ttkry::Result<()> {
    // rank one: t[i, j] = a[i]·b[j], first index fastest in the dense layout
    let a = Array1::from(vec![1.0, 2.0]);
    let b = Array1::from(vec![10.0, 20.0, 30.0]);
    let t = TtTensor::rank_one(&[a, b])?;
    println!("rank-one values {:?}", t.full()?.values());

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let shape = Shape::new(vec![4, 5, 6, 3])?;
    let x = TtTensor::random(&shape, &[2, 3, 2], &mut rng)?;
    println!("random TT: modes {:?}, ranks {:?}, entry {:.4}", x.mode_sizes(), x.ranks(), x.element(&[1, 2, 3, 0])?);

    // a smooth function of four variables compresses well
    let f = DenseTensor::from_fn(Shape::uniform(4, 8)?, |i| {
        let s: f64 = i.iter().map(|&k| k as f64 / 7.0).sum();
        1.0 / (1.0 + s)
    });
    for eps in [1e-2, 1e-6, 1e-10] {
        let c = tt_svd(&f, eps, None)?;
        let err = c.full()?.relative_distance(&f)?;
        println!("tt_svd eps {eps:.0e}: ranks {:?}, error {err:.2e}", c.ranks());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> ttkry::Result<()> {
    run_example()
}
