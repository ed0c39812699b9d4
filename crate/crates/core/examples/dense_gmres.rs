//! The relaxed GMRES driver on plain vectors, with matvecs perturbed by the relative
//! accuracy the relaxation schedule asks for.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ttkry::krylov::{relaxed_gmres, SolverConfig};
use ttkry::oracle::{dense_gmres, DenseOperator};
use ttkry::Shape;

pub fn run_example() -> ttkry::Result<()> {
    let n = 200;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = Array2::from_shape_fn((n, n), |(i, j)| {
        let off: f64 = rng.gen_range(-1.0..1.0);
        off / (n as f64).sqrt() + if i == j { 2.5 } else { 0.0 }
    });
    let b = Array1::from_shape_fn(n, |_| rng.gen_range(-1.0..1.0));
    let cfg = SolverConfig { record_timing: false, ..SolverConfig::with_eps(1e-8) };

    let mut noise = ChaCha8Rng::seed_from_u64(6);
    let (x, rec) = relaxed_gmres(
        |v: &Array1<f64>, delta| {
            let av = a.dot(v);
            let e: Array1<f64> = Array1::from_shape_fn(n, |_| noise.gen_range(-1.0..1.0));
            let scale = delta * av.dot(&av).sqrt() / e.dot(&e).sqrt();
            Ok(av + e * scale)
        },
        &b,
        &Array1::zeros(n),
        &cfg,
    )?;
    for row in &rec.iterations {
        println!("iter {:2}  residual {:.2e}  δ {:.2e}", row.iter, row.resid_computed_rel, row.delta);
    }
    let r = &b - &a.dot(&x);
    println!("true residual {:.2e}", r.dot(&r).sqrt() / b.dot(&b).sqrt());

    let op = DenseOperator::new(a, Shape::new(vec![n])?)?;
    let (_, exact) = dense_gmres(&op, &b, &Array1::zeros(n), &cfg)?;
    println!("exact-matvec GMRES: {} iterations, relaxed: {}", exact.total_iterations(), rec.total_iterations());
    Ok(())
}

#[allow(dead_code)]
fn main() -> ttkry::Result<()> {
    run_example()
}
