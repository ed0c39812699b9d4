//! TT addition, Hadamard product, inner product and matrix-vector product checked against
//! the dense results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ttkry::arith::{add, dot, hadamard, matvec, norm};
use ttkry::oracle::{dense_add, dense_dot, dense_from_tt, dense_hadamard};
use ttkry::{Shape, TtMatrix, TtTensor};

pub fn run_example() -> ttkry::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let shape = Shape::new(vec![3, 4, 5])?;
    let a = TtTensor::random(&shape, &[2, 3], &mut rng)?;
    let b = TtTensor::random(&shape, &[3, 2], &mut rng)?;
    let (fa, fb) = (a.full()?, b.full()?);

    let s = add(&a, &b)?;
    println!("a + b ranks {:?}, dense error {:.1e}", s.ranks(), s.full()?.distance(&dense_add(&fa, &fb)?)?);
    let h = hadamard(&a, &b)?;
    println!("a ⊙ b ranks {:?}, dense error {:.1e}", h.ranks(), h.full()?.distance(&dense_hadamard(&fa, &fb)?)?);
    println!("⟨a, b⟩ = {:.6}, dense {:.6}", dot(&a, &b)?, dense_dot(&fa, &fb)?);
    println!("‖a‖ = {:.6}, dense {:.6}", norm(&a), fa.norm());

    let op = TtMatrix::diag(&a);
    let y = matvec(&op, &b)?;
    let dense = dense_from_tt(&op)?.apply(&fb)?;
    println!("diag(a)·b matches a ⊙ b: {:.1e}", y.full()?.distance(&dense)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> ttkry::Result<()> {
    run_example()
}
