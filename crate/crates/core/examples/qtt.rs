//! Quantized tensor trains: splitting modes of size 2^p into binary modes.

use ttkry::tt::{dequantize, quantization_grouping, quantize, quantize_matrix_modes};
use ttkry::{rounded_matvec, round, TruncationSpec};

pub fn run_example() -> ttkry::Result<()> {
    let n = 32;
    let rhs = ttkry::operators::conv_diff_rhs(n, 0.5)?;
    let q = round(&quantize(&rhs, 2)?, &TruncationSpec::new(1e-12)?)?;
    println!("right-hand side: modes {:?} ranks {:?} -> modes {:?} ranks {:?}", rhs.mode_sizes(), rhs.ranks(), q.mode_sizes(), q.ranks());

    let op = ttkry::operators::conv_diff_3d(n, 0.5)?;
    let qop = quantize_matrix_modes(&op, 2, &[true, true, true])?;
    println!("operator: {} cores, ranks {:?}", qop.order(), qop.ranks());

    let y = rounded_matvec(&qop, &q, &TruncationSpec::new(1e-10)?)?;
    let back = dequantize(&y, &quantization_grouping(&[n, n, n], 2)?, 2)?;
    let reference = rounded_matvec(&op, &rhs, &TruncationSpec::new(1e-10)?)?;
    let err = back.full()?.relative_distance(&reference.full()?)?;
    println!("quantized product agrees with the plain one to {err:.1e}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> ttkry::Result<()> {
    run_example()
}
