//! Construction, dense conversion, TT-SVD, storage and quantization checked against dense
//! reconstructions.

use ndarray::{Array1, Array2, Array3};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ttkry::oracle::{best_rank_error, dense_from_kron, dense_from_tt, unfolding};
use ttkry::tt::{
    dequantize, quantization_grouping, quantize, quantize_matrix_modes, read_any, read_matrix, read_tensor, tt_svd,
    tt_svd_with_caps, write_matrix, write_tensor, KronTerm, TtFile, MAGIC,
};
use ttkry::{DenseTensor, Error, Shape, TtMatrix, TtTensor};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_shape(r: &mut ChaCha8Rng, d: usize, max_n: usize) -> Shape {
    use rand::Rng;
    Shape::new((0..d).map(|_| r.gen_range(1..=max_n)).collect()).unwrap()
}

#[test]
fn structural_errors_are_reported() {
    assert!(TtTensor::new(vec![]).is_err());
    let bad_boundary = vec![Array3::zeros((2, 3, 1))];
    assert!(matches!(TtTensor::new(bad_boundary), Err(Error::Invalid(_))));
    let chain = vec![Array3::zeros((1, 3, 2)), Array3::zeros((3, 3, 1))];
    assert!(matches!(TtTensor::new(chain), Err(Error::Invalid(_))));
    let empty_mode = vec![Array3::zeros((1, 0, 1))];
    assert!(TtTensor::new(empty_mode).is_err());
    assert!(Shape::new(vec![3, 0]).is_err());
}

#[test]
fn element_access_matches_full() {
    let mut r = rng(3);
    let shape = Shape::new(vec![3, 4, 2]).unwrap();
    let t = TtTensor::random(&shape, &[2, 3], &mut r).unwrap();
    let full = t.full().unwrap();
    for lin in 0..shape.numel() {
        let idx = shape.multi_index(lin);
        assert_eq!(shape.linear_index(&idx).unwrap(), lin);
        assert!((t.element(&idx).unwrap() - full.values()[lin]).abs() < 1e-13);
    }
    assert!(t.element(&[3, 0, 0]).is_err());
}

#[test]
fn first_index_runs_fastest() {
    let a = Array1::from(vec![1.0, 2.0]);
    let b = Array1::from(vec![10.0, 20.0, 30.0]);
    let t = TtTensor::rank_one(&[a, b]).unwrap();
    assert_eq!(t.full().unwrap().values(), &[10.0, 20.0, 20.0, 40.0, 30.0, 60.0]);
}

#[test]
fn dense_guard_refuses_large_tensors() {
    let t = TtTensor::ones(&Shape::uniform(8, 10).unwrap());
    assert!(matches!(t.full_with_guard(1000), Err(Error::GuardExceeded { .. })));
}

#[test]
fn kron_assembly_matches_explicit_kronecker() {
    let mut r = rng(11);
    use rand::Rng;
    let terms: Vec<KronTerm> = (0..3)
        .map(|t| {
            KronTerm::new(
                0.5 + t as f64,
                vec![
                    Array2::from_shape_fn((2, 2), |_| r.gen_range(-1.0..1.0)),
                    Array2::from_shape_fn((3, 3), |_| r.gen_range(-1.0..1.0)),
                    Array2::from_shape_fn((2, 2), |_| r.gen_range(-1.0..1.0)),
                ],
            )
        })
        .collect();
    let a = TtMatrix::from_kron(&terms).unwrap();
    assert_eq!(a.ranks(), vec![1, 3, 3, 1]);
    let from_tt = dense_from_tt(&a).unwrap();
    let reference = dense_from_kron(&terms).unwrap();
    let diff = (from_tt.matrix() - reference.matrix()).mapv(f64::abs).fold(0.0, |m: f64, &v| m.max(v));
    assert!(diff < 1e-13);
}

#[test]
fn identity_and_diag_operators() {
    let shape = Shape::new(vec![2, 3]).unwrap();
    let eye = dense_from_tt(&TtMatrix::identity(&shape)).unwrap();
    assert_eq!(eye.matrix(), &Array2::<f64>::eye(6));
    let mut r = rng(5);
    let t = TtTensor::random(&shape, &[2], &mut r).unwrap();
    let diag = TtMatrix::diag(&t);
    assert_eq!(diag.diagonal().unwrap(), t.full().unwrap());
}

#[test]
fn tt_svd_exact_on_low_rank_input() {
    let mut r = rng(21);
    let shape = Shape::new(vec![3, 4, 5, 2]).unwrap();
    let t = TtTensor::random(&shape, &[2, 3, 2], &mut r).unwrap();
    let x = t.full().unwrap();
    let back = tt_svd(&x, 1e-12, None).unwrap();
    assert!(back.ranks().iter().zip(t.ranks()).all(|(a, b)| *a <= b));
    assert!(back.full().unwrap().relative_distance(&x).unwrap() < 1e-12);
}

#[test]
fn tt_svd_ranks_equal_unfolding_ranks() {
    let mut r = rng(8);
    let shape = Shape::new(vec![4, 4, 4]).unwrap();
    let t = TtTensor::random(&shape, &[3, 2], &mut r).unwrap();
    let x = t.full().unwrap();
    let back = tt_svd(&x, 1e-13, None).unwrap();
    for k in 1..3 {
        let s = ttkry::linalg::singular_values(unfolding(&x, k).unwrap().view()).unwrap();
        let numerical = s.iter().filter(|&&v| v > 1e-10 * s[0]).count();
        assert_eq!(back.ranks()[k], numerical);
    }
}

#[test]
fn tt_svd_with_caps_respects_each_cap() {
    let mut r = rng(9);
    let x = DenseTensor::random(Shape::new(vec![3, 3, 3, 3]).unwrap(), &mut r);
    let t = tt_svd_with_caps(&x, 0.0, &[2, 4, 1]).unwrap();
    assert_eq!(t.ranks(), vec![1, 2, 4, 1, 1]);
    let bounds = best_rank_error(&x, &[2, 4, 1]).unwrap();
    let err = t.full().unwrap().distance(&x).unwrap();
    assert!(err + 1e-12 >= bounds.lower_bound);
    assert!(err <= bounds.tt_svd_error * (1.0 + 1e-10));
}

#[test]
fn storage_roundtrip_is_bit_exact() {
    let mut r = rng(13);
    let t = TtTensor::random(&Shape::new(vec![2, 5, 3]).unwrap(), &[3, 2], &mut r).unwrap();
    let mut buf = Vec::new();
    write_tensor(&mut buf, &t).unwrap();
    assert_eq!(&buf[..8], MAGIC);
    let back = read_tensor(&mut buf.as_slice()).unwrap();
    assert_eq!(back.cores(), t.cores());
    assert!(read_matrix(&mut buf.as_slice()).is_err());
    match read_any(&mut buf.as_slice()).unwrap() {
        TtFile::Tensor(x) => assert_eq!(x.cores(), t.cores()),
        TtFile::Matrix(_) => panic!("tensor file read as operator"),
    }

    let a = ttkry::operators::conv_diff_3d(4, 0.5).unwrap();
    let mut buf = Vec::new();
    write_matrix(&mut buf, &a).unwrap();
    let back = read_matrix(&mut buf.as_slice()).unwrap();
    assert_eq!(back.cores(), a.cores());
}

#[test]
fn corrupted_storage_is_rejected() {
    let t = TtTensor::ones(&Shape::new(vec![2, 2]).unwrap());
    let mut buf = Vec::new();
    write_tensor(&mut buf, &t).unwrap();
    let mut bad_magic = buf.clone();
    bad_magic[0] ^= 0xff;
    assert!(read_tensor(&mut bad_magic.as_slice()).is_err());
    let mut bad_version = buf.clone();
    bad_version[8] = 99;
    assert!(read_tensor(&mut bad_version.as_slice()).is_err());
    let truncated = &buf[..buf.len() - 3];
    assert!(read_tensor(&mut &truncated[..]).is_err());
}

#[test]
fn operator_quantization_preserves_action() {
    let a = ttkry::operators::conv_diff_3d(4, 1.0).unwrap();
    let q = quantize_matrix_modes(&a, 2, &[true, true, true]).unwrap();
    assert_eq!(q.order(), 6);
    let mut r = rng(2);
    let x = TtTensor::random(&Shape::uniform(3, 4).unwrap(), &[2, 2], &mut r).unwrap();
    let qx = quantize(&x, 2).unwrap();
    let y = ttkry::arith::matvec(&q, &qx).unwrap();
    let grouping = quantization_grouping(&[4, 4, 4], 2).unwrap();
    let back = dequantize(&y, &grouping, 2).unwrap().full().unwrap();
    let reference = ttkry::arith::matvec(&a, &x).unwrap().full().unwrap();
    assert!(back.relative_distance(&reference).unwrap() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tt_svd_meets_its_accuracy(seed in 0u64..10_000, d in 1usize..5, eps in prop::sample::select(vec![1e-1, 1e-3, 1e-8])) {
        let mut r = rng(seed);
        let shape = random_shape(&mut r, d, 5);
        let x = DenseTensor::random(shape, &mut r);
        let t = tt_svd(&x, eps, None).unwrap();
        let err = t.full().unwrap().distance(&x).unwrap();
        prop_assert!(err <= eps * x.norm() * (1.0 + 1e-10) + 1e-14);
    }

    #[test]
    fn quantization_roundtrip(seed in 0u64..10_000, p in 1usize..4, q in 1usize..3) {
        let mut r = rng(seed);
        let shape = Shape::new(vec![1 << p, 3, 1 << q]).unwrap();
        let t = TtTensor::random(&shape, &[2, 2], &mut r).unwrap();
        let qt = ttkry::tt::quantize_modes(&t, 2, &[true, false, true]).unwrap();
        prop_assert_eq!(qt.order(), p + 1 + q);
        for (a, b) in qt.full().unwrap().values().iter().zip(t.full().unwrap().values()) {
            prop_assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()));
        }
        let back = dequantize(&qt, &[p, 1, q], 2).unwrap();
        prop_assert!(back.full().unwrap().relative_distance(&t.full().unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn storage_roundtrip_random(seed in 0u64..10_000, d in 1usize..5) {
        let mut r = rng(seed);
        let shape = random_shape(&mut r, d, 4);
        let ranks: Vec<usize> = (1..d).map(|k| 1 + (seed as usize + k) % 3).collect();
        let t = TtTensor::random(&shape, &ranks, &mut r).unwrap();
        let mut buf = Vec::new();
        write_tensor(&mut buf, &t).unwrap();
        let back = read_tensor(&mut buf.as_slice()).unwrap();
        prop_assert_eq!(back.cores(), t.cores());
    }
}
