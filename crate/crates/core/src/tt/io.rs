//! Versioned little-endian binary storage for tensor trains.
//!
//! Layout: `MAGIC` (8 bytes), version (`u32`), kind (`u8`: 0 tensor, 1 operator),
//! order `d` (`u64`), mode sizes (`d × u64`; operators store row sizes then column sizes),
//! ranks `r_0 … r_d` (`(d+1) × u64`), then every core in order as row-major `f64`
//! values (core extents `r_{k-1} × n_k × r_k` or `r_{k-1} × m_k × n_k × r_k`).

use std::io::{Read, Write};

use ndarray::{Array3, Array4};

use super::{TtMatrix, TtTensor};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"TTKRYTT\0";
pub const FORMAT_VERSION: u32 = 1;

const KIND_TENSOR: u8 = 0;
const KIND_MATRIX: u8 = 1;
// refuse absurd headers before allocating
const MAX_ORDER: u64 = 1 << 16;
const MAX_CORE: u64 = 1 << 32;

/// Content of a tensor-train file.
#[derive(Clone, Debug)]
pub enum TtFile {
    Tensor(TtTensor),
    Matrix(TtMatrix),
}

fn put_u64<W: Write>(w: &mut W, v: usize) -> Result<()> {
    w.write_all(&(v as u64).to_le_bytes())?;
    Ok(())
}

fn get_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn put_values<'a, W: Write>(w: &mut W, values: impl Iterator<Item = &'a f64>) -> Result<()> {
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn get_values<R: Read>(r: &mut R, count: usize) -> Result<Vec<f64>> {
    let mut bytes = vec![0u8; count * 8];
    r.read_exact(&mut bytes)?;
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect())
}

fn write_header<W: Write>(w: &mut W, kind: u8, order: usize) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&[kind])?;
    put_u64(w, order)
}

pub fn write_tensor<W: Write>(w: &mut W, t: &TtTensor) -> Result<()> {
    write_header(w, KIND_TENSOR, t.order())?;
    for n in t.mode_sizes() {
        put_u64(w, n)?;
    }
    for r in t.ranks() {
        put_u64(w, r)?;
    }
    for core in t.cores() {
        put_values(w, core.as_standard_layout().iter())?;
    }
    Ok(())
}

pub fn write_matrix<W: Write>(w: &mut W, a: &TtMatrix) -> Result<()> {
    write_header(w, KIND_MATRIX, a.order())?;
    for n in a.row_shape().dims().iter().chain(a.col_shape().dims()) {
        put_u64(w, *n)?;
    }
    for r in a.ranks() {
        put_u64(w, r)?;
    }
    for core in a.cores() {
        put_values(w, core.as_standard_layout().iter())?;
    }
    Ok(())
}

fn read_sizes<R: Read>(r: &mut R, count: usize) -> Result<Vec<usize>> {
    (0..count)
        .map(|_| {
            let v = get_u64(r)?;
            if v == 0 || v > MAX_CORE {
                return Err(Error::Format(format!("implausible size {v}")));
            }
            Ok(v as usize)
        })
        .collect()
}

fn checked_len(dims: &[usize]) -> Result<usize> {
    let len = dims
        .iter()
        .try_fold(1u64, |acc, &n| acc.checked_mul(n as u64))
        .filter(|&l| l <= MAX_CORE)
        .ok_or_else(|| Error::Format(format!("core extent {dims:?} too large")))?;
    Ok(len as usize)
}

/// Reads either kind of file.
pub fn read_any<R: Read>(r: &mut R) -> Result<TtFile> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let mut version = [0u8; 4];
    r.read_exact(&mut version)?;
    let version = u32::from_le_bytes(version);
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let mut kind = [0u8; 1];
    r.read_exact(&mut kind)?;
    let d = get_u64(r)?;
    if d == 0 || d > MAX_ORDER {
        return Err(Error::Format(format!("implausible order {d}")));
    }
    let d = d as usize;
    match kind[0] {
        KIND_TENSOR => {
            let sizes = read_sizes(r, d)?;
            let ranks = read_sizes(r, d + 1)?;
            let cores = (0..d)
                .map(|k| {
                    let dims = (ranks[k], sizes[k], ranks[k + 1]);
                    let len = checked_len(&[dims.0, dims.1, dims.2])?;
                    Ok(Array3::from_shape_vec(dims, get_values(r, len)?)?)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(TtFile::Tensor(TtTensor::new(cores)?))
        }
        KIND_MATRIX => {
            let sizes = read_sizes(r, 2 * d)?;
            let ranks = read_sizes(r, d + 1)?;
            let cores = (0..d)
                .map(|k| {
                    let dims = (ranks[k], sizes[k], sizes[d + k], ranks[k + 1]);
                    let len = checked_len(&[dims.0, dims.1, dims.2, dims.3])?;
                    Ok(Array4::from_shape_vec(dims, get_values(r, len)?)?)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(TtFile::Matrix(TtMatrix::new(cores)?))
        }
        other => Err(Error::Format(format!("unknown kind tag {other}"))),
    }
}

pub fn read_tensor<R: Read>(r: &mut R) -> Result<TtTensor> {
    match read_any(r)? {
        TtFile::Tensor(t) => Ok(t),
        TtFile::Matrix(_) => Err(Error::Format("expected a tensor, found an operator".into())),
    }
}

pub fn read_matrix<R: Read>(r: &mut R) -> Result<TtMatrix> {
    match read_any(r)? {
        TtFile::Matrix(a) => Ok(a),
        TtFile::Tensor(_) => Err(Error::Format("expected an operator, found a tensor".into())),
    }
}
