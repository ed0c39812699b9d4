use rand::Rng;
use rand_distr::StandardNormal;

use super::Shape;
use crate::error::{Error, Result};

/// Largest dense tensor the library will materialize by default.
pub const DEFAULT_DENSE_GUARD: usize = 10_000_000;

/// Full multi-index array stored first-index-fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor {
    shape: Shape,
    values: Vec<f64>,
}

impl DenseTensor {
    pub fn new(shape: Shape, values: Vec<f64>) -> Result<Self> {
        if values.len() != shape.numel() {
            return Err(Error::ShapeMismatch {
                context: "dense tensor values",
                expected: vec![shape.numel()],
                found: vec![values.len()],
            });
        }
        Ok(DenseTensor { shape, values })
    }

    pub fn zeros(shape: Shape) -> Self {
        let values = vec![0.0; shape.numel()];
        DenseTensor { shape, values }
    }

    pub fn from_fn(shape: Shape, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let values = (0..shape.numel())
            .map(|lin| f(&shape.multi_index(lin)))
            .collect();
        DenseTensor { shape, values }
    }

    /// Entries drawn i.i.d. from the standard normal distribution.
    pub fn random<R: Rng + ?Sized>(shape: Shape, rng: &mut R) -> Self {
        let values = (0..shape.numel())
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        DenseTensor { shape, values }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, idx: &[usize]) -> Result<f64> {
        Ok(self.values[self.shape.linear_index(idx)?])
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `‖self − other‖_F`.
    pub fn distance(&self, other: &DenseTensor) -> Result<f64> {
        self.check_same_shape(other, "dense distance")?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }

    /// Relative distance `‖self − other‖_F / ‖other‖_F` (absolute when `other` is zero).
    pub fn relative_distance(&self, reference: &DenseTensor) -> Result<f64> {
        let dist = self.distance(reference)?;
        let norm = reference.norm();
        Ok(if norm > 0.0 { dist / norm } else { dist })
    }

    /// Same values under a different shape with identical element count.
    pub fn reshaped(&self, shape: Shape) -> Result<Self> {
        DenseTensor::new(shape, self.values.clone())
    }

    pub(crate) fn check_same_shape(&self, other: &DenseTensor, context: &'static str) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch {
                context,
                expected: self.shape.dims().to_vec(),
                found: other.shape.dims().to_vec(),
            });
        }
        Ok(())
    }
}
