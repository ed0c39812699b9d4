use crate::error::{Error, Result};

/// Mode sizes `n_1 … n_d` of a tensor. Linear indices are first-index-fastest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Shape(Vec<usize>);

impl Shape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidShape("a shape needs at least one mode".into()));
        }
        if let Some(k) = dims.iter().position(|&n| n == 0) {
            return Err(Error::InvalidShape(format!("mode {} has size 0", k + 1)));
        }
        Ok(Shape(dims))
    }

    pub fn uniform(d: usize, n: usize) -> Result<Self> {
        Shape::new(vec![n; d])
    }

    pub fn dims(&self) -> &[usize] {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn numel(&self) -> usize {
        self.0.iter().product()
    }

    /// Checked element count, `None` on overflow.
    pub fn checked_numel(&self) -> Option<usize> {
        self.0.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n))
    }

    pub fn linear_index(&self, idx: &[usize]) -> Result<usize> {
        self.check_index(idx)?;
        let mut lin = 0;
        let mut stride = 1;
        for (&i, &n) in idx.iter().zip(&self.0) {
            lin += i * stride;
            stride *= n;
        }
        Ok(lin)
    }

    pub fn multi_index(&self, mut lin: usize) -> Vec<usize> {
        self.0
            .iter()
            .map(|&n| {
                let i = lin % n;
                lin /= n;
                i
            })
            .collect()
    }

    pub fn check_index(&self, idx: &[usize]) -> Result<()> {
        if idx.len() != self.0.len() || idx.iter().zip(&self.0).any(|(&i, &n)| i >= n) {
            return Err(Error::IndexOutOfRange {
                index: idx.to_vec(),
                shape: self.0.clone(),
            });
        }
        Ok(())
    }
}

impl std::fmt::Display for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|n| n.to_string()).collect();
        write!(f, "({})", parts.join("×"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_zero_modes() {
        assert!(Shape::new(vec![]).is_err());
        assert!(Shape::new(vec![2, 0, 3]).is_err());
    }

    #[test]
    fn first_index_fastest() {
        let s = Shape::new(vec![2, 3, 4]).unwrap();
        assert_eq!(s.linear_index(&[1, 0, 0]).unwrap(), 1);
        assert_eq!(s.linear_index(&[0, 1, 0]).unwrap(), 2);
        assert_eq!(s.linear_index(&[0, 0, 1]).unwrap(), 6);
        for lin in 0..s.numel() {
            assert_eq!(s.linear_index(&s.multi_index(lin)).unwrap(), lin);
        }
        assert!(s.linear_index(&[2, 0, 0]).is_err());
    }
}
