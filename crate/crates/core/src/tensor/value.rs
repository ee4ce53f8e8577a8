use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variance {
    Co,
    Contra,
}

/// Multi-index array of scalars at a point, row-major over `dim^rank`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorValue {
    dim: usize,
    variance: Vec<Variance>,
    data: Vec<Scalar>,
}

impl TensorValue {
    pub fn zeros(dim: usize, variance: Vec<Variance>) -> TensorValue {
        let len = dim.pow(variance.len() as u32);
        TensorValue {
            dim,
            variance,
            data: vec![Scalar::zero(); len],
        }
    }

    pub fn covariant(dim: usize, rank: usize) -> TensorValue {
        TensorValue::zeros(dim, vec![Variance::Co; rank])
    }

    pub fn from_data(dim: usize, variance: Vec<Variance>, data: Vec<Scalar>) -> Result<TensorValue> {
        if data.len() != dim.pow(variance.len() as u32) {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a rank-{} tensor in dimension {dim}",
                data.len(),
                variance.len()
            )));
        }
        Ok(TensorValue { dim, variance, data })
    }

    pub fn from_fn(dim: usize, variance: Vec<Variance>, mut f: impl FnMut(&[usize]) -> Scalar) -> TensorValue {
        let mut t = TensorValue::zeros(dim, variance);
        let mut idx = vec![0; t.rank()];
        for k in 0..t.data.len() {
            t.unflatten(k, &mut idx);
            t.data[k] = f(&idx);
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    pub fn data(&self) -> &[Scalar] {
        &self.data
    }

    pub fn is_covariant(&self) -> bool {
        self.variance.iter().all(|v| *v == Variance::Co)
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    fn unflatten(&self, mut k: usize, idx: &mut [usize]) {
        for slot in idx.iter_mut().rev() {
            *slot = k % self.dim;
            k /= self.dim;
        }
    }

    pub fn get(&self, idx: &[usize]) -> &Scalar {
        &self.data[self.flat_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: Scalar) {
        let k = self.flat_index(idx);
        self.data[k] = value;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|s| s.to_f64().abs()).fold(0.0, f64::max)
    }

    /// Largest magnitude estimate over the entries.
    pub fn max_mag(&self) -> f64 {
        self.data.iter().map(Scalar::mag).fold(0.0, f64::max)
    }

    pub fn is_exact(&self) -> bool {
        self.data.iter().all(Scalar::is_exact)
    }

    pub fn is_identically_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    /// True when every entry is zero: identically for exact entries,
    /// otherwise within `tol` times the entry's magnitude estimate (or
    /// `tol * scale` for a nonzero `scale`).
    pub fn vanishes(&self, tol: f64, scale: f64) -> bool {
        self.data.iter().all(|s| match s {
            Scalar::Exact(r) => num_traits::Zero::is_zero(r),
            Scalar::Float { value, mag } => value.abs() <= tol * mag.max(scale),
        })
    }

    pub fn sub(&self, other: &TensorValue) -> Result<TensorValue> {
        if self.dim != other.dim || self.variance != other.variance {
            return Err(Error::ShapeMismatch("tensors of different shape".into()));
        }
        Ok(TensorValue {
            dim: self.dim,
            variance: self.variance.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// Contracts slot `slot` with the matrix `m` (`m[i][j] T_{..j..}`), which
    /// raises or lowers the index when `m` is the (inverse) metric.
    pub fn transform_slot(&self, slot: usize, m: &[Vec<Scalar>], variance: Variance) -> TensorValue {
        let mut v = self.variance.clone();
        v[slot] = variance;
        let n = self.dim;
        TensorValue::from_fn(n, v, |idx| {
            let mut j = idx.to_vec();
            (0..n)
                .map(|s| {
                    j[slot] = s;
                    &m[idx[slot]][s] * self.get(&j)
                })
                .sum()
        })
    }
}
