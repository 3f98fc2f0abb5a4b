//! Dense real tensors in row-major layout.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Largest number of entries a dense tensor may hold.
pub const MAX_ENTRIES: usize = 1 << 21;

/// `dim^order`, or a capacity error.
pub fn checked_size(order: usize, dim: usize) -> Result<usize> {
    let mut size: usize = 1;
    for _ in 0..order {
        size = size
            .checked_mul(dim)
            .filter(|&s| s <= MAX_ENTRIES)
            .ok_or_else(|| Error::Capacity(format!("{dim}^{order} entries exceeds {MAX_ENTRIES}")))?;
    }
    Ok(size)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor {
    order: usize,
    dim: usize,
    data: Vec<f64>,
}

impl DenseTensor {
    pub fn new(order: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        let size = checked_size(order, dim)?;
        if data.len() != size {
            return Err(Error::Arity(format!(
                "{} entries for a tensor of order {order} and dimension {dim}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::Precondition(format!("entry {i} is not finite")));
        }
        Ok(DenseTensor { order, dim, data })
    }

    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        let size = checked_size(order, dim)?;
        Ok(DenseTensor {
            order,
            dim,
            data: vec![0.0; size],
        })
    }

    pub fn scalar(value: f64) -> Self {
        DenseTensor {
            order: 0,
            dim: 1,
            data: vec![value],
        }
    }

    /// Fill from a function of the multi-index.
    pub fn from_fn(order: usize, dim: usize, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let mut t = DenseTensor::zeros(order, dim)?;
        let mut idx = vec![0; order];
        for slot in t.data.iter_mut() {
            *slot = f(&idx);
            for k in (0..order).rev() {
                idx[k] += 1;
                if idx[k] < dim {
                    break;
                }
                idx[k] = 0;
            }
        }
        Ok(t)
    }

    /// `N x N` matrix from rows.
    pub fn matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Arity("matrix rows must form a square".into()));
        }
        DenseTensor::new(2, n, rows.concat())
    }

    pub fn identity_matrix(n: usize) -> Self {
        DenseTensor::from_fn(2, n, |i| f64::from(u8::from(i[0] == i[1]))).expect("small identity")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: f64) {
        let o = self.offset(idx);
        self.data[o] = value;
    }

    /// Value of an order-0 tensor.
    pub fn as_scalar(&self) -> Option<f64> {
        (self.order == 0).then(|| self.data[0])
    }

    /// `a * self + b * other`.
    pub fn linear_combination(&self, a: f64, other: &DenseTensor, b: f64) -> Result<Self> {
        if (self.order, self.dim) != (other.order, other.dim) {
            return Err(Error::Arity("linear combination of tensors of different shapes".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(x, y)| a * x + b * y).collect();
        DenseTensor::new(self.order, self.dim, data)
    }

    pub fn max_abs_diff(&self, other: &DenseTensor) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    /// Matrix product for order-2 tensors.
    pub fn matmul(&self, other: &DenseTensor) -> Result<Self> {
        if self.order != 2 || other.order != 2 || self.dim != other.dim {
            return Err(Error::Arity("matmul needs two N x N matrices".into()));
        }
        let n = self.dim;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                for j in 0..n {
                    out[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        DenseTensor::new(2, n, out)
    }

    pub fn transpose(&self) -> Result<Self> {
        if self.order != 2 {
            return Err(Error::Arity("transpose needs a matrix".into()));
        }
        DenseTensor::from_fn(2, self.dim, |i| self.get(&[i[1], i[0]]))
    }
}

/// The pair-delta tensor `1_p`: legs (1,2), (3,4), ... carry equal indices.
pub fn identity_tensor(p: usize, n: usize) -> Result<DenseTensor> {
    if p == 0 || p % 2 == 1 {
        return Err(Error::Precondition(format!("1_p needs an even order, got {p}")));
    }
    DenseTensor::from_fn(p, n, |i| {
        f64::from(u8::from(i.chunks(2).all(|c| c[0] == c[1])))
    })
}

/// `(T . U^p)_j = sum_i T_i prod_k U_{j_k i_k}`.
pub fn orbit_action(t: &DenseTensor, u: &DenseTensor) -> Result<DenseTensor> {
    if u.order() != 2 || u.dim() != t.dim() {
        return Err(Error::Arity(format!(
            "orbit action needs an {0} x {0} matrix, got order {1} dimension {2}",
            t.dim(),
            u.order(),
            u.dim()
        )));
    }
    let n = t.dim();
    if t.order() == 0 {
        return Ok(t.clone());
    }
    let rows = t.data.len() / n;
    let um = DMatrix::from_row_slice(n, n, &u.data);
    // Each pass transforms the last index and rotates it to the front, so
    // after `order` passes every leg is transformed and the layout restored.
    let mut current = t.data.clone();
    for _ in 0..t.order() {
        let x = DMatrix::from_vec(n, rows, current);
        current = (&um * x).transpose().as_slice().to_vec();
    }
    DenseTensor::new(t.order(), n, current)
}
