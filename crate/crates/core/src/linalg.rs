//! Dense and sparse vector kernels.

use std::ops::Deref;

use crate::error::{Error, Result};

/// A finite point in ℝ^d.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseVector(Vec<f64>);

impl DenseVector {
    /// Wraps `values`, rejecting NaN and infinite entries.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "entry {pos} is not finite ({})",
                values[pos]
            )));
        }
        Ok(DenseVector(values))
    }

    pub fn zeros(dim: usize) -> Self {
        DenseVector(vec![0.0; dim])
    }

    /// Caller guarantees every entry is finite.
    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        DenseVector(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm2_sq(&self) -> f64 {
        sq_norm(&self.0)
    }

    pub fn norm(&self) -> f64 {
        self.norm2_sq().sqrt()
    }

    /// `‖self − other‖²`.
    pub fn dist2_sq(&self, other: &DenseVector) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(dist_sq(&self.0, &other.0))
    }
}

impl Deref for DenseVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for DenseVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        DenseVector::new(values)
    }
}

/// Sparse vector with strictly increasing 0-based indices and no stored zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseVector {
    indices: Vec<u32>,
    values: Vec<f64>,
    dim: usize,
}

impl SparseVector {
    pub fn new(indices: Vec<u32>, values: Vec<f64>, dim: usize) -> Result<Self> {
        if indices.len() != values.len() {
            return Err(Error::invalid(format!(
                "{} indices but {} values",
                indices.len(),
                values.len()
            )));
        }
        if let Some(w) = indices.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "indices not strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        if let Some(&last) = indices.last() {
            if last as usize >= dim {
                return Err(Error::invalid(format!(
                    "index {last} out of range for dimension {dim}"
                )));
            }
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v == 0.0) {
            return Err(Error::invalid(format!(
                "stored value {v} must be finite and nonzero"
            )));
        }
        Ok(SparseVector {
            indices,
            values,
            dim,
        })
    }

    /// Keeps the nonzero entries of a dense vector.
    pub fn from_dense(dense: &[f64]) -> Result<Self> {
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for (i, &v) in dense.iter().enumerate() {
            if v != 0.0 {
                indices.push(i as u32);
                values.push(v);
            }
        }
        SparseVector::new(indices, values, dense.len())
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn norm2_sq(&self) -> f64 {
        sq_norm(&self.values)
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (&i, &v) in self.indices.iter().zip(&self.values) {
            out[i as usize] = v;
        }
        out
    }

    /// Same sparsity pattern, values multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let values: Vec<f64> = self.values.iter().map(|v| v * factor).collect();
        SparseVector::new(self.indices.clone(), values, self.dim)
    }

    /// Returns a copy living in a larger ambient dimension.
    pub fn with_dim(&self, dim: usize) -> Result<Self> {
        SparseVector::new(self.indices.clone(), self.values.clone(), dim)
    }

    /// `⟨self, dense⟩`; `dense` must have length `dim`.
    pub(crate) fn dot_slice(&self, dense: &[f64]) -> f64 {
        debug_assert_eq!(dense.len(), self.dim);
        self.indices
            .iter()
            .zip(&self.values)
            .map(|(&i, &v)| v * dense[i as usize])
            .sum()
    }

    /// `out += alpha * self`.
    pub(crate) fn axpy_into(&self, alpha: f64, out: &mut [f64]) {
        for (&i, &v) in self.indices.iter().zip(&self.values) {
            out[i as usize] += alpha * v;
        }
    }
}

/// Left operand of [`dot`].
pub trait DotOperand {
    fn operand_dim(&self) -> usize;
    fn dot_dense(&self, dense: &[f64]) -> f64;
}

impl DotOperand for DenseVector {
    fn operand_dim(&self) -> usize {
        self.dim()
    }

    fn dot_dense(&self, dense: &[f64]) -> f64 {
        dot_slices(&self.0, dense)
    }
}

impl DotOperand for SparseVector {
    fn operand_dim(&self) -> usize {
        self.dim
    }

    fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.dot_slice(dense)
    }
}

/// Inner product of a dense or sparse vector with a dense vector.
pub fn dot<A: DotOperand + ?Sized>(a: &A, b: &DenseVector) -> Result<f64> {
    check_dims(a.operand_dim(), b.dim())?;
    Ok(a.dot_dense(b))
}

/// `Σ aᵢ²`.
pub fn norm2_sq(a: &DenseVector) -> f64 {
    a.norm2_sq()
}

fn check_dims(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::invalid(format!(
            "dimension mismatch: {left} vs {right}"
        )));
    }
    Ok(())
}

// Slice kernels used on the hot paths. Lengths are checked by callers.

pub(crate) fn dot_slices(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn sq_norm(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum()
}

pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `y += alpha * x`.
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub(crate) fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|v| v.is_finite())
}
