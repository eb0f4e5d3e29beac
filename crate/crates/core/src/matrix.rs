//! Column-major matrix of pre-shape vectors.

use crate::error::{Error, Result};
use crate::preshape::PreShapeVector;

/// A 2d x m matrix whose columns are pre-shape vectors. Stored column-major
/// so per-sample slices are contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct PreShapeMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl PreShapeMatrix {
    pub fn from_columns(cols: &[PreShapeVector]) -> Result<Self> {
        let dim = cols.first().map(|c| c.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(dim * cols.len());
        for c in cols {
            if c.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: c.len(),
                });
            }
            data.extend_from_slice(c.coords());
        }
        Ok(Self { dim, data })
    }

    /// An empty matrix with a fixed row count.
    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            data: Vec::new(),
        }
    }

    pub(crate) fn from_raw(dim: usize, data: Vec<f64>) -> Self {
        debug_assert!(dim == 0 || data.len().is_multiple_of(dim));
        Self { dim, data }
    }

    /// Ambient dimension 2d (rows).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of columns m.
    pub fn ncols(&self) -> usize {
        self.data.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.dim..(j + 1) * self.dim]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim.max(1))
    }

    pub fn col_vector(&self, j: usize) -> PreShapeVector {
        PreShapeVector::from_raw_coords(self.col(j).to_vec())
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}
