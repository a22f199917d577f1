//! Product attribute matrix shared by the feature-parameterized models.

use crate::error::{ModelError, Result};

/// Attribute vectors for the states 0..n, one row per state. Row 0 holds the
/// no-purchase attributes (all zeros unless the caller supplies something else).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    dim: usize,
    n_states: usize,
    rows: Vec<f64>, // n_states x dim, row-major
}

impl FeatureMatrix {
    /// Builds a matrix from per-state rows; all rows must share the same length
    /// and row 0 (the no-purchase state) must be present.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(ModelError::InvalidInput("feature matrix has no rows".into()));
        }
        let dim = rows[0].len();
        let n_states = rows.len();
        let mut flat = Vec::with_capacity(n_states * dim);
        for (j, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(ModelError::InvalidInput(format!(
                    "feature row {j} has length {} but expected {dim}",
                    row.len()
                )));
            }
            flat.extend_from_slice(row);
        }
        Ok(Self { dim, n_states, rows: flat })
    }

    /// Number of attribute dimensions d.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of states n+1 (products plus the no-purchase state).
    pub fn num_states(&self) -> usize {
        self.n_states
    }

    /// Product count n.
    pub fn num_products(&self) -> usize {
        self.n_states - 1
    }

    pub fn row(&self, state: usize) -> &[f64] {
        &self.rows[state * self.dim..(state + 1) * self.dim]
    }
}
