//! Dissimilarity matrices: the only view of the data the map ever gets.
//!
//! Observations exist purely as indices `0..n` into a dense, symmetric,
//! nonnegative `n x n` table with a zero diagonal. Matrices are immutable once
//! built and can be shared freely between concurrent training runs.

mod io;
mod levenshtein;
mod points;
mod words;

pub use io::{load_matrix, save_matrix, write_matrix};
pub use levenshtein::{levenshtein, normalized_levenshtein};
pub use points::{build_from_vectors, generate_uniform_square, load_points, save_points, PointSet};
pub use words::{build_from_words, load_words};

use rayon::prelude::*;

use crate::error::{DsomError, Result};

/// Whether every entry of a matrix is an exact integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixKind {
    IntegerValued,
    RealValued,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix {
    n: usize,
    values: Vec<f64>,
    kind: MatrixKind,
}

impl DissimilarityMatrix {
    /// Validates a row-major `n x n` table.
    ///
    /// Checks run row by row so the first offending entry is the one reported:
    /// negative or non-finite values, then the diagonal, then symmetry.
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(DsomError::invalid(
                "dissimilarity matrix must have at least one observation",
            ));
        }
        if values.len() != n * n {
            return Err(DsomError::invalid(format!(
                "expected {} values for a {n}x{n} matrix, got {}",
                n * n,
                values.len()
            )));
        }
        for i in 0..n {
            for k in 0..n {
                let v = values[i * n + k];
                if !v.is_finite() || v < 0.0 {
                    return Err(DsomError::Negative { i, k, value: v });
                }
            }
        }
        for i in 0..n {
            let v = values[i * n + i];
            if v != 0.0 {
                return Err(DsomError::NonZeroDiagonal { i, value: v });
            }
        }
        for i in 0..n {
            for k in (i + 1)..n {
                let forward = values[i * n + k];
                let backward = values[k * n + i];
                if forward != backward {
                    return Err(DsomError::Asymmetric {
                        i,
                        k,
                        forward,
                        backward,
                    });
                }
            }
        }
        let kind = classify(&values);
        Ok(DissimilarityMatrix { n, values, kind })
    }

    /// Builds a matrix from a pair function evaluated once per unordered pair.
    ///
    /// Rows are filled in parallel; every entry is written exactly once, so the
    /// result does not depend on the thread count.
    pub fn from_pair_fn<F>(n: usize, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        if n == 0 {
            return Err(DsomError::invalid(
                "dissimilarity matrix must have at least one observation",
            ));
        }
        let upper: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| ((i + 1)..n).map(|k| f(i, k)).collect())
            .collect();
        let mut values = vec![0.0; n * n];
        for (i, row) in upper.iter().enumerate() {
            for (offset, &v) in row.iter().enumerate() {
                let k = i + 1 + offset;
                values[i * n + k] = v;
                values[k * n + i] = v;
            }
        }
        Self::from_values(n, values)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.values[i * self.n + k]
    }

    /// Row `i`, i.e. `d(x_i, x_k)` for every `k`.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Scales every entry by `scale` and rounds to the nearest integer.
    pub fn integerize(&self, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(DsomError::invalid(format!(
                "integerize scale must be positive, got {scale}"
            )));
        }
        let values = self.values.iter().map(|v| (v * scale).round()).collect();
        Self::from_values(self.n, values)
    }

    /// Sum of column `k`, i.e. `sum_i d(x_i, x_k)`.
    pub fn column_sum(&self, k: usize) -> f64 {
        self.row(k).iter().sum()
    }
}

fn classify(values: &[f64]) -> MatrixKind {
    if values.iter().all(|v| v.fract() == 0.0) {
        MatrixKind::IntegerValued
    } else {
        MatrixKind::RealValued
    }
}
