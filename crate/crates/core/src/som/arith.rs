//! Numeric back ends for the training engine.
//!
//! Every training variant computes the same weighted sums
//! `S(j,k) = sum_i h(c(i),j) d(x_i,x_k)` along different routes (directly, or
//! through per-cluster partial sums, or in a different order with early exit).
//! With floating point those routes round differently. [`Exact`] removes the
//! rounding altogether for integer-valued matrices: dissimilarities are `u64`,
//! kernel weights are fixed-point `u64` with 62 fractional bits, and products
//! accumulate in `u128`. Every route then yields the same integer, so the
//! argmin (and hence the whole training trajectory) is identical across
//! variants. [`Float`] is the plain `f64` back end for real-valued data.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Sub, SubAssign};

use crate::dissimilarity::{DissimilarityMatrix, MatrixKind};
use crate::error::{DsomError, Result};
use crate::topology::NeighborhoodTable;

pub trait Arith: Copy + Send + Sync + Debug + 'static {
    /// Dissimilarities and per-cluster partial sums.
    type Value: Copy
        + PartialOrd
        + Default
        + Debug
        + Send
        + Sync
        + Add<Output = Self::Value>
        + Sub<Output = Self::Value>
        + AddAssign
        + SubAssign;
    /// Neighborhood weights.
    type Weight: Copy + PartialEq + Default + Debug + Send + Sync;
    /// Weighted sums `S(j,k)`.
    type Score: Copy + PartialOrd + Default + Debug + AddAssign;

    const EXACT: bool;
    const NAME: &'static str;

    fn convert(matrix: &DissimilarityMatrix) -> Result<Vec<Self::Value>>;
    fn weight(h: f64) -> Self::Weight;
    fn term(w: Self::Weight, v: Self::Value) -> Self::Score;
    fn value_to_f64(v: Self::Value) -> f64;
    fn score_to_f64(s: Self::Score) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exact;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Float;

/// Fixed-point scale of [`Exact`] weights; `h = 1` maps to `2^62`.
pub const EXACT_WEIGHT_ONE: u64 = 1 << 62;

/// Largest dissimilarity accepted by [`Exact`]. With `N < 2^31` this keeps
/// partial sums below `2^63` and weighted sums below `2^125`.
pub const EXACT_MAX_VALUE: f64 = (u32::MAX) as f64;

impl Arith for Exact {
    type Value = u64;
    type Weight = u64;
    type Score = u128;

    const EXACT: bool = true;
    const NAME: &'static str = "exact";

    fn convert(matrix: &DissimilarityMatrix) -> Result<Vec<u64>> {
        if matrix.kind() != MatrixKind::IntegerValued {
            return Err(DsomError::NotExact("matrix has non-integer entries".into()));
        }
        if matrix.n() >= 1 << 31 {
            return Err(DsomError::NotExact("too many observations".into()));
        }
        matrix
            .values()
            .iter()
            .map(|&v| {
                if v <= EXACT_MAX_VALUE {
                    Ok(v as u64)
                } else {
                    Err(DsomError::NotExact(format!(
                        "entry {v} exceeds {EXACT_MAX_VALUE}"
                    )))
                }
            })
            .collect()
    }

    #[inline]
    fn weight(h: f64) -> u64 {
        debug_assert!((0.0..=1.0).contains(&h));
        (h * EXACT_WEIGHT_ONE as f64).round() as u64
    }

    #[inline(always)]
    fn term(w: u64, v: u64) -> u128 {
        w as u128 * v as u128
    }

    fn value_to_f64(v: u64) -> f64 {
        v as f64
    }

    fn score_to_f64(s: u128) -> f64 {
        s as f64 / EXACT_WEIGHT_ONE as f64
    }
}

impl Arith for Float {
    type Value = f64;
    type Weight = f64;
    type Score = f64;

    const EXACT: bool = false;
    const NAME: &'static str = "float";

    fn convert(matrix: &DissimilarityMatrix) -> Result<Vec<f64>> {
        Ok(matrix.values().to_vec())
    }

    #[inline]
    fn weight(h: f64) -> f64 {
        h
    }

    #[inline(always)]
    fn term(w: f64, v: f64) -> f64 {
        w * v
    }

    fn value_to_f64(v: f64) -> f64 {
        v
    }

    fn score_to_f64(s: f64) -> f64 {
        s
    }
}

/// A dissimilarity matrix converted to a back end's value type.
#[derive(Debug, Clone)]
pub struct Dissimilarities<A: Arith> {
    n: usize,
    values: Vec<A::Value>,
}

impl<A: Arith> Dissimilarities<A> {
    pub fn new(matrix: &DissimilarityMatrix) -> Result<Self> {
        Ok(Dissimilarities {
            n: matrix.n(),
            values: A::convert(matrix)?,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize) -> A::Value {
        self.values[i * self.n + k]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[A::Value] {
        &self.values[i * self.n..(i + 1) * self.n]
    }
}

/// Neighborhood weights for one epoch, stored per target model so that
/// `column(j)[u] = h(u, j)` is contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights<A: Arith> {
    models: usize,
    by_target: Vec<A::Weight>,
}

impl<A: Arith> Weights<A> {
    pub fn new(table: &NeighborhoodTable) -> Self {
        let models = table.models();
        let mut by_target = Vec::with_capacity(models * models);
        for j in 0..models {
            for u in 0..models {
                by_target.push(A::weight(table.get(u, j)));
            }
        }
        Weights { models, by_target }
    }

    pub fn models(&self) -> usize {
        self.models
    }

    #[inline]
    pub fn get(&self, u: usize, j: usize) -> A::Weight {
        self.by_target[j * self.models + u]
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[A::Weight] {
        &self.by_target[j * self.models..(j + 1) * self.models]
    }
}
