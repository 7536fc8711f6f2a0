//! Batch training of dissimilarity self-organizing maps.
//!
//! Each epoch assigns every observation to a model (affectation) and then
//! picks, for every model, the observation minimizing the neighborhood
//! weighted sum of dissimilarities (representation). The variants differ only
//! in how the representation sums are computed; with the exact back end they
//! produce identical prototypes and assignments.

pub mod affect;
pub mod arith;
pub mod partial;
pub mod repr;
mod train;

pub use affect::{affect_one, affectation_phase, AffectScratch, Affectation, UNASSIGNED};
pub use arith::{Arith, Dissimilarities, Exact, Float, Weights};
pub use partial::{Move, PartialSums};
pub use repr::{
    repr_brute_force, repr_early_stopping, repr_partial_sums, s_direct, s_from_partials,
    SearchWork, TiePolicy,
};
pub use train::{
    choose_update_strategy, train, train_with, DsomConfig, EpochObserver, EpochStats, EpochView,
    Prepared, SumsUpdate, TrainingResult, TrainingState, Variant, DEFAULT_EPOCHS, DEFAULT_RATIO,
    FLOAT_REFRESH_EPOCHS,
};

use rand::Rng;

use crate::dissimilarity::DissimilarityMatrix;
use crate::error::{DsomError, Result};

/// `models` distinct observation indices drawn uniformly without replacement.
pub fn init_prototypes<R: Rng + ?Sized>(
    n: usize,
    models: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if models > n {
        return Err(DsomError::TooManyModels {
            models,
            observations: n,
        });
    }
    Ok(rand::seq::index::sample(rng, n, models).into_vec())
}

/// Mean dissimilarity between each observation and its model's prototype.
pub fn quantization_error(
    assignments: &[usize],
    prototypes: &[usize],
    matrix: &DissimilarityMatrix,
) -> f64 {
    if assignments.is_empty() {
        return 0.0;
    }
    let total: f64 = assignments
        .iter()
        .enumerate()
        .map(|(i, &c)| matrix.get(i, prototypes[c]))
        .sum();
    total / assignments.len() as f64
}

pub(crate) fn quantization_error_of<A: Arith>(
    assignments: &[usize],
    prototypes: &[usize],
    data: &Dissimilarities<A>,
) -> f64 {
    let total: f64 = assignments
        .iter()
        .enumerate()
        .map(|(i, &c)| A::value_to_f64(data.get(i, prototypes[c])))
        .sum();
    total / assignments.len() as f64
}
