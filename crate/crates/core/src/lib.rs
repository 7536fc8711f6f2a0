//! Dissimilarity self-organizing maps (median SOM) with exact fast training.
//!
//! Data are known only through a [`DissimilarityMatrix`]. Models live on a
//! hexagonal or rectangular [`PriorGraph`] and take observations as
//! prototypes. Five training [`Variant`]s are provided, from the brute-force
//! search to the partial-sum, early-stopping and memory-based schemes; on
//! integer-valued matrices they all return the same prototypes and
//! assignments for a given seed.
//!
//! ```
//! use dsom::{build_from_words, train, DsomConfig, KernelSchedule, PriorGraph, Variant};
//!
//! let words = ["love", "lover", "loved", "glove", "a", "b", "about", "above"];
//! let matrix = build_from_words(&words, false).unwrap();
//! let graph = PriorGraph::hex_grid(2).unwrap();
//! let schedule = KernelSchedule::for_graph(&graph, 20).unwrap();
//! let result = train(&DsomConfig::new(Variant::Fast, schedule, 1), &matrix, &graph).unwrap();
//! assert_eq!(result.prototypes.len(), 4);
//! ```

pub mod bench;
pub mod cli;
pub mod dissimilarity;
pub mod error;
pub mod som;
pub mod topology;

pub use dissimilarity::{
    build_from_vectors, build_from_words, generate_uniform_square, levenshtein, load_matrix,
    normalized_levenshtein, save_matrix, DissimilarityMatrix, MatrixKind, PointSet,
};
pub use error::{DsomError, Result};
pub use som::{quantization_error, train, DsomConfig, TrainingResult, Variant};
pub use topology::{KernelSchedule, Layout, NeighborhoodTable, PriorGraph};
