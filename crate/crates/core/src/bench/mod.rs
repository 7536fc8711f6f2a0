//! Benchmarking: timing of training variants, cross-variant equivalence
//! checks and the two cost models fitted to measured times.

mod equivalence;
mod fit;
mod timing;

pub use equivalence::{equivalence_check, Divergence, EquivalenceReport, NEAR_TIE_RELATIVE};
pub use fit::{fit_loglog, fit_quadratic, nmse, CostModel, CostModelFit};
pub use timing::{
    benchmark_matrix, parse_size, run_grid, time_interleaved, time_variant, write_timing_csv,
    BenchSize, TimingRecord, BENCH_SCALE, DEFAULT_REPEATS, MIN_BATCH_SECONDS, TIMING_CSV_HEADER,
};
