use std::io::Write;
use std::sync::{Mutex, TryLockError};
use std::time::Instant;

use crate::dissimilarity::{build_from_vectors, generate_uniform_square, DissimilarityMatrix};
use crate::error::{DsomError, Result};
use crate::som::{DsomConfig, Prepared, TrainingResult, Variant};
use crate::topology::{KernelSchedule, Layout, PriorGraph};

use super::equivalence::equivalence_check;

pub const DEFAULT_REPEATS: usize = 10;
/// Runs shorter than this are repeated in a batch and the batch time divided.
pub const MIN_BATCH_SECONDS: f64 = 0.05;
/// Scale applied to unit-square squared distances before rounding.
pub const BENCH_SCALE: f64 = 1e8;
pub const TIMING_CSV_HEADER: &str = "variant,N,M,L,seed,repeats,wall_seconds,relative_sd";

static TIMING_LOCK: Mutex<()> = Mutex::new(());

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TimingRecord {
    pub variant: Variant,
    pub n: usize,
    pub m: usize,
    pub epochs: usize,
    pub seed: u64,
    pub repeats: usize,
    /// Mean wall time of one training run.
    pub wall_seconds: f64,
    /// Sample standard deviation over the repeats divided by the mean.
    pub relative_sd: f64,
}

impl TimingRecord {
    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.variant,
            self.n,
            self.m,
            self.epochs,
            self.seed,
            self.repeats,
            self.wall_seconds,
            self.relative_sd
        )
    }
}

/// Times `repeats` training runs after one untimed warm-up.
///
/// Every run must give the same result as the warm-up, otherwise
/// [`DsomError::NonDeterministic`] is returned. Only one timing may run at a
/// time in a process; a concurrent call fails with
/// [`DsomError::BenchmarkBusy`].
pub fn time_variant(
    config: &DsomConfig,
    data: &Prepared,
    graph: &PriorGraph,
    repeats: usize,
) -> Result<TimingRecord> {
    let mut records = time_interleaved(&[(config, data, graph)], repeats)?;
    Ok(records.remove(0))
}

/// Like [`time_variant`] for several configurations at once. After one
/// warm-up of each, the timed repeats go round-robin over the
/// configurations, so slow drift in machine speed is shared by all of them
/// instead of biasing whichever ran during a slow spell.
pub fn time_interleaved(
    runs: &[(&DsomConfig, &Prepared, &PriorGraph)],
    repeats: usize,
) -> Result<Vec<TimingRecord>> {
    if repeats == 0 {
        return Err(DsomError::invalid("repeats must be at least 1"));
    }
    let _guard = match TIMING_LOCK.try_lock() {
        Ok(g) => g,
        Err(TryLockError::Poisoned(p)) => p.into_inner(),
        Err(TryLockError::WouldBlock) => return Err(DsomError::BenchmarkBusy),
    };

    let mut references = Vec::with_capacity(runs.len());
    let mut batches = Vec::with_capacity(runs.len());
    for &(config, data, graph) in runs {
        let start = Instant::now();
        references.push(data.train(config, graph)?);
        let warm_up = start.elapsed().as_secs_f64();
        batches.push(if warm_up >= MIN_BATCH_SECONDS {
            1
        } else {
            ((MIN_BATCH_SECONDS / warm_up.max(1e-6)).ceil() as usize).max(1)
        });
    }

    let mut samples = vec![Vec::with_capacity(repeats); runs.len()];
    for repeat in 0..repeats {
        for (idx, &(config, data, graph)) in runs.iter().enumerate() {
            let mut last: Option<TrainingResult> = None;
            let start = Instant::now();
            for _ in 0..batches[idx] {
                last = Some(data.train(config, graph)?);
            }
            samples[idx].push(start.elapsed().as_secs_f64() / batches[idx] as f64);
            if last.as_ref() != Some(&references[idx]) {
                return Err(DsomError::NonDeterministic { repeat });
            }
        }
    }

    Ok(runs
        .iter()
        .zip(&samples)
        .map(|(&(config, data, graph), s)| {
            let mean = s.iter().sum::<f64>() / repeats as f64;
            let relative_sd = if repeats > 1 && mean > 0.0 {
                let var = s.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (repeats - 1) as f64;
                var.sqrt() / mean
            } else {
                0.0
            };
            TimingRecord {
                variant: config.variant,
                n: data.n(),
                m: graph.models(),
                epochs: config.epochs(),
                seed: config.seed,
                repeats,
                wall_seconds: mean.max(f64::MIN_POSITIVE),
                relative_sd,
            }
        })
        .collect())
}

pub fn write_timing_csv<W: Write>(records: &[TimingRecord], out: &mut W) -> std::io::Result<()> {
    writeln!(out, "{TIMING_CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.csv_line())?;
    }
    Ok(())
}

/// Integer-valued benchmark data: `n` uniform points of the unit square,
/// squared Euclidean distances scaled by [`BENCH_SCALE`] and rounded.
pub fn benchmark_matrix(n: usize, seed: u64) -> Result<DissimilarityMatrix> {
    build_from_vectors(&generate_uniform_square(n, seed)?)?.integerize(BENCH_SCALE)
}

/// One benchmark configuration: `n` observations, a hexagonal map of side `side`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchSize {
    pub n: usize,
    pub side: usize,
}

impl BenchSize {
    pub fn models(&self) -> usize {
        self.side * self.side
    }
}

/// Parses `NxM` where `M` is a perfect square not larger than `N`.
pub fn parse_size(s: &str) -> Result<BenchSize> {
    let (n, m) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| DsomError::invalid(format!("size {s:?} is not of the form NxM")))?;
    let n: usize = n
        .trim()
        .parse()
        .map_err(|_| DsomError::invalid(format!("bad N in size {s:?}")))?;
    let m: usize = m
        .trim()
        .parse()
        .map_err(|_| DsomError::invalid(format!("bad M in size {s:?}")))?;
    let side = (m as f64).sqrt().round() as usize;
    if m == 0 || side * side != m {
        return Err(DsomError::invalid(format!(
            "M = {m} is not a square map size"
        )));
    }
    if m > n {
        return Err(DsomError::TooManyModels {
            models: m,
            observations: n,
        });
    }
    Ok(BenchSize { n, side })
}

/// Times every variant on every size, on hexagonal maps with the default
/// kernel schedule, repeats interleaved over all configurations. Before any
/// timing, all requested variants are checked for identical results on
/// `seed` at every size; any divergence aborts the run.
pub fn run_grid(
    sizes: &[BenchSize],
    variants: &[Variant],
    epochs: usize,
    seed: u64,
    repeats: usize,
) -> Result<Vec<TimingRecord>> {
    if variants.is_empty() {
        return Err(DsomError::invalid("no variant to time"));
    }
    for s in sizes {
        if s.models() > s.n {
            return Err(DsomError::TooManyModels {
                models: s.models(),
                observations: s.n,
            });
        }
    }
    let mut prepared = Vec::with_capacity(sizes.len());
    for size in sizes {
        let matrix = benchmark_matrix(size.n, seed)?;
        let graph = PriorGraph::lattice(Layout::Hex, size.side)?;
        let schedule = KernelSchedule::for_graph(&graph, epochs)?;
        let report = equivalence_check(&matrix, &graph, &schedule, &[seed], variants, false)?;
        if let Some(d) = report.divergences.iter().find(|d| !d.inconclusive) {
            return Err(DsomError::Divergence(format!(
                "N={} M={}: {}",
                size.n,
                size.models(),
                d.describe()
            )));
        }
        let configs: Vec<DsomConfig> = variants
            .iter()
            .map(|&v| DsomConfig::new(v, schedule, seed))
            .collect();
        prepared.push((Prepared::new(&matrix)?, graph, configs));
    }
    let runs: Vec<_> = prepared
        .iter()
        .flat_map(|(data, graph, configs)| configs.iter().map(move |c| (c, data, graph)))
        .collect();
    let records = time_interleaved(&runs, repeats)?;
    Ok(records)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    #[test]
    fn sizes_parse() {
        assert_eq!(parse_size("500x49").unwrap(), BenchSize { n: 500, side: 7 });
        assert!(parse_size("500x50").is_err());
        assert!(parse_size("10x16").is_err());
        assert!(parse_size("500").is_err());
        assert!(parse_size("ax4").is_err());
    }

    #[test]
    fn benchmark_matrix_is_integer() {
        let m = benchmark_matrix(20, 1).unwrap();
        assert_eq!(m.kind(), crate::dissimilarity::MatrixKind::IntegerValued);
        assert!(m.values().iter().all(|&v| v <= 2e8));
    }

    #[test]
    fn tiny_timing_is_recorded_and_deterministic() {
        let m = benchmark_matrix(50, 3).unwrap();
        let g = PriorGraph::hex_grid(3).unwrap();
        let cfg = DsomConfig::new(Variant::Fast, KernelSchedule::for_graph(&g, 10).unwrap(), 3);
        let data = Prepared::new(&m).unwrap();
        let r = time_variant(&cfg, &data, &g, 3).unwrap();
        assert!(r.wall_seconds > 0.0);
        assert!(r.relative_sd.is_finite() && r.relative_sd >= 0.0);
        assert_eq!((r.n, r.m, r.epochs, r.repeats), (50, 9, 10, 3));
        assert!(time_variant(&cfg, &data, &g, 0).is_err());
        assert_eq!(data.train(&cfg, &g).unwrap(), data.train(&cfg, &g).unwrap());
    }

    #[test]
    fn interleaved_records_follow_input_order() {
        let g2 = PriorGraph::hex_grid(2).unwrap();
        let g3 = PriorGraph::hex_grid(3).unwrap();
        let small = Prepared::new(&benchmark_matrix(30, 1).unwrap()).unwrap();
        let large = Prepared::new(&benchmark_matrix(60, 1).unwrap()).unwrap();
        let c2 = DsomConfig::new(
            Variant::Brute,
            KernelSchedule::for_graph(&g2, 5).unwrap(),
            1,
        );
        let c3 = DsomConfig::new(
            Variant::Memory,
            KernelSchedule::for_graph(&g3, 5).unwrap(),
            1,
        );
        let r = time_interleaved(&[(&c2, &small, &g2), (&c3, &large, &g3)], 2).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!((r[0].variant, r[0].n, r[0].m), (Variant::Brute, 30, 4));
        assert_eq!((r[1].variant, r[1].n, r[1].m), (Variant::Memory, 60, 9));
        assert!(r.iter().all(|x| x.wall_seconds > 0.0 && x.repeats == 2));
        assert!(time_interleaved(&[], 1).unwrap().is_empty());
    }

    #[test]
    fn csv_has_exact_header() {
        let r = TimingRecord {
            variant: Variant::Partial,
            n: 100,
            m: 16,
            epochs: 5,
            seed: 2,
            repeats: 1,
            wall_seconds: 0.5,
            relative_sd: 0.0,
        };
        let mut out = Vec::new();
        write_timing_csv(&[r], &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "variant,N,M,L,seed,repeats,wall_seconds,relative_sd\npartial,100,16,5,2,1,0.5,0\n"
        );
    }
}
