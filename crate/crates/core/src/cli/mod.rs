//! Command-line front end. Every command writes a `manifest.json` (or
//! `<file>.manifest.json` next to a single output file) from which
//! `dsom replay` re-executes it.
//!
//! Exit codes: 0 success, 1 variants diverged, 2 bad input or other error.

mod commands;
mod manifest;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{execute, Outcome};
pub use manifest::{
    BenchParams, DistParams, GenParams, InputKind, MapParams, Run, RunManifest, TrainParams,
    VerifyParams, TOOL_VERSION,
};

use crate::error::{DsomError, Result};
use crate::som::{Variant, DEFAULT_EPOCHS, DEFAULT_RATIO};
use crate::topology::{KernelSchedule, Layout, PriorGraph, DEFAULT_SIGMA_FINAL};

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_DIVERGENCE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

const RATIO_RANGE: (f64, f64) = (1.0, 16.0);

#[derive(Debug, Parser)]
#[command(name = "dsom", version, about = "Dissimilarity self-organizing maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw points uniformly in the unit square and write them as CSV.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a dissimilarity matrix from points or words.
    Dist {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "vectors")]
        kind: InputKind,
        /// Divide edit distances by the longer word length.
        #[arg(long)]
        normalized: bool,
        /// Multiply by this scale and round to integers.
        #[arg(long, value_name = "SCALE")]
        integerize: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a map on a matrix file.
    Train {
        matrix: PathBuf,
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value = "fast")]
        variant: Variant,
        /// Block update of the partial sums when at least N/ratio observations switch.
        #[arg(long, default_value_t = DEFAULT_RATIO)]
        ratio: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Check that training variants give identical results.
    Verify {
        matrix: PathBuf,
        #[command(flatten)]
        map: MapArgs,
        /// Number of seeds, starting at --seed.
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "brute,partial,earlystop,memory,fast"
        )]
        variants: Vec<Variant>,
        #[arg(long, hide = true)]
        inject_tie_fault: bool,
        /// Output directory for the report and manifest.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time variants on integerized unit-square data and fit cost models.
    Bench {
        /// Comma-separated NxM sizes, M a square number.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<String>,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "brute,partial,earlystop,memory,fast"
        )]
        variants: Vec<Variant>,
        #[arg(long, default_value_t = DEFAULT_EPOCHS)]
        epochs: usize,
        #[arg(long, default_value_t = crate::bench::DEFAULT_REPEATS)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-execute a run from its manifest.
    Replay {
        manifest: PathBuf,
        /// Write outputs here instead of the recorded location.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct MapArgs {
    #[arg(long, default_value = "hex")]
    grid: Layout,
    /// Map side; the map has m*m models.
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = DEFAULT_EPOCHS)]
    epochs: usize,
    /// Defaults to half the map diameter.
    #[arg(long)]
    sigma_initial: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SIGMA_FINAL)]
    sigma_final: f64,
}

impl MapArgs {
    fn resolve(self) -> Result<MapParams> {
        let graph = PriorGraph::lattice(self.grid, self.m)?;
        let sigma_initial = self
            .sigma_initial
            .unwrap_or_else(|| (graph.diameter() as f64 / 2.0).max(self.sigma_final));
        KernelSchedule::new(self.epochs, sigma_initial, self.sigma_final)?;
        Ok(MapParams {
            grid: self.grid,
            m: self.m,
            epochs: self.epochs,
            sigma_initial,
            sigma_final: self.sigma_final,
        })
    }
}

fn resolve(command: Command) -> Result<RunManifest> {
    let run = match command {
        Command::Gen { n, seed, out } => Run::Gen(GenParams { n, seed, out }),
        Command::Dist {
            input,
            kind,
            normalized,
            integerize,
            out,
        } => {
            if let Some(s) = integerize {
                if !(s.is_finite() && s > 0.0) {
                    return Err(DsomError::invalid(format!(
                        "--integerize scale must be positive, got {s}"
                    )));
                }
            }
            if normalized && kind != InputKind::Words {
                return Err(DsomError::invalid(
                    "--normalized applies to --kind words only",
                ));
            }
            Run::Dist(DistParams {
                input,
                kind,
                normalized,
                integerize,
                out,
            })
        }
        Command::Train {
            matrix,
            map,
            variant,
            ratio,
            seed,
            out,
        } => {
            if !(RATIO_RANGE.0..=RATIO_RANGE.1).contains(&ratio) {
                return Err(DsomError::invalid(format!(
                    "--ratio must lie in [{}, {}], got {ratio}",
                    RATIO_RANGE.0, RATIO_RANGE.1
                )));
            }
            Run::Train(TrainParams {
                matrix,
                map: map.resolve()?,
                variant,
                ratio,
                seed,
                out,
            })
        }
        Command::Verify {
            matrix,
            map,
            seeds,
            seed,
            variants,
            inject_tie_fault,
            out,
        } => {
            if seeds == 0 {
                return Err(DsomError::invalid("--seeds must be at least 1"));
            }
            Run::Verify(VerifyParams {
                matrix,
                map: map.resolve()?,
                seed,
                seeds,
                variants,
                inject_tie_fault,
                out,
            })
        }
        Command::Bench {
            sizes,
            variants,
            epochs,
            repeats,
            seed,
            out,
        } => {
            if repeats == 0 || epochs == 0 {
                return Err(DsomError::invalid(
                    "--repeats and --epochs must be at least 1",
                ));
            }
            let sizes = sizes
                .iter()
                .map(|s| crate::bench::parse_size(s).map(|b| (b.n, b.side)))
                .collect::<Result<_>>()?;
            Run::Bench(BenchParams {
                sizes,
                variants,
                epochs,
                repeats,
                seed,
                out,
            })
        }
        Command::Replay { manifest, out } => {
            let mut m = RunManifest::load(&manifest)?;
            if let Some(out) = out {
                m.redirect(out);
            }
            return Ok(m);
        }
    };
    Ok(RunManifest::new(run))
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_SUCCESS
            };
        }
    };
    let result = resolve(cli.command).and_then(|m| execute(&m));
    match result {
        Ok(Outcome::Success) => EXIT_SUCCESS,
        Ok(Outcome::Divergence) => EXIT_DIVERGENCE,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, DsomError::Divergence(_)) {
                EXIT_DIVERGENCE
            } else {
                EXIT_INPUT
            }
        }
    }
}

pub fn main() -> i32 {
    run_args(std::env::args_os())
}
