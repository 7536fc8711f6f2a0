use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::manifest::{
    BenchParams, DistParams, GenParams, InputKind, MapParams, Run, RunManifest, TrainParams,
    VerifyParams,
};
use crate::bench::{
    equivalence_check, fit_loglog, fit_quadratic, run_grid, write_timing_csv, BenchSize,
};
use crate::dissimilarity::{
    build_from_vectors, build_from_words, generate_uniform_square, load_matrix, load_points,
    load_words, save_matrix, save_points, DissimilarityMatrix,
};
use crate::error::{DsomError, Result};
use crate::som::{DsomConfig, Prepared, TrainingResult};
use crate::topology::{KernelSchedule, PriorGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// Verification found differing variants.
    Divergence,
}

/// Runs a resolved command and writes its manifest.
pub fn execute(manifest: &RunManifest) -> Result<Outcome> {
    match &manifest.run {
        Run::Gen(p) => gen(p, manifest),
        Run::Dist(p) => dist(p, manifest),
        Run::Train(p) => train(p, manifest),
        Run::Verify(p) => verify(p, manifest),
        Run::Bench(p) => bench(p, manifest),
    }
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| DsomError::io(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| DsomError::io(path, e))
}

/// `<file>.manifest.json` next to a single-file output.
fn sidecar(out: &Path) -> PathBuf {
    let mut name = out
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

fn gen(p: &GenParams, manifest: &RunManifest) -> Result<Outcome> {
    let points = generate_uniform_square(p.n, p.seed)?;
    save_points(&points, &p.out)?;
    manifest.save(&sidecar(&p.out))?;
    eprintln!("wrote {} points to {}", p.n, p.out.display());
    Ok(Outcome::Success)
}

fn dist(p: &DistParams, manifest: &RunManifest) -> Result<Outcome> {
    let matrix = match p.kind {
        InputKind::Vectors => build_from_vectors(&load_points(&p.input)?)?,
        InputKind::Words => build_from_words(&load_words(&p.input)?, p.normalized)?,
    };
    let matrix = match p.integerize {
        Some(scale) => matrix.integerize(scale)?,
        None => matrix,
    };
    save_matrix(&matrix, &p.out)?;
    manifest.save(&sidecar(&p.out))?;
    eprintln!(
        "wrote {}x{} matrix to {}",
        matrix.n(),
        matrix.n(),
        p.out.display()
    );
    Ok(Outcome::Success)
}

fn map_setup(
    map: &MapParams,
    matrix: &DissimilarityMatrix,
) -> Result<(PriorGraph, KernelSchedule)> {
    let graph = PriorGraph::lattice(map.grid, map.m)?;
    if graph.models() > matrix.n() {
        return Err(DsomError::TooManyModels {
            models: graph.models(),
            observations: matrix.n(),
        });
    }
    let schedule = KernelSchedule::new(map.epochs, map.sigma_initial, map.sigma_final)?;
    Ok((graph, schedule))
}

fn train(p: &TrainParams, manifest: &RunManifest) -> Result<Outcome> {
    let matrix = load_matrix(&p.matrix)?;
    let (graph, schedule) = map_setup(&p.map, &matrix)?;
    let config = DsomConfig::new(p.variant, schedule, p.seed).with_ratio(p.ratio);
    let data = Prepared::new(&matrix)?;
    create_dir(&p.out)?;
    let result = data.train(&config, &graph)?;
    write_result(&result, &p.out)?;
    manifest.save(&p.out.join("manifest.json"))?;
    eprintln!(
        "trained {} models on {} observations ({} arithmetic), quantization error {}",
        graph.models(),
        matrix.n(),
        if data.is_exact() { "exact" } else { "float" },
        result.quantization_error
    );
    Ok(Outcome::Success)
}

fn write_result(result: &TrainingResult, dir: &Path) -> Result<()> {
    let mut s = String::new();
    for (j, p) in result.prototypes.iter().enumerate() {
        let _ = writeln!(s, "{j} {p}");
    }
    write(&dir.join("prototypes.txt"), &s)?;

    s.clear();
    for (i, c) in result.assignments.iter().enumerate() {
        let _ = writeln!(s, "{i} {c}");
    }
    write(&dir.join("assignments.txt"), &s)?;

    s.clear();
    s.push_str("epoch,nb_switch,strategy,candidates_evaluated,terms_accumulated\n");
    for e in &result.epochs {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            e.epoch, e.nb_switch, e.update, e.candidates_evaluated, e.terms_accumulated
        );
    }
    write(&dir.join("epochs.csv"), &s)?;
    write(
        &dir.join("quantization_error.txt"),
        format!("{}\n", result.quantization_error),
    )
}

fn verify(p: &VerifyParams, manifest: &RunManifest) -> Result<Outcome> {
    if p.variants.is_empty() {
        return Err(DsomError::invalid("no variant to compare"));
    }
    let matrix = load_matrix(&p.matrix)?;
    let (graph, schedule) = map_setup(&p.map, &matrix)?;
    let seeds: Vec<u64> = (0..p.seeds).map(|s| p.seed + s).collect();
    let report = equivalence_check(
        &matrix,
        &graph,
        &schedule,
        &seeds,
        &p.variants,
        p.inject_tie_fault,
    )?;
    let text = report.render();
    print!("{text}");
    if let Some(out) = &p.out {
        create_dir(out)?;
        write(&out.join("report.txt"), &text)?;
        manifest.save(&out.join("manifest.json"))?;
    }
    Ok(if report.passed() {
        Outcome::Success
    } else {
        Outcome::Divergence
    })
}

fn bench(p: &BenchParams, manifest: &RunManifest) -> Result<Outcome> {
    if p.variants.is_empty() {
        return Err(DsomError::invalid("no variant to time"));
    }
    create_dir(&p.out)?;
    let sizes: Vec<BenchSize> = p
        .sizes
        .iter()
        .map(|&(n, side)| BenchSize { n, side })
        .collect();
    let records = run_grid(&sizes, &p.variants, p.epochs, p.seed, p.repeats)?;

    let mut csv = Vec::new();
    write_timing_csv(&records, &mut csv)
        .map_err(|e| DsomError::io(p.out.join("timings.csv"), e))?;
    write(&p.out.join("timings.csv"), &csv)?;

    let mut report = String::new();
    let mut kv = String::new();
    for &variant in &p.variants {
        let subset: Vec<_> = records
            .iter()
            .filter(|r| r.variant == variant)
            .cloned()
            .collect();
        for fit in [fit_loglog(&subset), fit_quadratic(&subset)] {
            match fit {
                Ok(f) => {
                    let _ = write!(report, "[{variant}] {}", f.report());
                    for line in f.key_values().lines() {
                        let _ = writeln!(kv, "{variant}.{line}");
                    }
                }
                Err(e) => {
                    let _ = writeln!(report, "[{variant}] no fit: {e}");
                }
            }
        }
    }
    write(&p.out.join("fit.txt"), &report)?;
    write(&p.out.join("fit.kv"), &kv)?;
    manifest.save(&p.out.join("manifest.json"))?;
    print!("{report}");
    Ok(Outcome::Success)
}
