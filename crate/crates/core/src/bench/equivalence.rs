use std::fmt::Write;

use crate::dissimilarity::DissimilarityMatrix;
use crate::error::{DsomError, Result};
use crate::som::{
    s_direct, train_with, Arith, Dissimilarities, DsomConfig, EpochView, Prepared, Variant,
};
use crate::topology::{KernelSchedule, PriorGraph};

/// On real-valued data, two candidates whose sums differ by at most this
/// fraction are a near-tie: a divergence there is inconclusive, not a failure.
pub const NEAR_TIE_RELATIVE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Divergence {
    pub seed: u64,
    pub reference: Variant,
    pub variant: Variant,
    /// First epoch whose prototypes differ; `None` if only the final
    /// assignments differ.
    pub first_epoch: Option<usize>,
    /// Models whose prototypes differ at `first_epoch`.
    pub models: Vec<usize>,
    /// Every differing model is a near-tie (real-valued data only).
    pub inconclusive: bool,
}

impl Divergence {
    pub fn describe(&self) -> String {
        let at = match self.first_epoch {
            Some(l) => format!("first differs at epoch {l} (models {:?})", self.models),
            None => "final assignments differ".to_string(),
        };
        let tag = if self.inconclusive {
            " [near-tie, inconclusive]"
        } else {
            ""
        };
        format!(
            "seed {}: {} vs {}: {at}{tag}",
            self.seed, self.reference, self.variant
        )
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct EquivalenceReport {
    /// Whether the exact back end was used.
    pub exact: bool,
    pub seeds: Vec<u64>,
    pub variants: Vec<Variant>,
    pub divergences: Vec<Divergence>,
}

impl EquivalenceReport {
    /// No divergence other than inconclusive near-ties.
    pub fn passed(&self) -> bool {
        self.divergences.iter().all(|d| d.inconclusive)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let names: Vec<&str> = self.variants.iter().map(|v| v.name()).collect();
        let _ = writeln!(
            s,
            "variants: {}\nseeds: {}\narithmetic: {}",
            names.join(","),
            self.seeds.len(),
            if self.exact { "exact" } else { "float" }
        );
        for d in &self.divergences {
            let _ = writeln!(s, "{}", d.describe());
        }
        let _ = writeln!(
            s,
            "{}",
            if self.passed() {
                "result: identical"
            } else {
                "result: DIVERGENCE"
            }
        );
        s
    }
}

/// Trains every variant for every seed and compares prototypes and
/// assignments with the first variant. A divergence is localized by the
/// first epoch whose prototypes differ.
pub fn equivalence_check(
    matrix: &DissimilarityMatrix,
    graph: &PriorGraph,
    schedule: &KernelSchedule,
    seeds: &[u64],
    variants: &[Variant],
    tie_fault: bool,
) -> Result<EquivalenceReport> {
    if variants.is_empty() {
        return Err(DsomError::invalid("no variant to compare"));
    }
    let divergences = match Prepared::new(matrix)? {
        Prepared::Exact(d) => check(&d, graph, schedule, seeds, variants, tie_fault)?,
        Prepared::Float(d) => check(&d, graph, schedule, seeds, variants, tie_fault)?,
    };
    Ok(EquivalenceReport {
        exact: Prepared::new(matrix)?.is_exact(),
        seeds: seeds.to_vec(),
        variants: variants.to_vec(),
        divergences,
    })
}

struct Run {
    trajectory: Vec<Vec<usize>>,
    prototypes: Vec<usize>,
    assignments: Vec<usize>,
}

fn run<A: Arith>(
    config: &DsomConfig,
    data: &Dissimilarities<A>,
    graph: &PriorGraph,
) -> Result<Run> {
    let mut trajectory = Vec::with_capacity(config.epochs());
    let result = train_with(config, data, graph, &mut |v: &EpochView<'_, A>| {
        trajectory.push(v.prototypes.to_vec())
    })?;
    Ok(Run {
        trajectory,
        prototypes: result.prototypes,
        assignments: result.assignments,
    })
}

fn check<A: Arith>(
    data: &Dissimilarities<A>,
    graph: &PriorGraph,
    schedule: &KernelSchedule,
    seeds: &[u64],
    variants: &[Variant],
    tie_fault: bool,
) -> Result<Vec<Divergence>> {
    let mut out = Vec::new();
    for &seed in seeds {
        let config = |variant| {
            let mut c = DsomConfig::new(variant, *schedule, seed);
            c.tie_fault = tie_fault;
            c
        };
        let reference = run(&config(variants[0]), data, graph)?;
        for &variant in &variants[1..] {
            let other = run(&config(variant), data, graph)?;
            if other.prototypes == reference.prototypes
                && other.assignments == reference.assignments
            {
                continue;
            }
            let first = reference
                .trajectory
                .iter()
                .zip(&other.trajectory)
                .position(|(a, b)| a != b);
            let (first_epoch, models) = match first {
                Some(l) => {
                    let models = (0..graph.models())
                        .filter(|&j| reference.trajectory[l][j] != other.trajectory[l][j])
                        .collect();
                    (Some(l + 1), models)
                }
                None => (None, Vec::new()),
            };
            let inconclusive = match first_epoch {
                Some(epoch) if !A::EXACT => near_tie(
                    &config(variants[0]),
                    data,
                    graph,
                    epoch,
                    &models,
                    &reference,
                    &other,
                )?,
                _ => false,
            };
            out.push(Divergence {
                seed,
                reference: variants[0],
                variant,
                first_epoch,
                models,
                inconclusive,
            });
        }
    }
    Ok(out)
}

/// Replays the reference run up to `epoch` and compares, for every differing
/// model, the sums of the two chosen prototypes. Both runs share the
/// assignments of that epoch since their previous prototypes agree.
fn near_tie<A: Arith>(
    config: &DsomConfig,
    data: &Dissimilarities<A>,
    graph: &PriorGraph,
    epoch: usize,
    models: &[usize],
    a: &Run,
    b: &Run,
) -> Result<bool> {
    let pa = &a.trajectory[epoch - 1];
    let pb = &b.trajectory[epoch - 1];
    let mut all_near = true;
    train_with(config, data, graph, &mut |v: &EpochView<'_, A>| {
        if v.epoch != epoch {
            return;
        }
        for &j in models {
            let sa = A::score_to_f64(s_direct(j, pa[j], v.assignments, v.data, v.weights));
            let sb = A::score_to_f64(s_direct(j, pb[j], v.assignments, v.data, v.weights));
            if (sa - sb).abs() > NEAR_TIE_RELATIVE * sa.abs().max(sb.abs()) {
                all_near = false;
            }
        }
    })?;
    Ok(all_near)
}
