use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::affect::{affectation_phase, AffectScratch, UNASSIGNED};
use super::arith::{Arith, Dissimilarities, Exact, Float, Weights};
use super::partial::PartialSums;
use super::repr::{
    repr_brute_force, repr_early_stopping_with, repr_partial_sums, SearchWork, TiePolicy,
};
use super::{init_prototypes, quantization_error_of};
use crate::dissimilarity::{DissimilarityMatrix, MatrixKind};
use crate::error::{DsomError, Result};
use crate::topology::{KernelSchedule, NeighborhoodTable, PriorGraph};

/// The five evaluated combinations of epoch driver and representation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Plain epochs, every candidate summed over all observations.
    Brute,
    /// Plain epochs, partial sums recomputed each epoch.
    Partial,
    /// Plain epochs, partial sums with ordered early stopping.
    EarlyStop,
    /// Partial sums carried across epochs, plain partial-sum search.
    Memory,
    /// Partial sums carried across epochs, ordered early stopping.
    Fast,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Brute,
        Variant::Partial,
        Variant::EarlyStop,
        Variant::Memory,
        Variant::Fast,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Brute => "brute",
            Variant::Partial => "partial",
            Variant::EarlyStop => "earlystop",
            Variant::Memory => "memory",
            Variant::Fast => "fast",
        }
    }

    fn uses_memory(self) -> bool {
        matches!(self, Variant::Memory | Variant::Fast)
    }

    fn uses_early_stopping(self) -> bool {
        matches!(self, Variant::EarlyStop | Variant::Fast)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = DsomError;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| DsomError::invalid(format!("unknown variant {s:?}")))
    }
}

pub const DEFAULT_EPOCHS: usize = 100;
pub const DEFAULT_RATIO: f64 = 7.0;
/// Real-valued runs of the memory variants rebuild every partial sum this
/// often to bound drift from repeated add/subtract updates.
pub const FLOAT_REFRESH_EPOCHS: usize = 25;

#[derive(Debug, Clone, PartialEq)]
pub struct DsomConfig {
    pub variant: Variant,
    pub schedule: KernelSchedule,
    /// Block update when at least `N / ratio` observations switch cluster.
    pub ratio: f64,
    pub seed: u64,
    #[doc(hidden)]
    pub tie_fault: bool,
}

impl DsomConfig {
    pub fn new(variant: Variant, schedule: KernelSchedule, seed: u64) -> Self {
        DsomConfig {
            variant,
            schedule,
            ratio: DEFAULT_RATIO,
            seed,
            tie_fault: false,
        }
    }

    pub fn with_ratio(mut self, ratio: f64) -> Self {
        self.ratio = ratio;
        self
    }

    pub fn epochs(&self) -> usize {
        self.schedule.epochs()
    }

    fn validate(&self) -> Result<()> {
        if !(self.ratio.is_finite() && self.ratio >= 1.0) {
            return Err(DsomError::invalid(format!(
                "ratio must be at least 1, got {}",
                self.ratio
            )));
        }
        Ok(())
    }
}

/// How the partial sums were brought up to date in an epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SumsUpdate {
    /// No partial sums (brute force).
    None,
    /// Everything recomputed.
    Full,
    /// Rows of changed clusters recomputed, others reused.
    Block,
    /// Moved observations subtracted and added one by one.
    Individual,
}

impl fmt::Display for SumsUpdate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SumsUpdate::None => "none",
            SumsUpdate::Full => "full",
            SumsUpdate::Block => "block",
            SumsUpdate::Individual => "individual",
        })
    }
}

/// Block or individual maintenance for the memory variants.
pub fn choose_update_strategy(nb_switch: usize, n: usize, ratio: f64) -> SumsUpdate {
    if nb_switch as f64 >= n as f64 / ratio {
        SumsUpdate::Block
    } else {
        SumsUpdate::Individual
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub nb_switch: usize,
    pub update: SumsUpdate,
    pub candidates_evaluated: u64,
    pub terms_accumulated: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingResult {
    pub prototypes: Vec<usize>,
    /// From the extra affectation pass after the last epoch.
    pub assignments: Vec<usize>,
    pub quantization_error: f64,
    pub epochs: Vec<EpochStats>,
}

impl TrainingResult {
    /// Same prototypes and assignments; statistics are ignored.
    pub fn same_outcome(&self, other: &TrainingResult) -> bool {
        self.prototypes == other.prototypes && self.assignments == other.assignments
    }
}

/// Everything a training run holds at the end of an epoch.
pub struct EpochView<'a, A: Arith> {
    pub epoch: usize,
    pub previous_prototypes: &'a [usize],
    pub prototypes: &'a [usize],
    pub assignments: &'a [usize],
    pub clusters: &'a [Vec<usize>],
    /// Current partial sums; `None` for the brute-force variant.
    pub partial_sums: Option<&'a PartialSums<A>>,
    pub weights: &'a Weights<A>,
    pub stats: &'a EpochStats,
    pub data: &'a Dissimilarities<A>,
}

/// Hook called once per epoch, after the representation phase.
pub trait EpochObserver<A: Arith> {
    fn epoch_done(&mut self, view: &EpochView<'_, A>);
}

impl<A: Arith> EpochObserver<A> for () {
    fn epoch_done(&mut self, _view: &EpochView<'_, A>) {}
}

impl<A: Arith, F: FnMut(&EpochView<'_, A>)> EpochObserver<A> for F {
    fn epoch_done(&mut self, view: &EpochView<'_, A>) {
        self(view)
    }
}

/// Mutable state of one training run.
#[derive(Debug, Clone)]
pub struct TrainingState<A: Arith> {
    pub epoch: usize,
    pub prototypes: Vec<usize>,
    pub assignments: Vec<usize>,
    pub clusters: Vec<Vec<usize>>,
    pub partial_sums: Option<PartialSums<A>>,
    pub dirty: Vec<bool>,
    pub nb_switch: usize,
}

/// A matrix converted once for repeated training runs.
#[derive(Debug, Clone)]
pub enum Prepared {
    Exact(Dissimilarities<Exact>),
    Float(Dissimilarities<Float>),
}

impl Prepared {
    /// Picks the exact back end for integer-valued matrices whose entries fit,
    /// `f64` otherwise.
    pub fn new(matrix: &DissimilarityMatrix) -> Result<Self> {
        if matrix.kind() == MatrixKind::IntegerValued {
            if let Ok(data) = Dissimilarities::<Exact>::new(matrix) {
                return Ok(Prepared::Exact(data));
            }
        }
        Ok(Prepared::Float(Dissimilarities::new(matrix)?))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Prepared::Exact(_))
    }

    pub fn n(&self) -> usize {
        match self {
            Prepared::Exact(d) => d.n(),
            Prepared::Float(d) => d.n(),
        }
    }

    pub fn train(&self, config: &DsomConfig, graph: &PriorGraph) -> Result<TrainingResult> {
        match self {
            Prepared::Exact(d) => train_with(config, d, graph, &mut ()),
            Prepared::Float(d) => train_with(config, d, graph, &mut ()),
        }
    }
}

/// Trains with the exact back end when the matrix allows it, `f64` otherwise.
pub fn train(
    config: &DsomConfig,
    matrix: &DissimilarityMatrix,
    graph: &PriorGraph,
) -> Result<TrainingResult> {
    Prepared::new(matrix)?.train(config, graph)
}

pub fn train_with<A: Arith, O: EpochObserver<A>>(
    config: &DsomConfig,
    data: &Dissimilarities<A>,
    graph: &PriorGraph,
    observer: &mut O,
) -> Result<TrainingResult> {
    config.validate()?;
    let n = data.n();
    let models = graph.models();
    if n == 0 {
        return Err(DsomError::invalid("empty dissimilarity matrix"));
    }
    if models > n {
        return Err(DsomError::TooManyModels {
            models,
            observations: n,
        });
    }
    let variant = config.variant;
    let orders = graph.representation_orders();
    let ties = if config.tie_fault {
        TiePolicy::LargestIndex
    } else {
        TiePolicy::SmallestIndex
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut state = TrainingState::<A> {
        epoch: 0,
        prototypes: init_prototypes(n, models, &mut rng)?,
        assignments: vec![UNASSIGNED; n],
        clusters: vec![Vec::new(); models],
        partial_sums: None,
        dirty: vec![true; models],
        nb_switch: 0,
    };
    let mut scratch = AffectScratch::new();
    let mut stats = Vec::with_capacity(config.epochs());

    for epoch in 1..=config.epochs() {
        state.epoch = epoch;
        let table = NeighborhoodTable::new(&config.schedule, graph, epoch)?;
        let weights = Weights::<A>::new(&table);

        let affectation = affectation_phase(
            &mut state.assignments,
            &mut state.clusters,
            &state.prototypes,
            data,
            graph,
            &orders,
            &mut scratch,
        );
        state.nb_switch = affectation.nb_switch;
        state.dirty = affectation.dirty;

        let update = match (variant, state.partial_sums.as_mut()) {
            (Variant::Brute, _) => SumsUpdate::None,
            (_, None) => {
                state.partial_sums = Some(PartialSums::compute_full(&state.clusters, data));
                if variant.uses_memory() {
                    SumsUpdate::Block
                } else {
                    SumsUpdate::Full
                }
            }
            (_, Some(sums))
                if !variant.uses_memory() || (!A::EXACT && epoch % FLOAT_REFRESH_EPOCHS == 0) =>
            {
                *sums = PartialSums::compute_full(&state.clusters, data);
                SumsUpdate::Full
            }
            (_, Some(sums)) => match choose_update_strategy(state.nb_switch, n, config.ratio) {
                SumsUpdate::Block => {
                    let dirty = &state.dirty;
                    sums.recompute(&state.clusters, data, |u| dirty[u]);
                    SumsUpdate::Block
                }
                _ => {
                    sums.apply_moves(&affectation.moves, data)?;
                    SumsUpdate::Individual
                }
            },
        };

        let previous = state.prototypes.clone();
        let mut work = SearchWork::default();
        for j in 0..models {
            let (best, w) = match (variant, state.partial_sums.as_ref()) {
                (Variant::Brute, _) => repr_brute_force(j, &state.assignments, data, &weights),
                (v, Some(sums)) if v.uses_early_stopping() => repr_early_stopping_with(
                    j,
                    sums,
                    &weights,
                    &orders[j],
                    &state.clusters,
                    Some(previous[j]),
                    ties,
                ),
                (_, Some(sums)) => repr_partial_sums(j, sums, &weights),
                (_, None) => unreachable!("partial sums exist for every non-brute variant"),
            };
            state.prototypes[j] = best;
            work += w;
        }

        let epoch_stats = EpochStats {
            epoch,
            nb_switch: state.nb_switch,
            update,
            candidates_evaluated: work.candidates,
            terms_accumulated: work.terms,
        };
        observer.epoch_done(&EpochView {
            epoch,
            previous_prototypes: &previous,
            prototypes: &state.prototypes,
            assignments: &state.assignments,
            clusters: &state.clusters,
            partial_sums: state.partial_sums.as_ref(),
            weights: &weights,
            stats: &epoch_stats,
            data,
        });
        stats.push(epoch_stats);
    }

    affectation_phase(
        &mut state.assignments,
        &mut state.clusters,
        &state.prototypes,
        data,
        graph,
        &orders,
        &mut scratch,
    );
    let quantization_error = quantization_error_of(&state.assignments, &state.prototypes, data);
    Ok(TrainingResult {
        prototypes: state.prototypes,
        assignments: state.assignments,
        quantization_error,
        epochs: stats,
    })
}
