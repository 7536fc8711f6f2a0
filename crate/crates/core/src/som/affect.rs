//! Affectation: each observation goes to the model whose prototype is least
//! dissimilar, with ties broken by a growing neighborhood on the lattice.

use super::arith::{Arith, Dissimilarities};
use super::partial::Move;
use crate::topology::PriorGraph;

/// Marks an observation with no assignment yet (before the first epoch).
pub const UNASSIGNED: usize = usize::MAX;

/// Reusable buffers for [`affect_one`].
#[derive(Debug, Default)]
pub struct AffectScratch<V> {
    to_prototype: Vec<V>,
    survivors: Vec<usize>,
    cursor: Vec<usize>,
    affinity: Vec<V>,
}

impl<V> AffectScratch<V> {
    pub fn new() -> Self {
        AffectScratch {
            to_prototype: Vec::new(),
            survivors: Vec::new(),
            cursor: Vec::new(),
            affinity: Vec::new(),
        }
    }
}

/// Model for observation `i`.
///
/// The minimizers of `d(x_i, m_j)` are found first; a unique one is returned
/// at once. Otherwise, for radius `r = 1, 2, ...` every surviving model `j`
/// gets the affinity `A_r(j) = sum_{k : g(k,j) <= r} d(x_i, m_k)` and only the
/// minimizers survive, until one is left or `r` reaches the diameter. Any
/// remaining tie goes to the smallest model index.
///
/// `orders[j]` must be the representation order of `j` (models by increasing
/// graph distance), which lets each affinity grow ring by ring.
pub fn affect_one<A: Arith>(
    i: usize,
    prototypes: &[usize],
    data: &Dissimilarities<A>,
    graph: &PriorGraph,
    orders: &[Vec<usize>],
    scratch: &mut AffectScratch<A::Value>,
) -> usize {
    let row = data.row(i);
    scratch.to_prototype.clear();
    scratch
        .to_prototype
        .extend(prototypes.iter().map(|&p| row[p]));
    let dist = &scratch.to_prototype;

    let mut best = dist[0];
    scratch.survivors.clear();
    scratch.survivors.push(0);
    for (j, &d) in dist.iter().enumerate().skip(1) {
        if d < best {
            best = d;
            scratch.survivors.clear();
            scratch.survivors.push(j);
        } else if d == best {
            scratch.survivors.push(j);
        }
    }
    if scratch.survivors.len() == 1 {
        return scratch.survivors[0];
    }

    // A_0(j) = d(x_i, m_j), identical for all survivors; positions 0 of each
    // order hold j itself.
    scratch.cursor.clear();
    scratch.cursor.resize(scratch.survivors.len(), 1);
    scratch.affinity.clear();
    scratch.affinity.resize(scratch.survivors.len(), best);

    for radius in 1..=graph.diameter() {
        for (slot, &j) in scratch.survivors.iter().enumerate() {
            let order = &orders[j];
            let mut pos = scratch.cursor[slot];
            let mut acc = scratch.affinity[slot];
            while pos < order.len() && graph.distance(order[pos], j) <= radius {
                acc += dist[order[pos]];
                pos += 1;
            }
            scratch.cursor[slot] = pos;
            scratch.affinity[slot] = acc;
        }
        let mut min = scratch.affinity[0];
        for &a in &scratch.affinity[1..] {
            if a < min {
                min = a;
            }
        }
        let mut keep = 0;
        for slot in 0..scratch.survivors.len() {
            if scratch.affinity[slot] == min {
                scratch.survivors[keep] = scratch.survivors[slot];
                scratch.cursor[keep] = scratch.cursor[slot];
                scratch.affinity[keep] = scratch.affinity[slot];
                keep += 1;
            }
        }
        scratch.survivors.truncate(keep);
        scratch.cursor.truncate(keep);
        scratch.affinity.truncate(keep);
        if keep == 1 {
            break;
        }
    }
    // survivors stay in increasing model order
    scratch.survivors[0]
}

/// Outcome of one affectation phase.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Affectation {
    pub nb_switch: usize,
    /// `dirty[u]` is set when cluster `u` gained or lost a member.
    pub dirty: Vec<bool>,
    /// Changed observations in increasing index order. Observations that had
    /// no previous assignment are not listed.
    pub moves: Vec<Move>,
}

/// Reassigns every observation from the current prototypes and rebuilds the
/// clusters.
///
/// Each rebuilt cluster lists its model's current prototype first when that
/// prototype is a member, then the other members by increasing index.
pub fn affectation_phase<A: Arith>(
    assignments: &mut [usize],
    clusters: &mut [Vec<usize>],
    prototypes: &[usize],
    data: &Dissimilarities<A>,
    graph: &PriorGraph,
    orders: &[Vec<usize>],
    scratch: &mut AffectScratch<A::Value>,
) -> Affectation {
    let models = prototypes.len();
    let mut out = Affectation {
        nb_switch: 0,
        dirty: vec![false; models],
        moves: Vec::new(),
    };
    let first_epoch = assignments.contains(&UNASSIGNED);
    for (i, slot) in assignments.iter_mut().enumerate() {
        let new = affect_one(i, prototypes, data, graph, orders, scratch);
        let old = *slot;
        if new != old {
            out.nb_switch += 1;
            out.dirty[new] = true;
            if old != UNASSIGNED {
                out.dirty[old] = true;
                out.moves.push(Move {
                    observation: i,
                    from: old,
                    to: new,
                });
            }
            *slot = new;
        }
    }
    if first_epoch {
        out.dirty.iter_mut().for_each(|d| *d = true);
    }
    rebuild_clusters(assignments, prototypes, clusters);
    out
}

pub(crate) fn rebuild_clusters(
    assignments: &[usize],
    prototypes: &[usize],
    clusters: &mut [Vec<usize>],
) {
    for c in clusters.iter_mut() {
        c.clear();
    }
    for (u, c) in clusters.iter_mut().enumerate() {
        let p = prototypes[u];
        if assignments[p] == u {
            c.push(p);
        }
    }
    for (i, &u) in assignments.iter().enumerate() {
        if prototypes[u] != i {
            clusters[u].push(i);
        }
    }
}
