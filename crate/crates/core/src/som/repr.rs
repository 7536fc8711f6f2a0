//! Representation phase: for model `j`, the observation `k` minimizing
//! `S(j,k) = sum_i h(c(i),j) d(x_i,x_k)`.
//!
//! All schemes return the smallest minimizing index, whatever order they
//! visit candidates in.

use super::arith::{Arith, Dissimilarities, Weights};
use super::partial::PartialSums;

/// Work done by one representation search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchWork {
    /// Candidates whose sum was started.
    pub candidates: u64,
    /// Terms added into running sums.
    pub terms: u64,
}

impl std::ops::AddAssign for SearchWork {
    fn add_assign(&mut self, rhs: Self) {
        self.candidates += rhs.candidates;
        self.terms += rhs.terms;
    }
}

/// `S(j,k)` straight from the assignments, summed over increasing `i`.
pub fn s_direct<A: Arith>(
    j: usize,
    k: usize,
    assignments: &[usize],
    data: &Dissimilarities<A>,
    weights: &Weights<A>,
) -> A::Score {
    let column = weights.column(j);
    let row = data.row(k);
    let mut acc = A::Score::default();
    for (i, &c) in assignments.iter().enumerate() {
        acc += A::term(column[c], row[i]);
    }
    acc
}

/// `S(j,k) = sum_u h(u,j) D(u,k)`, summed over increasing `u`.
pub fn s_from_partials<A: Arith>(
    j: usize,
    k: usize,
    sums: &PartialSums<A>,
    weights: &Weights<A>,
) -> A::Score {
    let mut acc = A::Score::default();
    for (&w, &d) in weights.column(j).iter().zip(sums.candidate(k)) {
        acc += A::term(w, d);
    }
    acc
}

/// Tests every observation with an `O(N)` sum: `O(N^2)` per model.
pub fn repr_brute_force<A: Arith>(
    j: usize,
    assignments: &[usize],
    data: &Dissimilarities<A>,
    weights: &Weights<A>,
) -> (usize, SearchWork) {
    let column = weights.column(j);
    let per_observation: Vec<A::Weight> = assignments.iter().map(|&c| column[c]).collect();
    let n = data.n();
    let mut best_k = 0;
    let mut best = A::Score::default();
    for k in 0..n {
        let row = data.row(k);
        let mut acc = A::Score::default();
        for (&w, &d) in per_observation.iter().zip(row) {
            acc += A::term(w, d);
        }
        if k == 0 || acc < best {
            best = acc;
            best_k = k;
        }
    }
    let work = SearchWork {
        candidates: n as u64,
        terms: (n * n) as u64,
    };
    (best_k, work)
}

/// Uses the partial sums: `O(M)` per candidate, `O(NM)` per model.
pub fn repr_partial_sums<A: Arith>(
    j: usize,
    sums: &PartialSums<A>,
    weights: &Weights<A>,
) -> (usize, SearchWork) {
    let column = weights.column(j);
    let n = sums.n();
    let mut best_k = 0;
    let mut best = A::Score::default();
    for k in 0..n {
        let mut acc = A::Score::default();
        for (&w, &d) in column.iter().zip(sums.candidate(k)) {
            acc += A::term(w, d);
        }
        if k == 0 || acc < best {
            best = acc;
            best_k = k;
        }
    }
    let work = SearchWork {
        candidates: n as u64,
        terms: (n * sums.models()) as u64,
    };
    (best_k, work)
}

/// How a search resolves equal sums. Only [`TiePolicy::SmallestIndex`] keeps
/// the schemes interchangeable; the other exists to check that divergence
/// detection works.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TiePolicy {
    #[default]
    SmallestIndex,
    #[doc(hidden)]
    LargestIndex,
}

/// Ordered search with early stopping.
///
/// Candidates are visited cluster by cluster following `order` (the models by
/// increasing graph distance to `j`), with `warm_start` (normally the previous
/// prototype of `j`) tried first. Each running sum adds `h(u,j) D(u,k)` in the
/// same order and is abandoned as soon as it strictly exceeds the best
/// complete sum: terms are nonnegative, so an abandoned candidate can neither
/// beat nor tie the incumbent.
pub fn repr_early_stopping<A: Arith>(
    j: usize,
    sums: &PartialSums<A>,
    weights: &Weights<A>,
    order: &[usize],
    clusters: &[Vec<usize>],
    warm_start: Option<usize>,
) -> (usize, SearchWork) {
    repr_early_stopping_with(
        j,
        sums,
        weights,
        order,
        clusters,
        warm_start,
        TiePolicy::SmallestIndex,
    )
}

#[doc(hidden)]
pub fn repr_early_stopping_with<A: Arith>(
    j: usize,
    sums: &PartialSums<A>,
    weights: &Weights<A>,
    order: &[usize],
    clusters: &[Vec<usize>],
    warm_start: Option<usize>,
    ties: TiePolicy,
) -> (usize, SearchWork) {
    let column = weights.column(j);
    let ordered: Vec<(usize, A::Weight)> = order.iter().map(|&u| (u, column[u])).collect();
    let mut work = SearchWork::default();
    let mut best: Option<(A::Score, usize)> = None;

    let mut visit = |k: usize, best: &mut Option<(A::Score, usize)>| {
        let partial = sums.candidate(k);
        let mut acc = A::Score::default();
        work.candidates += 1;
        match *best {
            None => {
                for &(u, w) in &ordered {
                    acc += A::term(w, partial[u]);
                }
                work.terms += ordered.len() as u64;
                *best = Some((acc, k));
            }
            Some((bound, best_k)) => {
                for &(u, w) in &ordered {
                    acc += A::term(w, partial[u]);
                    work.terms += 1;
                    if acc > bound {
                        return;
                    }
                }
                let replace = acc < bound
                    || match ties {
                        TiePolicy::SmallestIndex => k < best_k,
                        TiePolicy::LargestIndex => k > best_k,
                    };
                if replace {
                    *best = Some((acc, k));
                }
            }
        }
    };

    if let Some(k) = warm_start {
        visit(k, &mut best);
    }
    for &v in order {
        for &k in &clusters[v] {
            if Some(k) != warm_start {
                visit(k, &mut best);
            }
        }
    }
    let (_, best_k) = best.expect("clusters partition a nonempty data set");
    (best_k, work)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissimilarity::DissimilarityMatrix;
    use crate::som::affect::rebuild_clusters;
    use crate::som::arith::{Exact, Float};
    use crate::topology::{KernelSchedule, NeighborhoodTable, PriorGraph};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, max: u32, rng: &mut ChaCha8Rng) -> DissimilarityMatrix {
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            for k in (i + 1)..n {
                let d = rng.gen_range(0..=max) as f64;
                v[i * n + k] = d;
                v[k * n + i] = d;
            }
        }
        DissimilarityMatrix::from_values(n, v).unwrap()
    }

    /// Independent evaluation of the weighted-sum argmin with f64 and an
    /// explicit candidate list.
    fn exhaustive(
        j: usize,
        assignments: &[usize],
        m: &DissimilarityMatrix,
        h: &NeighborhoodTable,
    ) -> Vec<f64> {
        (0..m.n())
            .map(|k| {
                assignments
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| h.get(c, j) * m.get(i, k))
                    .sum()
            })
            .collect()
    }

    struct Instance {
        matrix: DissimilarityMatrix,
        graph: PriorGraph,
        assignments: Vec<usize>,
        prototypes: Vec<usize>,
        clusters: Vec<Vec<usize>>,
        table: NeighborhoodTable,
    }

    fn instance(rng: &mut ChaCha8Rng, n: usize, side: usize, max: u32) -> Instance {
        let matrix = random_matrix(n, max, rng);
        let graph = PriorGraph::hex_grid(side).unwrap();
        let m = graph.models();
        let assignments: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
        let prototypes: Vec<usize> = (0..m).map(|_| rng.gen_range(0..n)).collect();
        let mut clusters = vec![Vec::new(); m];
        rebuild_clusters(&assignments, &prototypes, &mut clusters);
        let schedule = KernelSchedule::for_graph(&graph, 5).unwrap();
        let table = NeighborhoodTable::new(&schedule, &graph, rng.gen_range(1..=5)).unwrap();
        Instance {
            matrix,
            graph,
            assignments,
            prototypes,
            clusters,
            table,
        }
    }

    #[test]
    fn single_observation() {
        let m = DissimilarityMatrix::from_values(1, vec![0.0]).unwrap();
        let data = Dissimilarities::<Exact>::new(&m).unwrap();
        let w = Weights::<Exact>::new(&NeighborhoodTable::flat(1));
        let sums = PartialSums::compute_full(&[vec![0]], &data);
        assert_eq!(repr_brute_force(0, &[0], &data, &w).0, 0);
        assert_eq!(repr_partial_sums(0, &sums, &w).0, 0);
        let (k, work) = repr_early_stopping(0, &sums, &w, &[0], &[vec![0]], Some(0));
        assert_eq!(k, 0);
        assert_eq!(
            work,
            SearchWork {
                candidates: 1,
                terms: 1
            }
        );
    }

    #[test]
    fn flat_kernel_gives_medoid() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = random_matrix(15, 100, &mut rng);
        let data = Dissimilarities::<Exact>::new(&m).unwrap();
        let medoid = (0..15)
            .min_by(|&a, &b| {
                m.column_sum(a)
                    .partial_cmp(&m.column_sum(b))
                    .unwrap()
                    .then(a.cmp(&b))
            })
            .unwrap();
        let w = Weights::<Exact>::new(&NeighborhoodTable::flat(1));
        let assignments = vec![0; 15];
        assert_eq!(repr_brute_force(0, &assignments, &data, &w).0, medoid);
        let sums = PartialSums::compute_full(&[(0..15).collect()], &data);
        assert_eq!(repr_partial_sums(0, &sums, &w).0, medoid);
        for k in 0..15 {
            assert_eq!(
                Exact::score_to_f64(s_from_partials(0, k, &sums, &w)),
                m.column_sum(k)
            );
        }
    }

    #[test]
    fn ties_go_to_smallest_index() {
        // observations 3 and 7 are copies of each other
        let n = 10;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let base = random_matrix(n, 20, &mut rng);
        let copy = |i: usize| if i == 7 { 3 } else { i };
        let m = DissimilarityMatrix::from_pair_fn(n, |i, k| {
            if copy(i) == copy(k) {
                0.0
            } else {
                base.get(copy(i), copy(k))
            }
        })
        .unwrap();
        let data = Dissimilarities::<Exact>::new(&m).unwrap();
        // all mass on observation 3 and 7 so both are minimizers with S = 0
        let graph = PriorGraph::rect_grid(2).unwrap();
        let table = NeighborhoodTable::from_values(
            4,
            vec![
                1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0,
            ],
        )
        .unwrap();
        let w = Weights::<Exact>::new(&table);
        let assignments: Vec<usize> = (0..n)
            .map(|i| if i == 3 || i == 7 { 0 } else { 1 })
            .collect();
        let protos = vec![7, 0, 1, 2];
        let mut clusters = vec![Vec::new(); 4];
        rebuild_clusters(&assignments, &protos, &mut clusters);
        assert_eq!(clusters[0], vec![7, 3]);
        let sums = PartialSums::compute_full(&clusters, &data);
        assert_eq!(repr_brute_force(0, &assignments, &data, &w).0, 3);
        assert_eq!(repr_partial_sums(0, &sums, &w).0, 3);
        let order = graph.representation_order(0);
        assert_eq!(
            repr_early_stopping(0, &sums, &w, &order, &clusters, Some(7)).0,
            3
        );
        assert_eq!(
            repr_early_stopping_with(
                0,
                &sums,
                &w,
                &order,
                &clusters,
                Some(7),
                TiePolicy::LargestIndex
            )
            .0,
            7
        );
    }

    #[test]
    fn schemes_agree_with_exhaustive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..60 {
            let n = rng.gen_range(1..=16);
            let side = rng.gen_range(1..=2);
            let inst = instance(&mut rng, n, side, 6);
            let data = Dissimilarities::<Exact>::new(&inst.matrix).unwrap();
            let w = Weights::<Exact>::new(&inst.table);
            let sums = PartialSums::compute_full(&inst.clusters, &data);
            for j in 0..inst.graph.models() {
                let oracle = exhaustive(j, &inst.assignments, &inst.matrix, &inst.table);
                let min = oracle.iter().cloned().fold(f64::INFINITY, f64::min);
                let (brute, _) = repr_brute_force(j, &inst.assignments, &data, &w);
                // f64 oracle cannot separate sums closer than its rounding
                assert!(oracle[brute] <= min * (1.0 + 1e-12) + 1e-300);
                let (partial, pw) = repr_partial_sums(j, &sums, &w);
                let order = inst.graph.representation_order(j);
                let (early, ew) = repr_early_stopping(
                    j,
                    &sums,
                    &w,
                    &order,
                    &inst.clusters,
                    Some(inst.prototypes[j]),
                );
                assert_eq!(brute, partial);
                assert_eq!(brute, early);
                assert_eq!(pw.terms, (n * inst.graph.models()) as u64);
                assert!(ew.terms <= pw.terms);
                assert!(ew.terms >= ew.candidates);
            }
        }
    }

    #[test]
    fn direct_and_partial_sums_agree_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..30 {
            let inst = instance(&mut rng, 8, 2, 1000);
            let data = Dissimilarities::<Exact>::new(&inst.matrix).unwrap();
            let w = Weights::<Exact>::new(&inst.table);
            let sums = PartialSums::compute_full(&inst.clusters, &data);
            for j in 0..inst.graph.models() {
                for k in 0..8 {
                    assert_eq!(
                        s_direct(j, k, &inst.assignments, &data, &w),
                        s_from_partials(j, k, &sums, &w)
                    );
                }
            }
        }
    }

    #[test]
    fn direct_sum_edge_cases() {
        let m =
            DissimilarityMatrix::from_values(3, vec![0.0, 2.0, 5.0, 2.0, 0.0, 1.0, 5.0, 1.0, 0.0])
                .unwrap();
        let data = Dissimilarities::<Float>::new(&m).unwrap();
        let flat = Weights::<Float>::new(&NeighborhoodTable::flat(2));
        assert_eq!(s_direct(0, 2, &[0, 1, 1], &data, &flat), 6.0);
        let one = DissimilarityMatrix::from_values(1, vec![0.0]).unwrap();
        let data = Dissimilarities::<Float>::new(&one).unwrap();
        let half = Weights::<Float>::new(&NeighborhoodTable::from_values(1, vec![0.5]).unwrap());
        assert_eq!(s_direct(0, 0, &[0], &data, &half), 0.0);
        let sums = PartialSums::compute_full(&[vec![0]], &data);
        assert_eq!(s_from_partials(0, 0, &sums, &half), 0.0);
    }
}
