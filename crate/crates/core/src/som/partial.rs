//! Per-cluster partial sums `D(u,k) = sum_{i in C_u} d(x_i, x_k)` and their
//! maintenance between epochs.

use super::arith::{Arith, Dissimilarities};
use crate::error::{DsomError, Result};

/// `D(u,k)` for `M` clusters and `N` candidates, stored candidate-major so that
/// the `M` sums for one candidate are contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSums<A: Arith> {
    models: usize,
    n: usize,
    data: Vec<A::Value>,
}

/// One observation changing cluster between two epochs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Move {
    pub observation: usize,
    pub from: usize,
    pub to: usize,
}

impl<A: Arith> PartialSums<A> {
    pub fn zeros(models: usize, n: usize) -> Self {
        PartialSums {
            models,
            n,
            data: vec![A::Value::default(); models * n],
        }
    }

    /// Full `Theta(N^2)` computation; each sum follows the cluster's list order.
    pub fn compute_full(clusters: &[Vec<usize>], data: &Dissimilarities<A>) -> Self {
        let mut sums = Self::zeros(clusters.len(), data.n());
        sums.recompute(clusters, data, |_| true);
        sums
    }

    /// Recomputes the rows of clusters selected by `stale`, leaving the others
    /// untouched.
    pub fn recompute<F: Fn(usize) -> bool>(
        &mut self,
        clusters: &[Vec<usize>],
        data: &Dissimilarities<A>,
        stale: F,
    ) {
        debug_assert_eq!(clusters.len(), self.models);
        let targets: Vec<usize> = (0..self.models).filter(|&u| stale(u)).collect();
        if targets.is_empty() {
            return;
        }
        for k in 0..self.n {
            let row = data.row(k);
            let sums = &mut self.data[k * self.models..(k + 1) * self.models];
            for &u in &targets {
                let mut acc = A::Value::default();
                for &i in &clusters[u] {
                    acc += row[i];
                }
                sums[u] = acc;
            }
        }
    }

    /// Applies `D(from,k) -= d(x_i,x_k)` and `D(to,k) += d(x_i,x_k)` for every
    /// move and every `k`. Returns the number of additions performed (`2N` per
    /// move).
    pub fn apply_moves(&mut self, moves: &[Move], data: &Dissimilarities<A>) -> Result<u64> {
        if let Some(bad) = moves.iter().find(|m| m.from == m.to) {
            return Err(DsomError::invalid(format!(
                "observation {} moves from cluster {} to itself",
                bad.observation, bad.from
            )));
        }
        if let Some(bad) = moves
            .iter()
            .find(|m| m.from >= self.models || m.to >= self.models)
        {
            return Err(DsomError::invalid(format!(
                "move of observation {} references a missing cluster",
                bad.observation
            )));
        }
        let mut additions = 0u64;
        for mv in moves {
            let row = data.row(mv.observation);
            for (k, &d) in row.iter().enumerate() {
                let sums = &mut self.data[k * self.models..(k + 1) * self.models];
                sums[mv.from] -= d;
                sums[mv.to] += d;
            }
            additions += 2 * self.n as u64;
        }
        Ok(additions)
    }

    pub fn models(&self) -> usize {
        self.models
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, u: usize, k: usize) -> A::Value {
        self.data[k * self.models + u]
    }

    /// `D(u,k)` for every `u`.
    #[inline]
    pub fn candidate(&self, k: usize) -> &[A::Value] {
        &self.data[k * self.models..(k + 1) * self.models]
    }

    /// `sum_u D(u,k)`.
    pub fn column_sum(&self, k: usize) -> A::Value {
        self.candidate(k)
            .iter()
            .fold(A::Value::default(), |acc, &v| acc + v)
    }
}
