//! Prior structure over the models: lattice graphs, their shortest-path
//! distances, and the shrinking neighborhood kernel.

mod kernel;

pub use kernel::{KernelSchedule, NeighborhoodTable, DEFAULT_SIGMA_FINAL};

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::error::{DsomError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    Hex,
    Rect,
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Layout::Hex => "hex",
            Layout::Rect => "rect",
        })
    }
}

impl FromStr for Layout {
    type Err = DsomError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hex" => Ok(Layout::Hex),
            "rect" => Ok(Layout::Rect),
            other => Err(DsomError::invalid(format!("unknown grid layout {other:?}"))),
        }
    }
}

/// An `m x m` lattice of models with all-pairs graph distances.
///
/// Model `q + r * m` sits at axial coordinates `(q, r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorGraph {
    layout: Layout,
    side: usize,
    adjacency: Vec<Vec<usize>>,
    gdist: Vec<u32>,
    diameter: u32,
}

const HEX_STEPS: [(isize, isize); 6] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)];
const RECT_STEPS: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

impl PriorGraph {
    pub fn hex_grid(m: usize) -> Result<Self> {
        Self::lattice(Layout::Hex, m)
    }

    pub fn rect_grid(m: usize) -> Result<Self> {
        Self::lattice(Layout::Rect, m)
    }

    pub fn lattice(layout: Layout, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(DsomError::invalid("grid side length must be at least 1"));
        }
        let steps: &[(isize, isize)] = match layout {
            Layout::Hex => &HEX_STEPS,
            Layout::Rect => &RECT_STEPS,
        };
        let side = m as isize;
        let adjacency = (0..m * m)
            .map(|v| {
                let (q, r) = ((v % m) as isize, (v / m) as isize);
                steps
                    .iter()
                    .map(|(dq, dr)| (q + dq, r + dr))
                    .filter(|&(q, r)| (0..side).contains(&q) && (0..side).contains(&r))
                    .map(|(q, r)| (q + r * side) as usize)
                    .collect()
            })
            .collect();
        Ok(Self::from_adjacency(layout, m, adjacency))
    }

    fn from_adjacency(layout: Layout, side: usize, adjacency: Vec<Vec<usize>>) -> Self {
        let count = adjacency.len();
        let mut gdist = vec![u32::MAX; count * count];
        let mut queue = VecDeque::new();
        for source in 0..count {
            let row = &mut gdist[source * count..(source + 1) * count];
            row[source] = 0;
            queue.push_back(source);
            while let Some(v) = queue.pop_front() {
                for &w in &adjacency[v] {
                    if row[w] == u32::MAX {
                        row[w] = row[v] + 1;
                        queue.push_back(w);
                    }
                }
            }
        }
        let diameter = gdist.iter().copied().max().unwrap_or(0);
        debug_assert!(diameter != u32::MAX, "lattice must be connected");
        PriorGraph {
            layout,
            side,
            adjacency,
            gdist,
            diameter,
        }
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// Number of models `M`.
    #[inline]
    pub fn models(&self) -> usize {
        self.adjacency.len()
    }

    #[inline]
    pub fn distance(&self, j: usize, k: usize) -> u32 {
        self.gdist[j * self.models() + k]
    }

    pub fn neighbors(&self, j: usize) -> &[usize] {
        &self.adjacency[j]
    }

    pub fn diameter(&self) -> u32 {
        self.diameter
    }

    pub fn coords(&self, j: usize) -> (usize, usize) {
        (j % self.side, j / self.side)
    }

    /// Models sorted by increasing graph distance to `j`, ties by index, so
    /// the first entry is always `j` itself.
    pub fn representation_order(&self, j: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.models()).collect();
        order.sort_by_key(|&u| (self.distance(u, j), u));
        order
    }

    pub fn representation_orders(&self) -> Vec<Vec<usize>> {
        (0..self.models())
            .map(|j| self.representation_order(j))
            .collect()
    }
}
