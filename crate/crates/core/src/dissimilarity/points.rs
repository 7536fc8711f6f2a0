use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::DissimilarityMatrix;
use crate::error::{DsomError, Result};

/// Vector observations, row-major `n x dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    n: usize,
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(n: usize, dim: usize, coords: Vec<f64>) -> Result<Self> {
        if n == 0 || dim == 0 {
            return Err(DsomError::invalid(
                "point set needs at least one point and one dimension",
            ));
        }
        if coords.len() != n * dim {
            return Err(DsomError::invalid(format!(
                "expected {} coordinates for {n} points of dimension {dim}, got {}",
                n * dim,
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(DsomError::invalid(format!(
                "point {} has a non-finite coordinate",
                pos / dim
            )));
        }
        Ok(PointSet { n, dim, coords })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// `n` points drawn uniformly from `[0, 1)^2` with a ChaCha8 stream seeded by
/// `seed`; x then y for each point in turn.
pub fn generate_uniform_square(n: usize, seed: u64) -> Result<PointSet> {
    if n == 0 {
        return Err(DsomError::invalid("cannot generate an empty point set"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = (0..2 * n).map(|_| rng.gen::<f64>()).collect();
    PointSet::new(n, 2, coords)
}

/// Squared Euclidean dissimilarities.
pub fn build_from_vectors(points: &PointSet) -> Result<DissimilarityMatrix> {
    DissimilarityMatrix::from_pair_fn(points.n(), |i, k| {
        points
            .point(i)
            .iter()
            .zip(points.point(k))
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    })
}

/// Reads a headerless CSV of decimal reals, one point per row.
pub fn load_points(path: &Path) -> Result<PointSet> {
    let text = fs::read_to_string(path).map_err(|e| DsomError::io(path, e))?;
    let mut coords = Vec::new();
    let mut dim = None;
    let mut n = 0;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|field| {
                field.trim().parse::<f64>().map_err(|e| DsomError::Parse {
                    line: line_no,
                    reason: format!("bad coordinate {field:?}: {e}"),
                })
            })
            .collect::<Result<_>>()?;
        match dim {
            None => dim = Some(row.len()),
            Some(d) if d != row.len() => {
                return Err(DsomError::Parse {
                    line: line_no,
                    reason: format!("expected {d} coordinates, found {}", row.len()),
                })
            }
            _ => {}
        }
        coords.extend(row);
        n += 1;
    }
    let dim = dim.ok_or_else(|| DsomError::invalid(format!("{}: no points", path.display())))?;
    PointSet::new(n, dim, coords)
}

pub fn save_points(points: &PointSet, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| DsomError::io(path, e))?;
    let mut out = BufWriter::new(file);
    let write = |out: &mut BufWriter<fs::File>| -> std::io::Result<()> {
        for i in 0..points.n() {
            let row: Vec<String> = points.point(i).iter().map(|c| c.to_string()).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        out.flush()
    };
    write(&mut out).map_err(|e| DsomError::io(path, e))
}
