use std::collections::BTreeSet;
use std::fmt;

use nalgebra::{DMatrix, DVector};

use super::timing::TimingRecord;
use crate::error::{DsomError, Result};

/// Smallest accepted ratio between the extreme singular values of a design.
const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostModel {
    /// `log T = alpha log N + beta log M + gamma`
    LogLog,
    /// `T = delta N^2 + tau N M^2`
    Quadratic,
}

impl fmt::Display for CostModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CostModel::LogLog => "loglog",
            CostModel::Quadratic => "quadratic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CostModelFit {
    pub model: CostModel,
    /// `alpha, beta, gamma` or `delta, tau`, in that order.
    pub coefficients: Vec<(String, f64)>,
    pub nmse: f64,
}

impl CostModelFit {
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.coefficients
            .iter()
            .find(|(n, _)| n == name)
            .map(|&(_, v)| v)
    }

    /// Human-readable summary.
    pub fn report(&self) -> String {
        let mut s = match self.model {
            CostModel::LogLog => "model: log T = alpha log N + beta log M + gamma\n".to_string(),
            CostModel::Quadratic => "model: T = delta N^2 + tau N M^2\n".to_string(),
        };
        for (name, v) in &self.coefficients {
            s += &format!("  {name:<6} = {v:.6e}\n");
        }
        if self.model == CostModel::Quadratic {
            if let (Some(d), Some(t)) = (self.coefficient("delta"), self.coefficient("tau")) {
                if t > 0.0 {
                    s += &format!("  delta/tau = {:.4}\n", d / t);
                }
            }
        }
        s += &format!("  nmse   = {:.6e}\n", self.nmse);
        s
    }

    /// Flat `key=value` lines, keys prefixed by the model name.
    pub fn key_values(&self) -> String {
        let mut s = String::new();
        for (name, v) in &self.coefficients {
            s += &format!("{}.{name}={v}\n", self.model);
        }
        s += &format!("{}.nmse={}\n", self.model, self.nmse);
        s
    }
}

/// Mean squared error divided by the (population) variance of `actual`.
pub fn nmse(predicted: &[f64], actual: &[f64]) -> Result<f64> {
    if predicted.len() != actual.len() || actual.is_empty() {
        return Err(DsomError::invalid(format!(
            "nmse needs two nonempty lists of equal length, got {} and {}",
            predicted.len(),
            actual.len()
        )));
    }
    let n = actual.len() as f64;
    let mean = actual.iter().sum::<f64>() / n;
    let variance = actual.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n;
    if variance <= 0.0 {
        return Err(DsomError::ZeroVariance);
    }
    let mse = predicted
        .iter()
        .zip(actual)
        .map(|(p, a)| (p - a).powi(2))
        .sum::<f64>()
        / n;
    Ok(mse / variance)
}

fn check_design(records: &[TimingRecord]) -> Result<()> {
    if records.len() < 4 {
        return Err(DsomError::DegenerateDesign(format!(
            "{} records, at least 4 needed",
            records.len()
        )));
    }
    let ns: BTreeSet<usize> = records.iter().map(|r| r.n).collect();
    let ms: BTreeSet<usize> = records.iter().map(|r| r.m).collect();
    if ns.len() < 2 || ms.len() < 2 {
        return Err(DsomError::DegenerateDesign(format!(
            "{} distinct N and {} distinct M, at least 2 of each needed",
            ns.len(),
            ms.len()
        )));
    }
    if let Some(r) = records
        .iter()
        .find(|r| !(r.wall_seconds > 0.0 && r.wall_seconds.is_finite()))
    {
        return Err(DsomError::invalid(format!(
            "nonpositive time {} for N={} M={}",
            r.wall_seconds, r.n, r.m
        )));
    }
    Ok(())
}

fn check_rank(x: &DMatrix<f64>) -> Result<()> {
    let sv = x.singular_values();
    let max = sv.max();
    let min = sv.min();
    if max.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) || min / max < RANK_TOLERANCE {
        return Err(DsomError::DegenerateDesign(
            "rank-deficient design matrix".into(),
        ));
    }
    Ok(())
}

/// Ordinary least squares of `log T` on `(log N, log M, 1)`. The NMSE is
/// computed on the back-transformed predictions `exp(.)` against `T`.
pub fn fit_loglog(records: &[TimingRecord]) -> Result<CostModelFit> {
    check_design(records)?;
    let rows = records.len();
    let x = DMatrix::from_fn(rows, 3, |i, c| match c {
        0 => (records[i].n as f64).ln(),
        1 => (records[i].m as f64).ln(),
        _ => 1.0,
    });
    check_rank(&x)?;
    let y = DVector::from_iterator(rows, records.iter().map(|r| r.wall_seconds.ln()));
    let coef = x
        .clone()
        .svd(true, true)
        .solve(&y, 0.0)
        .map_err(|e| DsomError::DegenerateDesign(e.to_string()))?;
    let predicted: Vec<f64> = (&x * &coef).iter().map(|v| v.exp()).collect();
    let actual: Vec<f64> = records.iter().map(|r| r.wall_seconds).collect();
    Ok(CostModelFit {
        model: CostModel::LogLog,
        coefficients: vec![
            ("alpha".into(), coef[0]),
            ("beta".into(), coef[1]),
            ("gamma".into(), coef[2]),
        ],
        nmse: nmse(&predicted, &actual)?,
    })
}

/// Least squares of `T` on `(N^2, N M^2)` with both coefficients constrained
/// to be nonnegative.
pub fn fit_quadratic(records: &[TimingRecord]) -> Result<CostModelFit> {
    check_design(records)?;
    let rows = records.len();
    let raw = DMatrix::from_fn(rows, 2, |i, c| {
        let n = records[i].n as f64;
        let m = records[i].m as f64;
        if c == 0 {
            n * n
        } else {
            n * m * m
        }
    });
    // columns scaled to unit norm for conditioning
    let norms = [raw.column(0).norm(), raw.column(1).norm()];
    let x = DMatrix::from_fn(rows, 2, |i, c| raw[(i, c)] / norms[c]);
    check_rank(&x)?;
    let y = DVector::from_iterator(rows, records.iter().map(|r| r.wall_seconds));

    let scaled = nnls2(&x, &y);
    let coef = [scaled[0] / norms[0], scaled[1] / norms[1]];
    let predicted: Vec<f64> = (0..rows)
        .map(|i| coef[0] * raw[(i, 0)] + coef[1] * raw[(i, 1)])
        .collect();
    Ok(CostModelFit {
        model: CostModel::Quadratic,
        coefficients: vec![("delta".into(), coef[0]), ("tau".into(), coef[1])],
        nmse: nmse(&predicted, y.as_slice())?,
    })
}

/// Two-variable nonnegative least squares by enumerating the active sets.
fn nnls2(x: &DMatrix<f64>, y: &DVector<f64>) -> [f64; 2] {
    let residual = |c: [f64; 2]| {
        (0..x.nrows())
            .map(|i| (y[i] - c[0] * x[(i, 0)] - c[1] * x[(i, 1)]).powi(2))
            .sum::<f64>()
    };
    let mut candidates = vec![[0.0, 0.0]];
    for c in 0..2 {
        let col = x.column(c);
        let denom = col.dot(&col);
        if denom > 0.0 {
            let mut v = [0.0, 0.0];
            v[c] = (col.dot(y) / denom).max(0.0);
            candidates.push(v);
        }
    }
    if let Ok(sol) = x.clone().svd(true, true).solve(y, 0.0) {
        if sol[0] >= 0.0 && sol[1] >= 0.0 {
            candidates.push([sol[0], sol[1]]);
        }
    }
    candidates
        .into_iter()
        .min_by(|a, b| residual(*a).total_cmp(&residual(*b)))
        .expect("zero vector is always a candidate")
}
