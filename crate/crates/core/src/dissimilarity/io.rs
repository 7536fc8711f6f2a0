//! Text matrix format:
//!
//! ```text
//! DSOM-DISSIM 1
//! <n>
//! <n space-separated reals>   (n rows, row-major)
//! ```
//!
//! Reals are written with the shortest representation that parses back to the
//! same `f64`, so save/load round trips are exact.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::DissimilarityMatrix;
use crate::error::{DsomError, Result};

const MAGIC: &str = "DSOM-DISSIM";
const VERSION: &str = "1";

pub fn save_matrix(matrix: &DissimilarityMatrix, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| DsomError::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_matrix(matrix, &mut out)
        .and_then(|_| out.flush())
        .map_err(|e| DsomError::io(path, e))
}

pub fn write_matrix<W: Write>(matrix: &DissimilarityMatrix, out: &mut W) -> std::io::Result<()> {
    writeln!(out, "{MAGIC} {VERSION}")?;
    writeln!(out, "{}", matrix.n())?;
    let mut line = String::new();
    for i in 0..matrix.n() {
        line.clear();
        for (k, v) in matrix.row(i).iter().enumerate() {
            if k > 0 {
                line.push(' ');
            }
            line.push_str(&v.to_string());
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn load_matrix(path: &Path) -> Result<DissimilarityMatrix> {
    let text = fs::read_to_string(path).map_err(|e| DsomError::io(path, e))?;
    parse_matrix(&text)
}

pub(crate) fn parse_matrix(text: &str) -> Result<DissimilarityMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (line, header) = lines.next().ok_or_else(|| DsomError::MalformedHeader {
        line: 1,
        reason: "empty file".into(),
    })?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some(MAGIC) {
        return Err(DsomError::MalformedHeader {
            line,
            reason: format!("expected `{MAGIC} {VERSION}`, found {header:?}"),
        });
    }
    match (parts.next(), parts.next()) {
        (Some(VERSION), None) => {}
        _ => {
            return Err(DsomError::MalformedHeader {
                line,
                reason: format!("unsupported version line {header:?}"),
            })
        }
    }

    let (line, size) = lines.next().ok_or_else(|| DsomError::MalformedHeader {
        line: 2,
        reason: "missing matrix size".into(),
    })?;
    let n: usize = size
        .trim()
        .parse()
        .map_err(|_| DsomError::MalformedHeader {
            line,
            reason: format!("bad matrix size {size:?}"),
        })?;
    if n == 0 {
        return Err(DsomError::MalformedHeader {
            line,
            reason: "matrix size must be at least 1".into(),
        });
    }

    let mut values = Vec::with_capacity(n * n);
    let mut rows = 0;
    for (line, text) in lines {
        if text.trim().is_empty() {
            continue;
        }
        if rows == n {
            return Err(DsomError::NotSquare {
                row: rows,
                expected: n,
                found: text.split_whitespace().count(),
            });
        }
        let before = values.len();
        for field in text.split_whitespace() {
            let v: f64 = field.parse().map_err(|_| DsomError::Parse {
                line,
                reason: format!("bad value {field:?}"),
            })?;
            values.push(v);
        }
        let found = values.len() - before;
        if found != n {
            return Err(DsomError::NotSquare {
                row: rows,
                expected: n,
                found,
            });
        }
        rows += 1;
    }
    if rows != n {
        return Err(DsomError::NotSquare {
            row: rows,
            expected: n,
            found: 0,
        });
    }
    DissimilarityMatrix::from_values(n, values)
}
