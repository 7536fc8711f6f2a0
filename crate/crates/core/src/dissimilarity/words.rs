use std::fs;
use std::path::Path;

use super::levenshtein::{levenshtein_chars, normalized_chars};
use super::DissimilarityMatrix;
use crate::error::{DsomError, Result};

/// Pairwise edit distances between words, optionally normalized by the longer
/// word's length. Unnormalized matrices are integer-valued.
pub fn build_from_words<S: AsRef<str>>(
    words: &[S],
    normalized: bool,
) -> Result<DissimilarityMatrix> {
    if words.is_empty() {
        return Err(DsomError::invalid("word list is empty"));
    }
    let chars: Vec<Vec<char>> = words.iter().map(|w| w.as_ref().chars().collect()).collect();
    DissimilarityMatrix::from_pair_fn(chars.len(), |i, k| {
        if normalized {
            normalized_chars(&chars[i], &chars[k])
        } else {
            levenshtein_chars(&chars[i], &chars[k]) as f64
        }
    })
}

/// One word per line; surrounding whitespace trimmed, blank lines skipped.
pub fn load_words(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| DsomError::io(path, e))?;
    let words: Vec<String> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect();
    if words.is_empty() {
        return Err(DsomError::invalid(format!("{}: no words", path.display())));
    }
    Ok(words)
}
