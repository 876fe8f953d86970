//! Evaluation metrics: exact match, character-level edit similarity and
//! file-level recall.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

fn strip_trailing_newlines(s: &str) -> &str {
    s.trim_end_matches(['\n', '\r'])
}

/// 1 when the strings agree after dropping trailing line breaks, else 0.
pub fn exact_match(prediction: &str, reference: &str) -> u8 {
    u8::from(strip_trailing_newlines(prediction) == strip_trailing_newlines(reference))
}

/// Levenshtein distance over Unicode scalar values.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// `1 - lev(a, b) / max(|a|, |b|)` after the same trailing line-break
/// normalization as [`exact_match`]; two empty strings score 1.
pub fn edit_similarity(prediction: &str, reference: &str) -> f64 {
    let prediction = strip_trailing_newlines(prediction);
    let reference = strip_trailing_newlines(reference);
    let longest = prediction.chars().count().max(reference.chars().count());
    if longest == 0 {
        return 1.0;
    }
    1.0 - levenshtein(prediction, reference) as f64 / longest as f64
}

/// Share of oracle files present in the prediction.
pub fn file_recall<S: AsRef<str>>(predicted: &[S], oracle: &[S]) -> Result<f64> {
    let oracle: BTreeSet<&str> = oracle.iter().map(AsRef::as_ref).collect();
    if oracle.is_empty() {
        return Err(Error::contract("recall needs a nonempty oracle set"));
    }
    let predicted: BTreeSet<&str> = predicted.iter().map(AsRef::as_ref).collect();
    Ok(predicted.intersection(&oracle).count() as f64 / oracle.len() as f64)
}
