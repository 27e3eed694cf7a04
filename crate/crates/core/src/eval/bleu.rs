use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};

pub const BLEU_SMOOTHING: f64 = 1e-9;
const MAX_ORDER: usize = 4;

fn ngram_counts<S: Eq + Hash>(tokens: &[S], n: usize) -> HashMap<&[S], usize> {
    let mut counts = HashMap::new();
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

/// Clipped n-gram matches and the candidate n-gram total.
pub fn modified_precision<S: Eq + Hash>(candidate: &[S], reference: &[S], n: usize) -> (usize, usize) {
    let reference = ngram_counts(reference, n);
    let matches = ngram_counts(candidate, n)
        .into_iter()
        .map(|(gram, c)| c.min(reference.get(gram).copied().unwrap_or(0)))
        .sum();
    (matches, candidate.len().saturating_sub(n - 1))
}

/// Sentence BLEU with uniform weights over 1..4-grams, add-epsilon on zero
/// matches and the standard brevity penalty. Candidates shorter than four
/// tokens average over the orders they actually contain.
pub fn sentence_bleu<S: Eq + Hash>(candidate: &[S], reference: &[S]) -> Result<f64> {
    if reference.is_empty() {
        return Err(Error::InvalidArgument("BLEU reference is empty".into()));
    }
    if candidate.is_empty() {
        return Ok(0.0);
    }
    let orders = MAX_ORDER.min(candidate.len());
    let mut log_sum = 0.0;
    for n in 1..=orders {
        let (matches, total) = modified_precision(candidate, reference, n);
        let p = if matches == 0 {
            BLEU_SMOOTHING / total as f64
        } else {
            matches as f64 / total as f64
        };
        log_sum += p.ln();
    }
    let (c, r) = (candidate.len() as f64, reference.len() as f64);
    let bp = (1.0 - r / c).exp().min(1.0);
    Ok(bp * (log_sum / orders as f64).exp())
}
