use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::Sentence;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RougeScore {
    pub n: usize,
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
    pub overlap_count: usize,
    pub ref_count: usize,
    pub cand_count: usize,
}

fn ngram_counts(words: &[&str], n: usize) -> HashMap<Vec<String>, usize> {
    let mut counts = HashMap::new();
    for gram in words.windows(n) {
        *counts.entry(gram.iter().map(|w| w.to_string()).collect()).or_insert(0) += 1;
    }
    counts
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// ROUGE-N with clipped counts over the lowercased word stream of each side
/// (punctuation dropped, no stemming or stopword removal).
pub fn rouge_n(reference: &[Sentence], candidate: &[Sentence], n: usize) -> Result<RougeScore> {
    if n == 0 {
        return Err(Error::InvalidInput("ROUGE order must be at least 1".into()));
    }
    let ref_words: Vec<&str> = reference.iter().flat_map(Sentence::words).collect();
    let cand_words: Vec<&str> = candidate.iter().flat_map(Sentence::words).collect();
    let ref_counts = ngram_counts(&ref_words, n);
    let cand_counts = ngram_counts(&cand_words, n);
    let overlap = ref_counts.iter().map(|(g, &c)| c.min(cand_counts.get(g).copied().unwrap_or(0))).sum();
    let ref_count = ref_words.len().saturating_sub(n - 1);
    let cand_count = cand_words.len().saturating_sub(n - 1);
    let recall = ratio(overlap, ref_count);
    let precision = ratio(overlap, cand_count);
    let f1 = if recall + precision > 0.0 { 2.0 * recall * precision / (recall + precision) } else { 0.0 };
    Ok(RougeScore { n, recall, precision, f1, overlap_count: overlap, ref_count, cand_count })
}

/// [`rouge_n`] on raw texts, each treated as a single sentence.
pub fn rouge_text(reference: &str, candidate: &str, n: usize) -> Result<RougeScore> {
    rouge_n(&[Sentence::new(0, reference)], &[Sentence::new(0, candidate)], n)
}
