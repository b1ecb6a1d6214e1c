//! Positive / unlabeled training labels derived from document–summary pairs.
//!
//! Two regimes are supported. Extract labeling marks a sentence positive when
//! any human extract contains it. Alignment labeling scores each article
//! sentence against its best-matching summary sentence and thresholds the
//! score: above `t_pos` is positive, at most `t_unl` is unlabeled, and the
//! band in between is left out of training.
//!
//! The alignment score is IDF-weighted word-type overlap. Its scale depends
//! on the corpus, so the thresholds should be recalibrated per corpus.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Document, IdfTable, Sentence};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelFlag {
    Positive,
    Unlabeled,
    Excluded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakLabel {
    pub doc_id: String,
    pub sentence_id: usize,
    pub flag: LabelFlag,
    pub align_score: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelMode {
    Alignment,
    Extract,
}

impl std::str::FromStr for LabelMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alignment" => Ok(LabelMode::Alignment),
            "extract" => Ok(LabelMode::Extract),
            other => Err(Error::Config(format!("unknown label mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelConfig {
    #[serde(default = "default_t_pos")]
    pub t_pos: f64,
    #[serde(default = "default_t_unl")]
    pub t_unl: f64,
    #[serde(default = "default_balance_ratio")]
    pub balance_ratio: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_t_pos() -> f64 {
    14.0
}

fn default_t_unl() -> f64 {
    10.0
}

fn default_balance_ratio() -> f64 {
    1.2
}

impl Default for LabelConfig {
    fn default() -> Self {
        LabelConfig { t_pos: default_t_pos(), t_unl: default_t_unl(), balance_ratio: default_balance_ratio(), seed: 0 }
    }
}

impl LabelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_unl < self.t_pos) {
            return Err(Error::Config(format!("t_unl ({}) must be strictly below t_pos ({})", self.t_unl, self.t_pos)));
        }
        if !(self.balance_ratio > 0.0 && self.balance_ratio.is_finite()) {
            return Err(Error::Config("balance_ratio must be a positive number".into()));
        }
        Ok(())
    }
}

/// Sum of IDF weights over word types shared by the two sentences.
pub fn align_score(source: &Sentence, target: &Sentence, idf: &IdfTable) -> f64 {
    let a = source.word_types();
    let b = target.word_types();
    a.intersection(&b).map(|t| idf.weight(t)).sum()
}

/// Best-matching summary sentence for `source`; ties go to the lower id.
pub fn best_alignment(source: &Sentence, summary: &[Sentence], idf: &IdfTable) -> Result<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, target) in summary.iter().enumerate() {
        let score = align_score(source, target, idf);
        if best.is_none_or(|(_, s)| score > s) {
            best = Some((i, score));
        }
    }
    best.ok_or_else(|| Error::InvalidInput("cannot align against an empty summary".into()))
}

pub fn label_by_alignment(doc: &Document, cfg: &LabelConfig, idf: &IdfTable) -> Result<Vec<WeakLabel>> {
    cfg.validate()?;
    let summary = match doc.summary.as_deref() {
        Some(s) if !s.is_empty() => s,
        _ => return Err(Error::MissingSummary(doc.doc_id.clone())),
    };
    doc.sentences
        .iter()
        .map(|s| {
            let (_, score) = best_alignment(s, summary, idf)?;
            let flag = if score > cfg.t_pos {
                LabelFlag::Positive
            } else if score <= cfg.t_unl {
                LabelFlag::Unlabeled
            } else {
                LabelFlag::Excluded
            };
            Ok(WeakLabel { doc_id: doc.doc_id.clone(), sentence_id: s.id, flag, align_score: Some(score) })
        })
        .collect()
}

pub fn label_by_extract(doc: &Document, extracts: &[Vec<usize>]) -> Result<Vec<WeakLabel>> {
    let n = doc.sentences.len();
    let mut chosen = BTreeSet::new();
    for &id in extracts.iter().flatten() {
        if id >= n {
            return Err(Error::ExtractOutOfRange { doc_id: doc.doc_id.clone(), id, len: n });
        }
        chosen.insert(id);
    }
    Ok(doc
        .sentences
        .iter()
        .map(|s| WeakLabel {
            doc_id: doc.doc_id.clone(),
            sentence_id: s.id,
            flag: if chosen.contains(&s.id) { LabelFlag::Positive } else { LabelFlag::Unlabeled },
            align_score: None,
        })
        .collect())
}

/// Extracts for a document: the explicit `extracts` when present, otherwise
/// the article sentences that reappear verbatim (up to case, spacing and
/// punctuation) in the summary, as a single extract.
pub fn document_extracts(doc: &Document) -> Vec<Vec<usize>> {
    if let Some(ex) = &doc.extracts {
        return ex.clone();
    }
    let key = |s: &Sentence| s.words().collect::<Vec<_>>().join(" ");
    let summary: BTreeSet<String> = doc.summary.iter().flatten().map(key).filter(|k| !k.is_empty()).collect();
    let ids: Vec<usize> = doc.sentences.iter().filter(|s| summary.contains(&key(s))).map(|s| s.id).collect();
    vec![ids]
}

/// Keep every positive and a seeded uniform sample of the unlabeled pool of
/// size `min(pool, round(balance_ratio × positives))`. Excluded labels are
/// dropped; input order is preserved.
pub fn sample_unlabeled(labels: &[WeakLabel], cfg: &LabelConfig) -> Vec<WeakLabel> {
    let positives = labels.iter().filter(|l| l.flag == LabelFlag::Positive).count();
    let pool: Vec<usize> =
        labels.iter().enumerate().filter(|(_, l)| l.flag == LabelFlag::Unlabeled).map(|(i, _)| i).collect();
    let target = ((cfg.balance_ratio * positives as f64).round() as usize).min(pool.len());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let keep: BTreeSet<usize> = index::sample(&mut rng, pool.len(), target).into_iter().map(|i| pool[i]).collect();
    labels
        .iter()
        .enumerate()
        .filter(|(i, l)| l.flag == LabelFlag::Positive || keep.contains(i))
        .map(|(_, l)| l.clone())
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct LabelCounts {
    pub positive: usize,
    pub unlabeled: usize,
    pub excluded: usize,
}

impl LabelCounts {
    pub fn of(labels: &[WeakLabel]) -> Self {
        let mut c = LabelCounts::default();
        for l in labels {
            match l.flag {
                LabelFlag::Positive => c.positive += 1,
                LabelFlag::Unlabeled => c.unlabeled += 1,
                LabelFlag::Excluded => c.excluded += 1,
            }
        }
        c
    }
}

pub fn write_labels<W: Write>(labels: &[WeakLabel], mut out: W) -> Result<()> {
    for l in labels {
        serde_json::to_writer(&mut out, l)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_labels<R: BufRead>(source: R) -> Result<Vec<WeakLabel>> {
    let mut out = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?);
    }
    Ok(out)
}
