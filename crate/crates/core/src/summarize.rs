//! Single-document extractive summarizers under a word budget.

use std::fmt;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{Document, Sentence};
use crate::error::{Error, Result};
use crate::features::FeatureExtractor;
use crate::pu::PuModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BudgetMode {
    /// Only whole sentences; the summary may fall short of the budget.
    WholeSentence,
    /// The sentence that overflows the budget is cut after the last word that fits.
    TruncateWords,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryBudget {
    pub max_words: usize,
    pub mode: BudgetMode,
}

impl SummaryBudget {
    pub fn new(max_words: usize, mode: BudgetMode) -> Result<Self> {
        if max_words == 0 {
            return Err(Error::Config("max_words must be at least 1".into()));
        }
        Ok(SummaryBudget { max_words, mode })
    }

    pub fn whole(max_words: usize) -> Result<Self> {
        Self::new(max_words, BudgetMode::WholeSentence)
    }

    pub fn truncate(max_words: usize) -> Result<Self> {
        Self::new(max_words, BudgetMode::TruncateWords)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum System {
    InfoRank,
    InfoFilter,
    LeadWords,
    RandomRank,
}

impl System {
    pub const ALL: [System; 4] = [System::InfoRank, System::InfoFilter, System::LeadWords, System::RandomRank];

    pub fn name(self) -> &'static str {
        match self {
            System::InfoRank => "inforank",
            System::InfoFilter => "infofilter",
            System::LeadWords => "leadwords",
            System::RandomRank => "randomrank",
        }
    }

    pub fn needs_model(self) -> bool {
        matches!(self, System::InfoRank | System::InfoFilter)
    }

    /// LeadWords cuts mid-sentence; the ranking systems keep whole sentences.
    pub fn default_mode(self) -> BudgetMode {
        match self {
            System::LeadWords => BudgetMode::TruncateWords,
            _ => BudgetMode::WholeSentence,
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for System {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        System::ALL
            .into_iter()
            .find(|sys| sys.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown system `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryResult {
    pub doc_id: String,
    pub system: System,
    /// Sentence ids in document order.
    pub selected: Vec<usize>,
    /// Sentences InfoFilter dropped as unimportant before it stopped.
    pub removed: Vec<usize>,
    pub text: String,
    pub word_total: usize,
    /// InfoFilter found no important sentence and fell back to the lead.
    pub fallback: bool,
}

/// Sentence importance source for the model-based summarizers.
pub trait SentenceScorer {
    fn probability(&self, sentence: &Sentence) -> Result<f64>;

    fn is_important(&self, sentence: &Sentence) -> Result<bool> {
        Ok(self.probability(sentence)? >= 0.5)
    }
}

/// A trained model paired with the extractor for its layout.
#[derive(Debug, Clone)]
pub struct Detector {
    model: PuModel,
    extractor: FeatureExtractor,
}

impl Detector {
    pub fn new(model: PuModel, extractor: FeatureExtractor) -> Result<Self> {
        if model.layout_hash() != extractor.layout_hash() {
            return Err(Error::LayoutMismatch {
                expected: model.layout_hash().to_string(),
                found: extractor.layout_hash().to_string(),
            });
        }
        Ok(Detector { model, extractor })
    }

    pub fn model(&self) -> &PuModel {
        &self.model
    }
}

impl SentenceScorer for Detector {
    /// Sentences without words score 0.
    fn probability(&self, sentence: &Sentence) -> Result<f64> {
        if sentence.word_count() == 0 {
            return Ok(0.0);
        }
        self.model.predict_prob(&self.extractor.extract(sentence)?)
    }
}

/// Fixed per-sentence probabilities, indexed by sentence id.
#[derive(Debug, Clone)]
pub struct FixedScores(pub Vec<f64>);

impl SentenceScorer for FixedScores {
    fn probability(&self, sentence: &Sentence) -> Result<f64> {
        self.0
            .get(sentence.id)
            .copied()
            .ok_or_else(|| Error::InvalidInput(format!("no score for sentence {}", sentence.id)))
    }
}

pub fn score_document(doc: &Document, scorer: &dyn SentenceScorer) -> Result<Vec<f64>> {
    doc.sentences.iter().map(|s| scorer.probability(s)).collect()
}

/// A chosen sentence and how many of its words are used.
#[derive(Debug, Clone, Copy)]
struct Pick {
    id: usize,
    take: usize,
}

fn assemble(
    doc: &Document,
    system: System,
    mut picks: Vec<Pick>,
    removed: Vec<usize>,
    fallback: bool,
) -> SummaryResult {
    picks.sort_by_key(|p| p.id);
    let mut parts = Vec::with_capacity(picks.len());
    for p in &picks {
        let s = &doc.sentences[p.id];
        parts.push(if p.take == s.word_count() { s.text.as_str() } else { s.prefix_words(p.take) });
    }
    SummaryResult {
        doc_id: doc.doc_id.clone(),
        system,
        selected: picks.iter().map(|p| p.id).collect(),
        removed,
        text: parts.join(" "),
        word_total: picks.iter().map(|p| p.take).sum(),
        fallback,
    }
}

/// Greedy fill in `order`: whole sentences that fit are taken, oversized ones
/// are skipped (whole-sentence mode) or cut to the remaining budget, which
/// ends the fill (truncate mode).
fn greedy_fill(doc: &Document, order: &[usize], budget: SummaryBudget) -> Vec<Pick> {
    let mut picks = Vec::new();
    let mut used = 0;
    for &id in order {
        let n = doc.sentences[id].word_count();
        if n == 0 {
            continue;
        }
        if used + n <= budget.max_words {
            picks.push(Pick { id, take: n });
            used += n;
        } else if budget.mode == BudgetMode::TruncateWords {
            let room = budget.max_words - used;
            if room > 0 {
                picks.push(Pick { id, take: room });
            }
            break;
        }
        if used == budget.max_words {
            break;
        }
    }
    picks
}

/// Document-order fill that stops at the first sentence that does not fit.
fn prefix_fill(doc: &Document, budget: SummaryBudget) -> Vec<Pick> {
    let mut picks = Vec::new();
    let mut used = 0;
    for id in 0..doc.sentences.len() {
        let n = doc.sentences[id].word_count();
        if n == 0 {
            continue;
        }
        if used + n > budget.max_words {
            let room = budget.max_words - used;
            if budget.mode == BudgetMode::TruncateWords && room > 0 {
                picks.push(Pick { id, take: room });
            }
            break;
        }
        picks.push(Pick { id, take: n });
        used += n;
    }
    picks
}

/// The opening words of the document.
pub fn lead_words(doc: &Document, budget: SummaryBudget) -> SummaryResult {
    let picks = prefix_fill(doc, budget);
    assemble(doc, System::LeadWords, picks, Vec::new(), false)
}

/// Sentences by descending probability (ties to the lower id), greedily
/// filling the budget.
pub fn info_rank_from_probs(doc: &Document, probs: &[f64], budget: SummaryBudget) -> Result<SummaryResult> {
    if probs.len() != doc.sentences.len() {
        return Err(Error::LengthMismatch(doc.sentences.len(), probs.len()));
    }
    if let Some(p) = probs.iter().find(|p| p.is_nan()) {
        return Err(Error::InvalidInput(format!("probability {p} is not a number")));
    }
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| probs[b].total_cmp(&probs[a]).then(a.cmp(&b)));
    Ok(assemble(doc, System::InfoRank, greedy_fill(doc, &order, budget), Vec::new(), false))
}

pub fn info_rank(doc: &Document, scorer: &dyn SentenceScorer, budget: SummaryBudget) -> Result<SummaryResult> {
    info_rank_from_probs(doc, &score_document(doc, scorer)?, budget)
}

/// The lead with unimportant sentences skipped. Falls back to
/// [`lead_words`] when no sentence is important.
pub fn info_filter_from_labels(doc: &Document, important: &[bool], budget: SummaryBudget) -> Result<SummaryResult> {
    if important.len() != doc.sentences.len() {
        return Err(Error::LengthMismatch(doc.sentences.len(), important.len()));
    }
    let any_important = doc.sentences.iter().any(|s| important[s.id] && s.word_count() > 0);
    if !any_important {
        let lead = lead_words(doc, budget);
        return Ok(SummaryResult { system: System::InfoFilter, fallback: true, ..lead });
    }
    let mut picks = Vec::new();
    let mut removed = Vec::new();
    let mut used = 0;
    for (id, s) in doc.sentences.iter().enumerate() {
        let n = s.word_count();
        if n == 0 {
            continue;
        }
        if !important[id] {
            removed.push(id);
            continue;
        }
        if used + n > budget.max_words {
            let room = budget.max_words - used;
            if budget.mode == BudgetMode::TruncateWords && room > 0 {
                picks.push(Pick { id, take: room });
            }
            break;
        }
        picks.push(Pick { id, take: n });
        used += n;
    }
    Ok(assemble(doc, System::InfoFilter, picks, removed, false))
}

pub fn info_filter(doc: &Document, scorer: &dyn SentenceScorer, budget: SummaryBudget) -> Result<SummaryResult> {
    let important: Vec<bool> = doc.sentences.iter().map(|s| scorer.is_important(s)).collect::<Result<_>>()?;
    info_filter_from_labels(doc, &important, budget)
}

/// A seeded uniform permutation, then the InfoRank fill.
pub fn random_rank(doc: &Document, budget: SummaryBudget, seed: u64) -> SummaryResult {
    let mut order: Vec<usize> = (0..doc.sentences.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    assemble(doc, System::RandomRank, greedy_fill(doc, &order, budget), Vec::new(), false)
}

/// Per-document seed derived from a run seed and the document id.
pub fn document_seed(seed: u64, doc_id: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(doc_id.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

pub fn write_summaries<W: Write>(results: &[SummaryResult], mut out: W) -> Result<()> {
    for r in results {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_summaries<R: BufRead>(source: R) -> Result<Vec<SummaryResult>> {
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

#[cfg(test)]
mod tests {
    use super::*;

    fn words(n: usize, tag: &str) -> String {
        (0..n).map(|i| format!("{tag}{i}")).collect::<Vec<_>>().join(" ") + "."
    }

    fn doc(lengths: &[usize]) -> Document {
        let texts: Vec<String> = lengths.iter().enumerate().map(|(i, &n)| words(n, &format!("s{i}w"))).collect();
        let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
        Document::new("d", "", &refs, None).unwrap()
    }

    #[test]
    fn lead_short_document_is_whole() {
        let d = doc(&[20, 30]);
        let r = lead_words(&d, SummaryBudget::truncate(100).unwrap());
        assert_eq!(r.selected, vec![0, 1]);
        assert_eq!(r.word_total, 50);
        assert_eq!(r.text, format!("{} {}", d.sentences[0].text, d.sentences[1].text));
    }

    #[test]
    fn lead_cuts_mid_sentence() {
        let d = doc(&[60, 60]);
        let r = lead_words(&d, SummaryBudget::truncate(100).unwrap());
        assert_eq!(r.selected, vec![0, 1]);
        assert_eq!(r.word_total, 100);
        assert!(r.text.ends_with("s1w39"));
    }

    #[test]
    fn lead_budget_one() {
        let d = doc(&[5, 5]);
        let r = lead_words(&d, SummaryBudget::truncate(1).unwrap());
        assert_eq!(r.text, "s0w0");
        assert_eq!(r.word_total, 1);
    }

    #[test]
    fn info_rank_ties_take_the_lead() {
        let d = doc(&[30, 30, 30, 30]);
        let r = info_rank_from_probs(&d, &[0.5; 4], SummaryBudget::whole(100).unwrap()).unwrap();
        assert_eq!(r.selected, vec![0, 1, 2]);
    }

    #[test]
    fn info_rank_skips_oversized_sentence() {
        let d = doc(&[80, 30, 15]);
        let r = info_rank_from_probs(&d, &[0.9, 0.8, 0.7], SummaryBudget::whole(100).unwrap()).unwrap();
        assert_eq!(r.selected, vec![0, 2]);
        assert_eq!(r.word_total, 95);
    }

    #[test]
    fn info_rank_budget_below_every_sentence() {
        let d = doc(&[10, 12]);
        let r = info_rank_from_probs(&d, &[0.9, 0.1], SummaryBudget::whole(5).unwrap()).unwrap();
        assert!(r.selected.is_empty());
        assert_eq!(r.text, "");
    }

    #[test]
    fn info_filter_all_important_is_lead() {
        let d = doc(&[30, 40, 50]);
        let budget = SummaryBudget::whole(100).unwrap();
        let r = info_filter_from_labels(&d, &[true; 3], budget).unwrap();
        let lead = lead_words(&d, budget);
        assert_eq!(r.selected, vec![0, 1]);
        assert_eq!(r.text, lead.text);
        assert!(r.removed.is_empty());
    }

    #[test]
    fn info_filter_drops_unimportant_opening() {
        let texts = [
            "This time, they insist, it is different.",
            "Lawmakers approved the budget on Tuesday.",
            "The vote followed weeks of negotiation.",
        ];
        let d = Document::new("t5", "", &texts, None).unwrap();
        let r = info_filter_from_labels(&d, &[false, true, true], SummaryBudget::whole(100).unwrap()).unwrap();
        assert_eq!(r.selected, vec![1, 2]);
        assert_eq!(r.removed, vec![0]);
        assert!(r.text.starts_with("Lawmakers"));
        assert!(!r.fallback);
    }

    #[test]
    fn info_filter_stops_at_first_misfit() {
        let d = doc(&[40, 10, 70, 10]);
        let r = info_filter_from_labels(&d, &[true, false, true, true], SummaryBudget::whole(100).unwrap()).unwrap();
        assert_eq!(r.selected, vec![0]);
        assert_eq!(r.removed, vec![1]);
    }

    #[test]
    fn info_filter_falls_back_to_lead() {
        let d = doc(&[30, 30]);
        let budget = SummaryBudget::whole(100).unwrap();
        let r = info_filter_from_labels(&d, &[false, false], budget).unwrap();
        assert!(r.fallback);
        assert_eq!(r.system, System::InfoFilter);
        assert_eq!(r.text, lead_words(&d, budget).text);
    }

    #[test]
    fn random_rank_is_seeded() {
        let d = doc(&[10, 20, 30, 40, 50]);
        let budget = SummaryBudget::whole(60).unwrap();
        assert_eq!(random_rank(&d, budget, 9), random_rank(&d, budget, 9));
        let single = doc(&[12]);
        assert_eq!(random_rank(&single, budget, 3).selected, vec![0]);
    }

    #[test]
    fn random_rank_first_pick_is_uniform() {
        // budget fits exactly one sentence, so the first ranked sentence is the pick
        let d = doc(&[10, 10, 10, 10]);
        let budget = SummaryBudget::whole(10).unwrap();
        let trials = 4000;
        let mut counts = [0usize; 4];
        for seed in 0..trials {
            counts[random_rank(&d, budget, seed).selected[0]] += 1;
        }
        let expected = trials as f64 / 4.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 0.999 quantile of chi-square with 3 degrees of freedom
        assert!(chi2 < 16.266, "chi2 = {chi2}, counts = {counts:?}");
    }

    #[test]
    fn document_seed_depends_on_both_inputs() {
        assert_eq!(document_seed(1, "a"), document_seed(1, "a"));
        assert_ne!(document_seed(1, "a"), document_seed(2, "a"));
        assert_ne!(document_seed(1, "a"), document_seed(1, "b"));
    }

    #[test]
    fn summaries_round_trip_jsonl() {
        let d = doc(&[5, 6]);
        let rs = vec![lead_words(&d, SummaryBudget::truncate(8).unwrap())];
        let mut buf = Vec::new();
        write_summaries(&rs, &mut buf).unwrap();
        let line = String::from_utf8(buf.clone()).unwrap();
        assert!(line.contains("\"system\":\"leadwords\""));
        assert_eq!(read_summaries(buf.as_slice()).unwrap(), rs);
    }
}
