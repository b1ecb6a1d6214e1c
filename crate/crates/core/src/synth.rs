//! Synthetic data: Gaussian PU samples with a planted label frequency, and a
//! small document/summary corpus with matching lexicons and annotator votes.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::eval::GoldVotes;
use crate::pu::PuExample;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPuConfig {
    pub n: usize,
    pub dim: usize,
    /// Distance between the class means, in units of the (unit) standard deviation.
    pub separation: f64,
    /// Share of true positives.
    pub prior: f64,
    /// Probability that a true positive carries a label.
    pub c: f64,
}

impl Default for GaussianPuConfig {
    fn default() -> Self {
        GaussianPuConfig { n: 2000, dim: 10, separation: 6.0, prior: 0.5, c: 0.7 }
    }
}

#[derive(Debug, Clone)]
pub struct GaussianPu {
    pub examples: Vec<PuExample>,
    /// True class of each example.
    pub truth: Vec<bool>,
}

/// Two isotropic unit Gaussians whose means sit at `±separation/2` along the
/// diagonal; positives are labeled independently with probability `c`.
pub fn gaussian_pu(cfg: &GaussianPuConfig, seed: u64) -> GaussianPu {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift = cfg.separation / 2.0 / (cfg.dim as f64).sqrt();
    let mut examples = Vec::with_capacity(cfg.n);
    let mut truth = Vec::with_capacity(cfg.n);
    for _ in 0..cfg.n {
        let y = rng.random::<f64>() < cfg.prior;
        let mu = if y { shift } else { -shift };
        let features = (0..cfg.dim)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                mu + z
            })
            .collect::<Vec<f64>>();
        let labeled = y && rng.random::<f64>() < cfg.c;
        examples.push(PuExample { features, labeled });
        truth.push(y);
    }
    GaussianPu { examples, truth }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub train_docs: usize,
    pub test_docs: usize,
    pub min_sentences: usize,
    pub max_sentences: usize,
    /// Share of article sentences that are truly important.
    pub important_rate: f64,
    /// Probability that an important sentence is paraphrased in the summary.
    pub summary_rate: f64,
    pub annotators: usize,
    /// Probability that an annotator flips the true label.
    pub annotator_noise: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            train_docs: 80,
            test_docs: 30,
            min_sentences: 8,
            max_sentences: 14,
            important_rate: 0.35,
            summary_rate: 0.8,
            annotators: 3,
            annotator_noise: 0.1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub train: Vec<Document>,
    pub test: Vec<Document>,
    /// Scored lexicon file text.
    pub scored: String,
    /// `(name, file text)` for each category lexicon.
    pub categories: Vec<(String, String)>,
    /// Votes for every test sentence.
    pub gold: Vec<GoldVotes>,
    /// True importance per document, train then test.
    pub truth: Vec<Vec<bool>>,
}

const SYLLABLES: [&str; 16] =
    ["ka", "lo", "mi", "ra", "te", "su", "no", "vi", "pe", "da", "ri", "go", "ba", "fe", "hu", "ne"];
const FUNCTION_WORDS: [&str; 16] =
    ["the", "a", "of", "and", "to", "in", "that", "was", "for", "on", "with", "as", "by", "it", "at", "from"];
const CONTENT_WORDS: usize = 480;
const FILLER_WORDS: usize = 160;
const TOPIC_SIZE: usize = 24;
pub const SCORED_ATTRIBUTES: [&str; 6] = ["fam", "conc", "imag", "meanc", "meanp", "aoa"];
const LIWC_CATEGORIES: [&str; 8] = ["funct", "percept", "work", "money", "social", "cogmech", "tentat", "time"];
const INQUIRER_CATEGORIES: [&str; 6] = ["positiv", "negativ", "strong", "weak", "active", "passive"];

/// Content words: three syllables. Filler words: `zu` plus two syllables.
fn content_word(i: usize) -> String {
    let s = &SYLLABLES;
    format!("{}{}{}", s[i % 16], s[(i / 16) % 16], s[(i / 256 + i) % 16])
}

fn filler_word(i: usize) -> String {
    format!("zu{}{}", SYLLABLES[i % 16], SYLLABLES[(i / 16) % 16])
}

fn sentence_text(words: &[String]) -> String {
    let mut text = String::new();
    for (i, w) in words.iter().enumerate() {
        if i == 0 {
            let mut c = w.chars();
            if let Some(f) = c.next() {
                text.extend(f.to_uppercase());
                text.push_str(c.as_str());
            }
        } else {
            text.push(' ');
            text.push_str(w);
        }
    }
    text.push('.');
    text
}

fn function_word(rng: &mut ChaCha8Rng) -> String {
    FUNCTION_WORDS.choose(rng).expect("non-empty").to_string()
}

struct DocParts {
    sentences: Vec<String>,
    summary: Vec<String>,
    important: Vec<bool>,
}

fn make_document(cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> DocParts {
    let topic: Vec<usize> = rand::seq::index::sample(rng, CONTENT_WORDS, TOPIC_SIZE).into_vec();
    let n = rng.random_range(cfg.min_sentences..=cfg.max_sentences);
    let mut important: Vec<bool> = (0..n).map(|_| rng.random::<f64>() < cfg.important_rate).collect();
    if !important.iter().any(|&b| b) {
        important[rng.random_range(0..n)] = true;
    }
    let mut sentences = Vec::with_capacity(n);
    let mut summary = Vec::new();
    for &imp in &important {
        let len = rng.random_range(8..=20);
        let mut words = Vec::with_capacity(len);
        let mut content = Vec::new();
        for _ in 0..len {
            let w = if imp && rng.random::<f64>() < 0.6 {
                let idx = if rng.random::<f64>() < 0.8 {
                    *topic.choose(rng).expect("non-empty topic")
                } else {
                    rng.random_range(0..CONTENT_WORDS)
                };
                let w = content_word(idx);
                content.push(w.clone());
                w
            } else if !imp && rng.random::<f64>() < 0.5 {
                if rng.random::<f64>() < 0.1 {
                    content_word(*topic.choose(rng).expect("non-empty topic"))
                } else {
                    filler_word(rng.random_range(0..FILLER_WORDS))
                }
            } else {
                function_word(rng)
            };
            words.push(w);
        }
        sentences.push(sentence_text(&words));
        if imp && rng.random::<f64>() < cfg.summary_rate {
            let mut kept: Vec<String> = content.into_iter().filter(|_| rng.random::<f64>() < 0.75).collect();
            if kept.is_empty() {
                kept.push(content_word(topic[0]));
            }
            for _ in 0..rng.random_range(2..=4) {
                let at = rng.random_range(0..=kept.len());
                kept.insert(at, function_word(rng));
            }
            summary.push(sentence_text(&kept));
        }
    }
    if summary.is_empty() {
        // a summary always exists; fall back to a topic-word headline
        let words: Vec<String> = topic[..4].iter().map(|&i| content_word(i)).collect();
        summary.push(sentence_text(&words));
    }
    DocParts { sentences, summary, important }
}

fn build_documents(
    prefix: &str,
    count: usize,
    cfg: &SynthConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<Document>, Vec<Vec<bool>>)> {
    let mut docs = Vec::with_capacity(count);
    let mut truth = Vec::with_capacity(count);
    for i in 0..count {
        let parts = make_document(cfg, rng);
        let sents: Vec<&str> = parts.sentences.iter().map(String::as_str).collect();
        let summ: Vec<&str> = parts.summary.iter().map(String::as_str).collect();
        docs.push(Document::new(format!("{prefix}{i:04}"), "synthetic", &sents, Some(&summ))?);
        truth.push(parts.important);
    }
    Ok((docs, truth))
}

fn clamp_score(rng: &mut ChaCha8Rng, mean: f64) -> f64 {
    let d = Normal::new(mean, 60.0).expect("valid normal");
    d.sample(rng).clamp(100.0, 700.0).round()
}

fn scored_lexicon(rng: &mut ChaCha8Rng) -> String {
    let mut out = format!("#scored mrc {}", SCORED_ATTRIBUTES.join(","));
    for a in SCORED_ATTRIBUTES {
        let _ = write!(out, " {a}:100:700");
    }
    out.push('\n');
    let mut rows = |word: &str, means: [f64; 6], coverage: f64, rng: &mut ChaCha8Rng| {
        for (attr, mean) in SCORED_ATTRIBUTES.iter().zip(means) {
            if rng.random::<f64>() < coverage {
                let score = clamp_score(rng, mean);
                let _ = writeln!(out, "{word}\t{attr}\t{score}");
            }
        }
    };
    for w in FUNCTION_WORDS {
        rows(w, [650.0, 250.0, 230.0, 300.0, 280.0, 200.0], 1.0, rng);
    }
    for i in 0..CONTENT_WORDS {
        rows(&content_word(i), [420.0, 540.0, 560.0, 500.0, 520.0, 380.0], 0.85, rng);
    }
    for i in 0..FILLER_WORDS {
        rows(&filler_word(i), [520.0, 300.0, 320.0, 360.0, 340.0, 300.0], 0.85, rng);
    }
    out
}

fn category_lexicon(
    name: &str,
    cats: &[&str],
    rng: &mut ChaCha8Rng,
    content: &[usize],
    filler: &[usize],
    function: &[usize],
) -> String {
    let mut out = format!("#categories {name} {}\n", cats.join(","));
    let pick = |pool: &[usize], rng: &mut ChaCha8Rng| -> String {
        let k = rng.random_range(1..=2.min(pool.len()));
        let mut chosen: Vec<&str> = pool.choose_multiple(rng, k).map(|&i| cats[i]).collect();
        chosen.sort_unstable();
        chosen.join(",")
    };
    for w in FUNCTION_WORDS {
        let _ = writeln!(out, "{w}\t{}", pick(function, rng));
    }
    for i in 0..CONTENT_WORDS {
        if rng.random::<f64>() < 0.8 {
            let _ = writeln!(out, "{}\t{}", content_word(i), pick(content, rng));
        }
    }
    // filler words share a prefix; one wildcard row per second syllable
    for s in SYLLABLES {
        let _ = writeln!(out, "zu{s}*\t{}", pick(filler, rng));
    }
    out
}

impl SynthCorpus {
    pub fn generate(cfg: &SynthConfig, seed: u64) -> Result<Self> {
        if cfg.min_sentences == 0 || cfg.min_sentences > cfg.max_sentences {
            return Err(Error::Config("need 1 ≤ min_sentences ≤ max_sentences".into()));
        }
        if cfg.annotators.is_multiple_of(2) {
            return Err(Error::Config("annotators must be odd".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (train, mut truth) = build_documents("train-", cfg.train_docs, cfg, &mut rng)?;
        let (test, test_truth) = build_documents("test-", cfg.test_docs, cfg, &mut rng)?;

        let mut gold = Vec::new();
        for (doc, flags) in test.iter().zip(&test_truth) {
            for (id, &y) in flags.iter().enumerate() {
                let votes = (0..cfg.annotators).map(|_| y != (rng.random::<f64>() < cfg.annotator_noise)).collect();
                gold.push(GoldVotes { doc_id: doc.doc_id.clone(), sentence_id: id, votes });
            }
        }
        truth.extend(test_truth);

        let scored = scored_lexicon(&mut rng);
        let liwc = category_lexicon("liwc", &LIWC_CATEGORIES, &mut rng, &[1, 2, 3, 4], &[5, 6], &[0, 7]);
        let inquirer = category_lexicon("inquirer", &INQUIRER_CATEGORIES, &mut rng, &[0, 2, 4], &[1, 3, 5], &[3, 5]);
        Ok(SynthCorpus {
            train,
            test,
            scored,
            categories: vec![("liwc".into(), liwc), ("inquirer".into(), inquirer)],
            gold,
            truth,
        })
    }

    /// Every word type the generator can emit.
    pub fn vocabulary() -> BTreeSet<String> {
        let mut v: BTreeSet<String> = FUNCTION_WORDS.iter().map(|w| w.to_string()).collect();
        v.extend((0..CONTENT_WORDS).map(content_word));
        v.extend((0..FILLER_WORDS).map(filler_word));
        v
    }
}
