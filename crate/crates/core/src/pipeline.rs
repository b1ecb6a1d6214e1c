//! The configuration-driven pipeline behind the command-line tool.
//!
//! A run is described by one JSON [`RunConfig`]. Relative paths in it are
//! resolved against the directory holding the config file. Each command
//! writes its artifacts under `output_dir` together with a copy of the
//! resolved configuration, and every artifact is a pure function of the
//! configuration, the input files and the seed.

use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use log::info;
use serde::{Deserialize, Serialize};

use crate::corpus::{parse_corpus, Corpus, Document};
use crate::error::{Error, Result};
use crate::eval::report::{render_table, DocumentRouge, EvalReport, PairedTest, SystemRouge};
use crate::eval::{
    classification_report, majority_vote, mcnemar, read_gold, rouge_n, wilcoxon_signed_rank, write_gold, McNemarMode,
    WilcoxonMode,
};
use crate::features::{bow_vocabulary, FeatureExtractor, FeatureMode};
use crate::lexicons::{CategoryLexicon, ScoredLexicon, DEFAULT_BINS};
use crate::pu::{train_pu, PuExample, PuModel, TrainConfig, TrainReport};
use crate::summarize::{
    document_seed, info_filter, info_rank, lead_words, random_rank, read_summaries, write_summaries, BudgetMode,
    Detector, SentenceScorer, SummaryBudget, SummaryResult, System,
};
use crate::synth::{SynthConfig, SynthCorpus};
use crate::weak_label::{
    document_extracts, label_by_alignment, label_by_extract, read_labels, sample_unlabeled, write_labels, LabelConfig,
    LabelCounts, LabelFlag, LabelMode, WeakLabel,
};

pub const RESOLVED_CONFIG: &str = "resolved_config.json";
pub const LABELS_FILE: &str = "labels.jsonl";
pub const MODEL_FILE: &str = "model.json";
pub const TRAIN_REPORT_FILE: &str = "train_report.json";
pub const PREDICTIONS_FILE: &str = "predictions.jsonl";
pub const SUMMARIES_DIR: &str = "summaries";
pub const REPORT_FILE: &str = "report.json";
pub const REPORT_TABLE_FILE: &str = "report.txt";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LabelSection {
    pub mode: LabelMode,
    pub t_pos: f64,
    pub t_unl: f64,
    pub balance_ratio: f64,
    /// Seed for unlabeled subsampling; the run seed when absent.
    pub seed: Option<u64>,
}

impl Default for LabelSection {
    fn default() -> Self {
        let d = LabelConfig::default();
        LabelSection {
            mode: LabelMode::Alignment,
            t_pos: d.t_pos,
            t_unl: d.t_unl,
            balance_ratio: d.balance_ratio,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LexiconPaths {
    pub scored: Vec<PathBuf>,
    pub categories: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureSection {
    pub mode: FeatureMode,
    pub bins: usize,
    pub bow_min_df: usize,
}

impl Default for FeatureSection {
    fn default() -> Self {
        FeatureSection { mode: FeatureMode::Dictionary, bins: DEFAULT_BINS, bow_min_df: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BudgetSection {
    pub max_words: usize,
    /// Applies to every system when set; otherwise LeadWords truncates and
    /// the ranking systems keep whole sentences.
    pub mode: Option<BudgetMode>,
}

impl Default for BudgetSection {
    fn default() -> Self {
        BudgetSection { max_words: 100, mode: None }
    }
}

impl BudgetSection {
    pub fn for_system(&self, system: System) -> Result<SummaryBudget> {
        SummaryBudget::new(self.max_words, self.mode.unwrap_or_else(|| system.default_mode()))
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_systems() -> Vec<System> {
    System::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub train_corpus: PathBuf,
    #[serde(default)]
    pub test_corpus: Option<PathBuf>,
    #[serde(default)]
    pub gold: Option<PathBuf>,
    #[serde(default)]
    pub lexicons: LexiconPaths,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub label: LabelSection,
    #[serde(default)]
    pub features: FeatureSection,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub budget: BudgetSection,
    #[serde(default = "default_systems")]
    pub systems: Vec<System>,
    /// System pairs compared with the Wilcoxon test; by default each model
    /// system against each baseline.
    #[serde(default)]
    pub pairs: Option<Vec<(System, System)>>,
}

/// Command-line overrides applied on top of a loaded config.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub label_mode: Option<LabelMode>,
    pub t_pos: Option<f64>,
    pub t_unl: Option<f64>,
    pub balance_ratio: Option<f64>,
    pub feature_mode: Option<FeatureMode>,
    pub bins: Option<usize>,
    pub l2: Option<f64>,
    pub epochs: Option<usize>,
    pub max_words: Option<usize>,
    pub budget_mode: Option<BudgetMode>,
    pub systems: Option<Vec<System>>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = &o.output_dir {
            self.output_dir = v.clone();
        }
        if let Some(v) = o.label_mode {
            self.label.mode = v;
        }
        if let Some(v) = o.t_pos {
            self.label.t_pos = v;
        }
        if let Some(v) = o.t_unl {
            self.label.t_unl = v;
        }
        if let Some(v) = o.balance_ratio {
            self.label.balance_ratio = v;
        }
        if let Some(v) = o.feature_mode {
            self.features.mode = v;
        }
        if let Some(v) = o.bins {
            self.features.bins = v;
        }
        if let Some(v) = o.l2 {
            self.train.l2 = v;
            self.train.stage2_l2 = v;
        }
        if let Some(v) = o.epochs {
            self.train.epochs = v;
            self.train.stage2_epochs = v;
        }
        if let Some(v) = o.max_words {
            self.budget.max_words = v;
        }
        if let Some(v) = o.budget_mode {
            self.budget.mode = Some(v);
        }
        if let Some(v) = &o.systems {
            self.systems = v.clone();
        }
    }

    /// Copy with defaults made explicit.
    pub fn resolved(&self) -> RunConfig {
        let mut c = self.clone();
        c.label.seed = Some(self.label_config().seed);
        if c.pairs.is_none() {
            c.pairs = Some(self.comparison_pairs());
        }
        c
    }

    pub fn label_config(&self) -> LabelConfig {
        LabelConfig {
            t_pos: self.label.t_pos,
            t_unl: self.label.t_unl,
            balance_ratio: self.label.balance_ratio,
            seed: self.label.seed.unwrap_or(self.seed),
        }
    }

    pub fn comparison_pairs(&self) -> Vec<(System, System)> {
        if let Some(p) = &self.pairs {
            return p.clone();
        }
        let mut pairs = Vec::new();
        for &a in self.systems.iter().filter(|s| s.needs_model()) {
            for &b in self.systems.iter().filter(|s| !s.needs_model()) {
                pairs.push((a, b));
            }
        }
        pairs
    }
}

/// A loaded configuration bound to the directory its paths are relative to.
#[derive(Debug, Clone)]
pub struct Pipeline {
    config: RunConfig,
    base_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub doc_id: String,
    pub sentence_id: usize,
    pub probability: f64,
    pub important: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LabelSummary {
    /// Counts before unlabeled subsampling.
    pub all: LabelCounts,
    /// Counts in the written training labels.
    pub kept: LabelCounts,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, bytes)?;
    Ok(())
}

fn write_jsonl_with(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut out = BufWriter::new(File::create(path)?);
    f(&mut out)?;
    out.flush()?;
    Ok(())
}

impl Pipeline {
    pub fn new(config: RunConfig, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let p = Pipeline { config, base_dir: base_dir.into() };
        p.validate()?;
        Ok(p)
    }

    /// Load `path`, apply overrides and validate.
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut config = RunConfig::from_json(&text)?;
        config.apply(overrides);
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::new(config, base)
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        self.base_dir.join(p)
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.config.output_dir)
    }

    pub fn output(&self, name: &str) -> PathBuf {
        self.output_dir().join(name)
    }

    pub fn summaries_path(&self, system: System) -> PathBuf {
        self.output_dir().join(SUMMARIES_DIR).join(format!("{system}.jsonl"))
    }

    fn validate(&self) -> Result<()> {
        let c = &self.config;
        self.label_config().validate()?;
        c.train.validate()?;
        if c.budget.max_words == 0 {
            return Err(Error::Config("budget.max_words must be at least 1".into()));
        }
        if c.features.bins == 0 {
            return Err(Error::Config("features.bins must be at least 1".into()));
        }
        if c.features.mode == FeatureMode::Dense {
            return Err(Error::Config("feature mode `dense` has no text extractor".into()));
        }
        if c.systems.is_empty() {
            return Err(Error::Config("no systems selected".into()));
        }
        let mut paths: Vec<(&str, &PathBuf)> = vec![("train_corpus", &c.train_corpus)];
        paths.extend(c.test_corpus.iter().map(|p| ("test_corpus", p)));
        paths.extend(c.gold.iter().map(|p| ("gold", p)));
        paths.extend(c.lexicons.scored.iter().map(|p| ("lexicons.scored", p)));
        paths.extend(c.lexicons.categories.iter().map(|p| ("lexicons.categories", p)));
        for (field, p) in paths {
            let full = self.resolve(p);
            if !full.is_file() {
                return Err(Error::Config(format!("{field}: {} does not exist", full.display())));
            }
        }
        Ok(())
    }

    fn label_config(&self) -> LabelConfig {
        self.config.label_config()
    }

    fn write_resolved_config(&self) -> Result<()> {
        let mut text = serde_json::to_string_pretty(&self.config.resolved())?;
        text.push('\n');
        write_file(&self.output(RESOLVED_CONFIG), text.as_bytes())
    }

    pub fn train_corpus(&self) -> Result<Corpus> {
        parse_corpus(open(&self.resolve(&self.config.train_corpus))?)
    }

    pub fn test_corpus(&self) -> Result<Corpus> {
        let p = self
            .config
            .test_corpus
            .as_ref()
            .ok_or_else(|| Error::Config("test_corpus is required for this command".into()))?;
        parse_corpus(open(&self.resolve(p))?)
    }

    fn load_lexicons(&self) -> Result<(Vec<ScoredLexicon>, Vec<CategoryLexicon>)> {
        let mut scored = Vec::new();
        for p in &self.config.lexicons.scored {
            scored.push(ScoredLexicon::parse(open(&self.resolve(p))?)?.with_bins(self.config.features.bins)?);
        }
        let mut cats = Vec::new();
        for p in &self.config.lexicons.categories {
            cats.push(CategoryLexicon::parse(open(&self.resolve(p))?)?);
        }
        Ok((scored, cats))
    }

    /// Extractor for the configured feature mode; BOW uses the training vocabulary.
    pub fn extractor(&self, train: &Corpus) -> Result<FeatureExtractor> {
        match self.config.features.mode {
            FeatureMode::Bow => {
                FeatureExtractor::bow(bow_vocabulary(&train.documents, self.config.features.bow_min_df))
            }
            mode => {
                let (scored, cats) = self.load_lexicons()?;
                FeatureExtractor::dictionary(scored, cats, mode == FeatureMode::Dictionary)
            }
        }
    }

    /// Extractor that reproduces a trained model's layout.
    pub fn extractor_for(&self, model: &PuModel) -> Result<FeatureExtractor> {
        let (scored, cats) = match model.layout().mode {
            FeatureMode::Bow => (Vec::new(), Vec::new()),
            _ => self.load_lexicons()?,
        };
        FeatureExtractor::for_layout(model.layout(), scored, cats)
    }

    pub fn label_corpus(&self, corpus: &Corpus) -> Result<(Vec<WeakLabel>, LabelSummary)> {
        let cfg = self.label_config();
        let mut all = Vec::new();
        for doc in &corpus.documents {
            let labels = match self.config.label.mode {
                LabelMode::Alignment => label_by_alignment(doc, &cfg, &corpus.idf)?,
                LabelMode::Extract => label_by_extract(doc, &document_extracts(doc))?,
            };
            all.extend(labels);
        }
        let kept = sample_unlabeled(&all, &cfg);
        let summary = LabelSummary { all: LabelCounts::of(&all), kept: LabelCounts::of(&kept) };
        Ok((kept, summary))
    }

    pub fn cmd_label(&self) -> Result<LabelSummary> {
        self.write_resolved_config()?;
        let corpus = self.train_corpus()?;
        let (labels, summary) = self.label_corpus(&corpus)?;
        write_jsonl_with(&self.output(LABELS_FILE), |out| write_labels(&labels, out))?;
        info!(
            "labels: {} positive, {} unlabeled ({} kept), {} excluded",
            summary.all.positive, summary.all.unlabeled, summary.kept.unlabeled, summary.all.excluded
        );
        Ok(summary)
    }

    /// Feature rows for the labeled sentences; excluded labels and sentences
    /// without words are skipped.
    pub fn training_examples(
        &self,
        corpus: &Corpus,
        labels: &[WeakLabel],
        extractor: &FeatureExtractor,
    ) -> Result<Vec<PuExample>> {
        let docs: HashMap<&str, &Document> = corpus.documents.iter().map(|d| (d.doc_id.as_str(), d)).collect();
        let mut out = Vec::with_capacity(labels.len());
        for l in labels {
            if l.flag == LabelFlag::Excluded {
                continue;
            }
            let doc = docs
                .get(l.doc_id.as_str())
                .ok_or_else(|| Error::InvalidInput(format!("label refers to unknown document `{}`", l.doc_id)))?;
            let sentence = doc.sentences.get(l.sentence_id).ok_or_else(|| Error::ExtractOutOfRange {
                doc_id: l.doc_id.clone(),
                id: l.sentence_id,
                len: doc.sentences.len(),
            })?;
            if sentence.word_count() == 0 {
                continue;
            }
            let features = extractor.extract(sentence)?.values;
            out.push(PuExample { features, labeled: l.flag == LabelFlag::Positive });
        }
        Ok(out)
    }

    pub fn train_model(&self, corpus: &Corpus, labels: &[WeakLabel]) -> Result<(PuModel, TrainReport)> {
        let extractor = self.extractor(corpus)?;
        let examples = self.training_examples(corpus, labels, &extractor)?;
        train_pu(extractor.layout().clone(), &examples, &self.config.train, self.config.seed)
    }

    pub fn cmd_train(&self) -> Result<TrainReport> {
        self.write_resolved_config()?;
        let corpus = self.train_corpus()?;
        let labels_path = self.output(LABELS_FILE);
        if !labels_path.is_file() {
            return Err(Error::Config(format!("{} not found; run `label` first", labels_path.display())));
        }
        let labels = read_labels(open(&labels_path)?)?;
        let (model, report) = self.train_model(&corpus, &labels)?;
        model.save(&self.output(MODEL_FILE))?;
        let mut text = serde_json::to_string_pretty(&report)?;
        text.push('\n');
        write_file(&self.output(TRAIN_REPORT_FILE), text.as_bytes())?;
        info!(
            "trained on {} examples ({} positive, {} unlabeled); e = {:.6}; {} features",
            report.examples,
            report.positives,
            report.unlabeled,
            report.e,
            model.layout().total_dim
        );
        if let (Some(first), Some(last)) = (report.stage1_loss.first(), report.stage1_loss.last()) {
            info!("stage 1 loss {first:.6} -> {last:.6} over {} steps", report.stage1_loss.len());
        }
        if let (Some(first), Some(last)) = (report.stage2_loss.first(), report.stage2_loss.last()) {
            info!("stage 2 loss {first:.6} -> {last:.6} over {} steps", report.stage2_loss.len());
        }
        Ok(report)
    }

    pub fn load_model(&self) -> Result<PuModel> {
        let path = self.output(MODEL_FILE);
        if !path.is_file() {
            return Err(Error::Config(format!("{} not found; run `train` first", path.display())));
        }
        PuModel::load(&path)
    }

    pub fn detector(&self) -> Result<Detector> {
        let model = self.load_model()?;
        let extractor = self.extractor_for(&model)?;
        Detector::new(model, extractor)
    }

    pub fn predict_corpus(&self, detector: &Detector, corpus: &Corpus) -> Result<Vec<Prediction>> {
        let mut out = Vec::with_capacity(corpus.sentence_count());
        for doc in &corpus.documents {
            for s in &doc.sentences {
                let probability = detector.probability(s)?;
                out.push(Prediction {
                    doc_id: doc.doc_id.clone(),
                    sentence_id: s.id,
                    probability,
                    important: probability >= 0.5,
                });
            }
        }
        Ok(out)
    }

    pub fn cmd_predict(&self) -> Result<Vec<Prediction>> {
        self.write_resolved_config()?;
        let detector = self.detector()?;
        let corpus = self.test_corpus()?;
        let preds = self.predict_corpus(&detector, &corpus)?;
        write_jsonl_with(&self.output(PREDICTIONS_FILE), |out| {
            for p in &preds {
                serde_json::to_writer(&mut *out, p)?;
                out.write_all(b"\n")?;
            }
            Ok(())
        })?;
        let important = preds.iter().filter(|p| p.important).count();
        info!("predicted {} sentences, {} important", preds.len(), important);
        Ok(preds)
    }

    pub fn summarize_corpus(
        &self,
        system: System,
        corpus: &Corpus,
        detector: Option<&Detector>,
    ) -> Result<Vec<SummaryResult>> {
        let budget = self.config.budget.for_system(system)?;
        let need = || detector.ok_or_else(|| Error::Config(format!("{system} needs a trained model")));
        corpus
            .documents
            .iter()
            .map(|doc| match system {
                System::LeadWords => Ok(lead_words(doc, budget)),
                System::RandomRank => Ok(random_rank(doc, budget, document_seed(self.config.seed, &doc.doc_id))),
                System::InfoRank => info_rank(doc, need()?, budget),
                System::InfoFilter => info_filter(doc, need()?, budget),
            })
            .collect()
    }

    pub fn cmd_summarize(&self, systems: Option<&[System]>) -> Result<BTreeMap<System, Vec<SummaryResult>>> {
        self.write_resolved_config()?;
        let systems = systems.unwrap_or(&self.config.systems);
        let corpus = self.test_corpus()?;
        let detector = if systems.iter().any(|s| s.needs_model()) { Some(self.detector()?) } else { None };
        let mut out = BTreeMap::new();
        for &system in systems {
            let results = self.summarize_corpus(system, &corpus, detector.as_ref())?;
            write_jsonl_with(&self.summaries_path(system), |w| write_summaries(&results, w))?;
            if system == System::InfoFilter {
                let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
                for r in &results {
                    *hist.entry(r.removed.len()).or_default() += 1;
                }
                let fallbacks = results.iter().filter(|r| r.fallback).count();
                info!("infofilter removed-sentence histogram {hist:?}; {fallbacks} lead fallbacks");
            }
            info!("{system}: {} summaries", results.len());
            out.insert(system, results);
        }
        Ok(out)
    }

    fn gold_labels(&self, corpus: &Corpus) -> Result<Option<Vec<(String, usize, bool)>>> {
        let Some(path) = &self.config.gold else { return Ok(None) };
        let votes = read_gold(open(&self.resolve(path))?)?;
        let vote_sets: Vec<Vec<bool>> = votes.iter().map(|g| g.votes.clone()).collect();
        let majority = majority_vote(&vote_sets)?;
        for g in &votes {
            let ok = corpus.get(&g.doc_id).is_some_and(|d| g.sentence_id < d.sentences.len());
            if !ok {
                return Err(Error::InvalidInput(format!(
                    "gold refers to unknown sentence {}#{}",
                    g.doc_id, g.sentence_id
                )));
            }
        }
        Ok(Some(votes.into_iter().zip(majority).map(|(g, m)| (g.doc_id, g.sentence_id, m)).collect()))
    }

    fn predictions(&self, corpus: &Corpus) -> Result<Option<Vec<Prediction>>> {
        let path = self.output(PREDICTIONS_FILE);
        if path.is_file() {
            let mut out = Vec::new();
            for (i, line) in std::io::BufRead::lines(open(&path)?).enumerate() {
                let line = line?;
                if !line.trim().is_empty() {
                    out.push(
                        serde_json::from_str(&line)
                            .map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?,
                    );
                }
            }
            return Ok(Some(out));
        }
        if self.output(MODEL_FILE).is_file() {
            return Ok(Some(self.predict_corpus(&self.detector()?, corpus)?));
        }
        Ok(None)
    }

    pub fn evaluate(&self) -> Result<EvalReport> {
        let corpus = self.test_corpus()?;
        let mut report = EvalReport::default();

        if let Some(gold) = self.gold_labels(&corpus)? {
            let preds = self
                .predictions(&corpus)?
                .ok_or_else(|| Error::Config("gold labels given but no model or predictions to score".into()))?;
            let by_key: HashMap<(&str, usize), bool> =
                preds.iter().map(|p| ((p.doc_id.as_str(), p.sentence_id), p.important)).collect();
            let truth: Vec<bool> = gold.iter().map(|g| g.2).collect();
            let model: Vec<bool> = gold
                .iter()
                .map(|(d, s, _)| {
                    by_key
                        .get(&(d.as_str(), *s))
                        .copied()
                        .ok_or_else(|| Error::InvalidInput(format!("no prediction for sentence {d}#{s}")))
                })
                .collect::<Result<_>>()?;
            let baseline = vec![true; truth.len()];
            report.classification.insert("model".into(), classification_report(&model, &truth)?);
            report.classification.insert("all-positive".into(), classification_report(&baseline, &truth)?);
            report.mcnemar.push(PairedTest {
                a: "model".into(),
                b: "all-positive".into(),
                metric: "accuracy".into(),
                result: mcnemar(&model, &baseline, &truth, McNemarMode::ChiSquare)?,
            });
        }

        let refs: HashMap<&str, &Document> = corpus.documents.iter().map(|d| (d.doc_id.as_str(), d)).collect();
        for &system in &self.config.systems {
            let path = self.summaries_path(system);
            if !path.is_file() {
                continue;
            }
            let summaries = read_summaries(open(&path)?)?;
            let mut per_doc = Vec::with_capacity(summaries.len());
            for s in &summaries {
                let doc = refs
                    .get(s.doc_id.as_str())
                    .ok_or_else(|| Error::InvalidInput(format!("summary for unknown document `{}`", s.doc_id)))?;
                let reference = doc.summary.as_deref().ok_or_else(|| Error::MissingSummary(doc.doc_id.clone()))?;
                let candidate = [crate::corpus::Sentence::new(0, s.text.as_str())];
                per_doc.push(DocumentRouge {
                    doc_id: s.doc_id.clone(),
                    rouge1: rouge_n(reference, &candidate, 1)?,
                    rouge2: rouge_n(reference, &candidate, 2)?,
                });
            }
            per_doc.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
            report.rouge.insert(system.to_string(), SystemRouge::from_documents(per_doc));
        }

        for (a, b) in self.config.comparison_pairs() {
            let (Some(ra), Some(rb)) = (report.rouge.get(a.name()), report.rouge.get(b.name())) else { continue };
            let ids_a: Vec<&str> = ra.per_document.iter().map(|d| d.doc_id.as_str()).collect();
            let ids_b: Vec<&str> = rb.per_document.iter().map(|d| d.doc_id.as_str()).collect();
            if ids_a != ids_b {
                return Err(Error::InvalidInput(format!("{a} and {b} summarize different documents")));
            }
            for (metric, get) in [
                ("rouge1_recall", (|d: &DocumentRouge| d.rouge1.recall) as fn(&DocumentRouge) -> f64),
                ("rouge2_recall", |d: &DocumentRouge| d.rouge2.recall),
            ] {
                let x: Vec<f64> = ra.per_document.iter().map(get).collect();
                let y: Vec<f64> = rb.per_document.iter().map(get).collect();
                report.wilcoxon.push(PairedTest {
                    a: a.to_string(),
                    b: b.to_string(),
                    metric: metric.into(),
                    result: wilcoxon_signed_rank(&x, &y, WilcoxonMode::Auto)?,
                });
            }
        }

        if report.classification.is_empty() && report.rouge.is_empty() {
            return Err(Error::Config("nothing to evaluate: no gold labels and no summaries".into()));
        }
        Ok(report)
    }

    pub fn cmd_evaluate(&self) -> Result<(EvalReport, String)> {
        self.write_resolved_config()?;
        let report = self.evaluate()?;
        let table = render_table(&report);
        let mut text = serde_json::to_string_pretty(&report)?;
        text.push('\n');
        write_file(&self.output(REPORT_FILE), text.as_bytes())?;
        write_file(&self.output(REPORT_TABLE_FILE), table.as_bytes())?;
        Ok((report, table))
    }
}

pub const SYNTH_TRAIN: &str = "train.jsonl";
pub const SYNTH_TEST: &str = "test.jsonl";
pub const SYNTH_GOLD: &str = "gold.jsonl";
pub const SYNTH_SCORED: &str = "mrc.tsv";
pub const SYNTH_CONFIG: &str = "config.json";

/// Write the synthetic corpus, lexicons, gold votes and a ready-to-run
/// config into `dir`; returns the config path.
pub fn cmd_synth(dir: &Path, cfg: &SynthConfig, seed: u64) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let corpus = SynthCorpus::generate(cfg, seed)?;
    let train = Corpus::from_documents(corpus.train)?;
    let test = Corpus::from_documents(corpus.test)?;
    write_jsonl_with(&dir.join(SYNTH_TRAIN), |w| train.write_jsonl(w))?;
    write_jsonl_with(&dir.join(SYNTH_TEST), |w| test.write_jsonl(w))?;
    write_jsonl_with(&dir.join(SYNTH_GOLD), |w| write_gold(&corpus.gold, w))?;
    write_file(&dir.join(SYNTH_SCORED), corpus.scored.as_bytes())?;
    let mut category_paths = Vec::new();
    for (name, text) in &corpus.categories {
        let file = format!("{name}.tsv");
        write_file(&dir.join(&file), text.as_bytes())?;
        category_paths.push(PathBuf::from(file));
    }
    let config = RunConfig {
        seed,
        train_corpus: SYNTH_TRAIN.into(),
        test_corpus: Some(SYNTH_TEST.into()),
        gold: Some(SYNTH_GOLD.into()),
        lexicons: LexiconPaths { scored: vec![SYNTH_SCORED.into()], categories: category_paths },
        output_dir: default_output_dir(),
        label: LabelSection::default(),
        features: FeatureSection::default(),
        train: TrainConfig::default(),
        budget: BudgetSection::default(),
        systems: default_systems(),
        pairs: None,
    };
    let mut text = serde_json::to_string_pretty(&config)?;
    text.push('\n');
    let path = dir.join(SYNTH_CONFIG);
    write_file(&path, text.as_bytes())?;
    info!(
        "synthetic corpus: {} train and {} test documents in {}",
        train.documents.len(),
        test.documents.len(),
        dir.display()
    );
    Ok(path)
}
