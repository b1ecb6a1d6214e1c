//! Sentence feature vectors with a fixed, serializable layout.
//!
//! With six scored attributes at 230 bins, a 64-category and a 182-category
//! lexicon plus the general block, a vector has 1380 + 64 + 182 + 6 = 1632
//! dimensions.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{Document, Sentence};
use crate::error::{Error, Result};
use crate::lexicons::{CategoryLexicon, ScoredLexicon};

pub const LAYOUT_VERSION: u32 = 1;
pub const GENERAL_WIDTH: usize = 6;
pub const GENERAL_NAMES: [&str; GENERAL_WIDTH] =
    ["tokens", "punctuation", "has_exclamation", "has_question", "has_colon", "has_double_quote"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureMode {
    Dictionary,
    DictionaryNoGeneral,
    Bow,
    /// Externally supplied dense vectors (no extraction from text).
    Dense,
}

impl fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FeatureMode::Dictionary => "dictionary",
            FeatureMode::DictionaryNoGeneral => "dictionary-no-general",
            FeatureMode::Bow => "bow",
            FeatureMode::Dense => "dense",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for FeatureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dictionary" => Ok(FeatureMode::Dictionary),
            "dictionary-no-general" => Ok(FeatureMode::DictionaryNoGeneral),
            "bow" => Ok(FeatureMode::Bow),
            "dense" => Ok(FeatureMode::Dense),
            other => Err(Error::Config(format!("unknown feature mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BlockKind {
    Scored { lexicon: String, attribute: String, bins: usize },
    Category { lexicon: String, categories: Vec<String> },
    General,
    Bow { vocabulary: Vec<String> },
    Dense,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub name: String,
    pub offset: usize,
    pub width: usize,
    #[serde(flatten)]
    pub kind: BlockKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconRef {
    pub name: String,
    pub kind: String,
    pub hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureLayout {
    pub version: u32,
    pub mode: FeatureMode,
    pub blocks: Vec<Block>,
    pub total_dim: usize,
    pub lexicons: Vec<LexiconRef>,
}

impl FeatureLayout {
    fn from_blocks(mode: FeatureMode, kinds: Vec<(String, usize, BlockKind)>, lexicons: Vec<LexiconRef>) -> Self {
        let mut offset = 0;
        let blocks = kinds
            .into_iter()
            .map(|(name, width, kind)| {
                let b = Block { name, offset, width, kind };
                offset += width;
                b
            })
            .collect();
        FeatureLayout { version: LAYOUT_VERSION, mode, blocks, total_dim: offset, lexicons }
    }

    /// Layout for `dim` externally supplied features.
    pub fn dense(dim: usize) -> Self {
        Self::from_blocks(FeatureMode::Dense, vec![("dense".into(), dim, BlockKind::Dense)], Vec::new())
    }

    pub fn block(&self, name: &str) -> Option<&Block> {
        self.blocks.iter().find(|b| b.name == name)
    }

    /// SHA-256 of the canonical JSON rendering; covers lexicon content hashes.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("layout serializes");
        hex::encode(Sha256::digest(&json))
    }

    pub fn validate(&self) -> Result<()> {
        let mut offset = 0;
        for b in &self.blocks {
            if b.offset != offset {
                return Err(Error::InvalidInput(format!("layout block `{}` is not contiguous", b.name)));
            }
            offset += b.width;
        }
        if offset != self.total_dim {
            return Err(Error::InvalidInput("layout total_dim does not match its blocks".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub layout_hash: String,
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn dense(layout: &FeatureLayout, values: Vec<f64>) -> Result<Self> {
        if values.len() != layout.total_dim {
            return Err(Error::DimensionMismatch { expected: layout.total_dim, found: values.len() });
        }
        Ok(FeatureVector { layout_hash: layout.hash(), values })
    }
}

fn word_total(sentence: &Sentence) -> Result<f64> {
    match sentence.word_count() {
        0 => Err(Error::EmptySentence),
        n => Ok(n as f64),
    }
}

/// Fraction of the sentence's words whose `attribute` score falls in each bin.
/// Words missing from the lexicon count towards the denominator only.
pub fn interval_fractions(sentence: &Sentence, lex: &ScoredLexicon, attribute: &str) -> Result<Vec<f64>> {
    let attr = lex
        .attribute_index(attribute)
        .ok_or_else(|| Error::InvalidInput(format!("lexicon `{}` has no attribute `{attribute}`", lex.name)))?;
    let mut out = vec![0.0; lex.bins];
    fill_intervals(sentence, lex, attr, &mut out)?;
    Ok(out)
}

fn fill_intervals(sentence: &Sentence, lex: &ScoredLexicon, attr: usize, out: &mut [f64]) -> Result<()> {
    let total = word_total(sentence)?;
    let mut counts = vec![0usize; out.len()];
    for w in sentence.words() {
        if let Some(bin) = lex.bin_of(w, attr) {
            counts[bin] += 1;
        }
    }
    for (o, c) in out.iter_mut().zip(counts) {
        *o = c as f64 / total;
    }
    Ok(())
}

/// Fraction of the sentence's words carrying each category.
pub fn category_histogram(sentence: &Sentence, lex: &CategoryLexicon) -> Result<Vec<f64>> {
    let mut out = vec![0.0; lex.categories.len()];
    fill_categories(sentence, lex, &mut out)?;
    Ok(out)
}

fn fill_categories(sentence: &Sentence, lex: &CategoryLexicon, out: &mut [f64]) -> Result<()> {
    let total = word_total(sentence)?;
    let mut counts = vec![0usize; out.len()];
    for w in sentence.words() {
        for c in lex.lookup(w) {
            counts[c] += 1;
        }
    }
    for (o, c) in out.iter_mut().zip(counts) {
        *o = c as f64 / total;
    }
    Ok(())
}

/// Token count, punctuation count, and presence flags for `!`, `?`, `:` and
/// double quotation marks (`"`, typographic quotes, or the `''` convention).
pub fn general_features(sentence: &Sentence) -> [f64; GENERAL_WIDTH] {
    let text = sentence.text.as_str();
    let flag = |b: bool| if b { 1.0 } else { 0.0 };
    let punct = sentence.tokens.iter().filter(|t| t.is_punct).count();
    let quotes = text.contains('"')
        || text.contains('\u{201C}')
        || text.contains('\u{201D}')
        || text.contains('\u{201E}')
        || text.contains("''");
    [
        sentence.tokens.len() as f64,
        punct as f64,
        flag(text.contains('!')),
        flag(text.contains('?')),
        flag(text.contains(':')),
        flag(quotes),
    ]
}

/// Frequency-thresholded vocabulary over article sentences, sorted.
pub fn bow_vocabulary(documents: &[Document], min_df: usize) -> Vec<String> {
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in documents {
        let types: HashSet<&str> = doc.sentences.iter().flat_map(|s| s.words()).collect();
        for t in types {
            *df.entry(t).or_insert(0) += 1;
        }
    }
    df.into_iter().filter(|&(_, n)| n >= min_df.max(1)).map(|(t, _)| t.to_string()).collect()
}

/// Turns sentences into [`FeatureVector`]s for one layout.
#[derive(Debug, Clone)]
pub struct FeatureExtractor {
    layout: FeatureLayout,
    layout_hash: String,
    scored: Vec<ScoredLexicon>,
    categories: Vec<CategoryLexicon>,
    bow_index: HashMap<String, usize>,
}

impl FeatureExtractor {
    /// Dictionary layout: one block per (scored lexicon, attribute), one per
    /// category lexicon, then optionally the general block.
    pub fn dictionary(
        scored: Vec<ScoredLexicon>,
        categories: Vec<CategoryLexicon>,
        include_general: bool,
    ) -> Result<Self> {
        let mut names = HashSet::new();
        for n in scored.iter().map(|l| &l.name).chain(categories.iter().map(|l| &l.name)) {
            if !names.insert(n.clone()) {
                return Err(Error::Config(format!("duplicate lexicon name `{n}`")));
            }
        }
        let mut kinds = Vec::new();
        let mut refs = Vec::new();
        for lex in &scored {
            for attr in &lex.attributes {
                kinds.push((
                    format!("{}:{}", lex.name, attr),
                    lex.bins,
                    BlockKind::Scored { lexicon: lex.name.clone(), attribute: attr.clone(), bins: lex.bins },
                ));
            }
            refs.push(LexiconRef { name: lex.name.clone(), kind: "scored".into(), hash: lex.content_hash() });
        }
        for lex in &categories {
            kinds.push((
                lex.name.clone(),
                lex.categories.len(),
                BlockKind::Category { lexicon: lex.name.clone(), categories: lex.categories.clone() },
            ));
            refs.push(LexiconRef { name: lex.name.clone(), kind: "categories".into(), hash: lex.content_hash() });
        }
        let mode = if include_general {
            kinds.push(("general".into(), GENERAL_WIDTH, BlockKind::General));
            FeatureMode::Dictionary
        } else {
            FeatureMode::DictionaryNoGeneral
        };
        if kinds.is_empty() {
            return Err(Error::Config("feature layout has no blocks".into()));
        }
        let layout = FeatureLayout::from_blocks(mode, kinds, refs);
        Ok(Self::assemble(layout, scored, categories))
    }

    pub fn bow(vocabulary: Vec<String>) -> Result<Self> {
        if vocabulary.is_empty() {
            return Err(Error::Config("bag-of-words vocabulary is empty".into()));
        }
        let width = vocabulary.len();
        let layout = FeatureLayout::from_blocks(
            FeatureMode::Bow,
            vec![("bow".into(), width, BlockKind::Bow { vocabulary })],
            Vec::new(),
        );
        Ok(Self::assemble(layout, Vec::new(), Vec::new()))
    }

    /// Rebuild an extractor for a stored layout from the supplied lexicons,
    /// failing if the lexicons do not reproduce the layout exactly.
    pub fn for_layout(
        layout: &FeatureLayout,
        scored: Vec<ScoredLexicon>,
        categories: Vec<CategoryLexicon>,
    ) -> Result<Self> {
        let rebuilt = match layout.mode {
            FeatureMode::Bow => match layout.blocks.first().map(|b| &b.kind) {
                Some(BlockKind::Bow { vocabulary }) => Self::bow(vocabulary.clone())?,
                _ => return Err(Error::InvalidInput("bow layout without a vocabulary block".into())),
            },
            FeatureMode::Dictionary => Self::dictionary(scored, categories, true)?,
            FeatureMode::DictionaryNoGeneral => Self::dictionary(scored, categories, false)?,
            FeatureMode::Dense => return Err(Error::InvalidInput("dense layouts carry no text extractor".into())),
        };
        if rebuilt.layout_hash != layout.hash() {
            return Err(Error::LayoutMismatch { expected: layout.hash(), found: rebuilt.layout_hash });
        }
        Ok(rebuilt)
    }

    fn assemble(layout: FeatureLayout, scored: Vec<ScoredLexicon>, categories: Vec<CategoryLexicon>) -> Self {
        let bow_index = match layout.blocks.first().map(|b| &b.kind) {
            Some(BlockKind::Bow { vocabulary }) => vocabulary.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect(),
            _ => HashMap::new(),
        };
        let layout_hash = layout.hash();
        FeatureExtractor { layout, layout_hash, scored, categories, bow_index }
    }

    pub fn layout(&self) -> &FeatureLayout {
        &self.layout
    }

    pub fn layout_hash(&self) -> &str {
        &self.layout_hash
    }

    pub fn extract(&self, sentence: &Sentence) -> Result<FeatureVector> {
        let total = word_total(sentence)?;
        let mut values = vec![0.0; self.layout.total_dim];
        for block in &self.layout.blocks {
            let out = &mut values[block.offset..block.offset + block.width];
            match &block.kind {
                BlockKind::Scored { lexicon, attribute, .. } => {
                    let lex = self.scored.iter().find(|l| &l.name == lexicon).expect("layout built from lexicons");
                    let attr = lex.attribute_index(attribute).expect("layout built from lexicons");
                    fill_intervals(sentence, lex, attr, out)?;
                }
                BlockKind::Category { lexicon, .. } => {
                    let lex = self.categories.iter().find(|l| &l.name == lexicon).expect("layout built from lexicons");
                    fill_categories(sentence, lex, out)?;
                }
                BlockKind::General => out.copy_from_slice(&general_features(sentence)),
                BlockKind::Bow { .. } => {
                    for w in sentence.words() {
                        if let Some(&i) = self.bow_index.get(w) {
                            out[i] += 1.0;
                        }
                    }
                }
                BlockKind::Dense => return Err(Error::InvalidInput("dense layouts carry no text extractor".into())),
            }
        }
        debug_assert!(total > 0.0);
        Ok(FeatureVector { layout_hash: self.layout_hash.clone(), values })
    }
}
