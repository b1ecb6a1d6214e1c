//! Documents, sentences and tokens, plus JSONL corpus ingestion.
//!
//! Sentences arrive pre-segmented; the only text processing done here is
//! tokenization into word and punctuation tokens.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::{BufRead, Write};

use once_cell::sync::Lazy;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// A word is a run of non-punctuation characters, possibly joined by
// apostrophes that sit between two such runs ("We're", "rock'n'roll").
static TOKEN_RE: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"[^\p{P}\s]+(?:['\x{2019}][^\p{P}\s]+)*|\p{P}+").expect("valid token regex"));

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub lower: String,
    pub is_word: bool,
    pub is_punct: bool,
    /// Byte offset of the token in the text it was produced from.
    pub start: usize,
}

impl Token {
    pub fn end(&self) -> usize {
        self.start + self.surface.len()
    }
}

/// Split `text` into word and punctuation tokens.
///
/// Whitespace separates tokens; inside a whitespace-delimited chunk every
/// maximal run of Unicode punctuation is its own token, except apostrophes
/// interior to a word.
pub fn tokenize(text: &str) -> Vec<Token> {
    TOKEN_RE
        .find_iter(text)
        .map(|m| {
            let surface = m.as_str();
            let is_punct = surface.chars().next().is_some_and(is_punctuation);
            Token {
                surface: surface.to_string(),
                lower: surface.to_lowercase(),
                is_word: !is_punct,
                is_punct,
                start: m.start(),
            }
        })
        .collect()
}

fn is_punctuation(c: char) -> bool {
    static PUNCT_RE: Lazy<Regex> = Lazy::new(|| Regex::new(r"^\p{P}$").unwrap());
    if c.is_ascii() {
        return c.is_ascii_punctuation() && !matches!(c, '$' | '+' | '<' | '=' | '>' | '^' | '`' | '|' | '~');
    }
    let mut buf = [0u8; 4];
    PUNCT_RE.is_match(c.encode_utf8(&mut buf))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sentence {
    pub id: usize,
    pub text: String,
    pub tokens: Vec<Token>,
}

impl Sentence {
    pub fn new(id: usize, text: impl Into<String>) -> Self {
        let text = text.into();
        let tokens = tokenize(&text);
        Sentence { id, text, tokens }
    }

    pub fn word_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_word).count()
    }

    /// Lowercased word tokens, in order.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().filter(|t| t.is_word).map(|t| t.lower.as_str())
    }

    /// Distinct lowercased word types.
    pub fn word_types(&self) -> BTreeSet<&str> {
        self.words().collect()
    }

    /// The prefix of the sentence text ending with its `n`-th word token.
    pub fn prefix_words(&self, n: usize) -> &str {
        if n == 0 {
            return "";
        }
        match self.tokens.iter().filter(|t| t.is_word).nth(n - 1) {
            Some(tok) => &self.text[..tok.end()],
            None => &self.text,
        }
    }
}

/// Total number of word tokens across `sentences`.
pub fn word_count(sentences: &[Sentence]) -> usize {
    sentences.iter().map(Sentence::word_count).sum()
}

fn sentences_from(texts: &[String]) -> Vec<Sentence> {
    texts.iter().enumerate().map(|(i, t)| Sentence::new(i, t.as_str())).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub doc_id: String,
    pub section: String,
    pub sentences: Vec<Sentence>,
    pub summary: Option<Vec<Sentence>>,
    /// Human extracts as lists of sentence ids, when the source provides them.
    pub extracts: Option<Vec<Vec<usize>>>,
}

impl Document {
    pub fn new(
        doc_id: impl Into<String>,
        section: impl Into<String>,
        sentences: &[&str],
        summary: Option<&[&str]>,
    ) -> Result<Self> {
        let record = CorpusRecord {
            doc_id: doc_id.into(),
            section: section.into(),
            sentences: sentences.iter().map(|s| s.to_string()).collect(),
            summary: summary.map(|s| s.iter().map(|x| x.to_string()).collect()),
            extracts: None,
        };
        Document::from_record(record)
    }

    fn from_record(record: CorpusRecord) -> Result<Self> {
        if record.sentences.is_empty() {
            return Err(Error::EmptyDocument(record.doc_id));
        }
        Ok(Document {
            sentences: sentences_from(&record.sentences),
            summary: record.summary.as_deref().map(sentences_from),
            doc_id: record.doc_id,
            section: record.section,
            extracts: record.extracts,
        })
    }

    fn to_record(&self) -> CorpusRecord {
        CorpusRecord {
            doc_id: self.doc_id.clone(),
            section: self.section.clone(),
            sentences: self.sentences.iter().map(|s| s.text.clone()).collect(),
            summary: self.summary.as_ref().map(|s| s.iter().map(|x| x.text.clone()).collect()),
            extracts: self.extracts.clone(),
        }
    }

    pub fn word_count(&self) -> usize {
        word_count(&self.sentences)
    }
}

/// One line of the corpus JSONL format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub doc_id: String,
    #[serde(default)]
    pub section: String,
    pub sentences: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extracts: Option<Vec<Vec<usize>>>,
}

/// Smoothed inverse document frequency: `ln((1 + N) / (1 + df)) + 1`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IdfTable {
    doc_count: usize,
    doc_freq: BTreeMap<String, usize>,
}

impl IdfTable {
    /// Document frequencies over article sentences; summaries do not count.
    pub fn from_documents(documents: &[Document]) -> Self {
        let mut doc_freq = BTreeMap::new();
        for doc in documents {
            let types: HashSet<&str> = doc.sentences.iter().flat_map(|s| s.words()).collect();
            for t in types {
                *doc_freq.entry(t.to_string()).or_insert(0) += 1;
            }
        }
        IdfTable { doc_count: documents.len(), doc_freq }
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    pub fn doc_freq(&self, term: &str) -> usize {
        self.doc_freq.get(term).copied().unwrap_or(0)
    }

    /// Weight of `term`; unseen terms are treated as df = 0.
    pub fn weight(&self, term: &str) -> f64 {
        idf_formula(self.doc_count, self.doc_freq(term))
    }

    pub fn len(&self) -> usize {
        self.doc_freq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doc_freq.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, f64)> {
        self.doc_freq.iter().map(move |(t, &df)| (t.as_str(), idf_formula(self.doc_count, df)))
    }
}

pub fn idf_formula(doc_count: usize, df: usize) -> f64 {
    ((1.0 + doc_count as f64) / (1.0 + df as f64)).ln() + 1.0
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    pub documents: Vec<Document>,
    pub idf: IdfTable,
}

impl Corpus {
    pub fn from_documents(documents: Vec<Document>) -> Result<Self> {
        let mut seen = HashSet::new();
        for doc in &documents {
            if !seen.insert(doc.doc_id.as_str()) {
                return Err(Error::DuplicateDocId(doc.doc_id.clone()));
            }
        }
        let idf = IdfTable::from_documents(&documents);
        Ok(Corpus { documents, idf })
    }

    pub fn get(&self, doc_id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.doc_id == doc_id)
    }

    pub fn sentence_count(&self) -> usize {
        self.documents.iter().map(|d| d.sentences.len()).sum()
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for doc in &self.documents {
            serde_json::to_writer(&mut out, &doc.to_record())?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Parse a JSONL corpus: one document per non-blank line.
pub fn parse_corpus<R: BufRead>(source: R) -> Result<Corpus> {
    let mut documents = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: CorpusRecord =
            serde_json::from_str(&line).map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?;
        let doc = Document::from_record(record).map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?;
        documents.push(doc);
    }
    Corpus::from_documents(documents)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(tokens: &[Token]) -> Vec<(&str, bool)> {
        tokens.iter().map(|t| (t.surface.as_str(), t.is_word)).collect()
    }

    #[test]
    fn tokenize_empty_and_whitespace() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("  \t\n ").is_empty());
    }

    #[test]
    fn tokenize_splits_punctuation_runs() {
        let toks = tokenize("Hello, world!");
        assert_eq!(kinds(&toks), vec![("Hello", true), (",", false), ("world", true), ("!", false)]);
        assert_eq!(toks[0].lower, "hello");
    }

    #[test]
    fn tokenize_keeps_interior_apostrophes() {
        let toks = tokenize("We're here.");
        assert_eq!(kinds(&toks), vec![("We're", true), ("here", true), (".", false)]);
    }

    #[test]
    fn tokenize_two_apostrophe_quotes() {
        let toks = tokenize("''We're not looking for a fight with Iran,''");
        assert_eq!(toks.first().unwrap().surface, "''");
        assert_eq!(toks[1].surface, "We're");
        assert_eq!(toks.last().unwrap().surface, ",''");
        assert!(toks.last().unwrap().is_punct);
    }

    #[test]
    fn tokenize_unicode_punctuation() {
        let toks = tokenize("“Quoted” — done…");
        assert_eq!(
            kinds(&toks),
            vec![("“", false), ("Quoted", true), ("”", false), ("—", false), ("done", true), ("…", false)]
        );
    }

    #[test]
    fn symbols_are_not_punctuation() {
        let toks = tokenize("$5 + 3");
        assert!(toks.iter().all(|t| t.is_word));
    }

    #[test]
    fn word_count_examples() {
        assert_eq!(word_count(&[]), 0);
        let s = Sentence::new(0, "Hello, world!");
        assert_eq!(word_count(std::slice::from_ref(&s)), 2);
        assert_eq!(word_count(&[s.clone(), s]), 4);
    }

    #[test]
    fn prefix_words_cuts_after_nth_word() {
        let s = Sentence::new(0, "One, two three. Four");
        assert_eq!(s.prefix_words(0), "");
        assert_eq!(s.prefix_words(2), "One, two");
        assert_eq!(s.prefix_words(10), "One, two three. Four");
    }

    #[test]
    fn parse_empty_stream() {
        let c = parse_corpus("".as_bytes()).unwrap();
        assert!(c.documents.is_empty());
        assert!(c.idf.is_empty());
    }

    #[test]
    fn parse_assigns_contiguous_ids() {
        let c = parse_corpus(r#"{"doc_id":"a","section":"Business","sentences":["One.","Two."]}"#.as_bytes()).unwrap();
        let ids: Vec<usize> = c.documents[0].sentences.iter().map(|s| s.id).collect();
        assert_eq!(ids, vec![0, 1]);
        assert!(c.documents[0].summary.is_none());
    }

    #[test]
    fn idf_for_single_document_term() {
        let src = [
            r#"{"doc_id":"a","section":"x","sentences":["Iran talks."],"summary":["iran iran"]}"#,
            r#"{"doc_id":"b","section":"x","sentences":["Other talks."],"summary":["iran"]}"#,
            r#"{"doc_id":"c","section":"x","sentences":["Third."]}"#,
        ]
        .join("\n");
        let c = parse_corpus(src.as_bytes()).unwrap();
        // ln(4/2) + 1
        assert!((c.idf.weight("iran") - 1.693_147_180_559_945).abs() < 1e-12);
        assert!((c.idf.weight("talks") - ((4.0f64 / 3.0).ln() + 1.0)).abs() < 1e-12);
        // unseen term: df = 0
        assert!((c.idf.weight("zebra") - (4.0f64.ln() + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let src = "{\"doc_id\":\"a\",\"sentences\":[\"x\"]}\n\n{not json}\n";
        match parse_corpus(src.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let src = "{\"doc_id\":\"a\",\"sentences\":[]}";
        assert!(matches!(parse_corpus(src.as_bytes()), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn duplicate_doc_id_rejected() {
        let src = "{\"doc_id\":\"a\",\"sentences\":[\"x\"]}\n{\"doc_id\":\"a\",\"sentences\":[\"y\"]}";
        assert!(matches!(parse_corpus(src.as_bytes()), Err(Error::DuplicateDocId(id)) if id == "a"));
    }

    #[test]
    fn unknown_fields_ignored() {
        let src = r#"{"doc_id":"a","sentences":["x"],"byline":"someone","summary":[]}"#;
        let c = parse_corpus(src.as_bytes()).unwrap();
        assert_eq!(c.documents[0].summary.as_deref().map(|s| s.len()), Some(0));
    }
}
