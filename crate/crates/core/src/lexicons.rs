//! Scored lexicons (word → per-attribute real score, MRC style) and category
//! lexicons (word → set of categories, LIWC / General Inquirer style).
//!
//! Both load from small TSV formats:
//!
//! ```text
//! #scored mrc imagery,concreteness imagery:100:700 concreteness:100:700
//! cat	imagery	600
//! ```
//!
//! ```text
//! #categories inquirer NEG,VICE,POSEMO
//! absurd	NEG,VICE
//! happ*	POSEMO
//! ```
//!
//! Words are casefolded on load. Lines starting with `#` after the header
//! are comments.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const DEFAULT_BINS: usize = 230;

/// Index of the uniform-width interval of `[min, max]` that `score` falls in.
///
/// Out-of-range scores clamp to the first or last bin, and `score == max`
/// lands in the last bin. A degenerate range maps everything to bin 0.
pub fn bin_index(score: f64, range: (f64, f64), bins: usize) -> usize {
    let (min, max) = range;
    if bins <= 1 || max <= min || score.is_nan() {
        return 0;
    }
    let pos = ((score - min) / (max - min) * bins as f64).floor();
    if pos <= 0.0 {
        0
    } else {
        (pos as usize).min(bins - 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredLexicon {
    pub name: String,
    pub attributes: Vec<String>,
    /// Per-attribute `(min, max)`, declared in the header or observed in the data.
    pub ranges: Vec<(f64, f64)>,
    pub bins: usize,
    entries: BTreeMap<String, Vec<Option<f64>>>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Returns `(line_no, line)` pairs, skipping blanks and, after the header,
/// comments. The first non-blank line is returned as the header.
fn header_and_body<R: BufRead>(source: R) -> Result<(Option<(usize, String)>, Vec<(usize, String)>)> {
    let mut header = None;
    let mut body = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.trim().is_empty() {
            continue;
        }
        if header.is_none() {
            header = Some((i + 1, trimmed.to_string()));
        } else if !trimmed.starts_with('#') {
            body.push((i + 1, trimmed.to_string()));
        }
    }
    Ok((header, body))
}

impl ScoredLexicon {
    /// Load the scored-lexicon TSV format with the default bin count.
    pub fn parse<R: BufRead>(source: R) -> Result<Self> {
        let (header, body) = header_and_body(source)?;
        let (hline, header) = header.ok_or_else(|| parse_err(1, "missing `#scored` header"))?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("#scored") {
            return Err(parse_err(hline, "expected header `#scored <name> <attr,...>`"));
        }
        let name = fields.next().ok_or_else(|| parse_err(hline, "missing lexicon name"))?.to_string();
        let attributes: Vec<String> = fields
            .next()
            .ok_or_else(|| parse_err(hline, "missing attribute list"))?
            .split(',')
            .filter(|a| !a.is_empty())
            .map(str::to_string)
            .collect();
        if attributes.is_empty() {
            return Err(parse_err(hline, "empty attribute list"));
        }
        let unique: BTreeSet<&String> = attributes.iter().collect();
        if unique.len() != attributes.len() {
            return Err(parse_err(hline, "duplicate attribute name"));
        }

        let mut declared: Vec<Option<(f64, f64)>> = vec![None; attributes.len()];
        for spec in fields {
            let parts: Vec<&str> = spec.split(':').collect();
            if parts.len() != 3 {
                return Err(parse_err(hline, format!("bad range declaration `{spec}`")));
            }
            let idx = attributes
                .iter()
                .position(|a| a == parts[0])
                .ok_or_else(|| parse_err(hline, format!("range for unknown attribute `{}`", parts[0])))?;
            let min: f64 =
                parts[1].parse().map_err(|_| parse_err(hline, format!("non-numeric range bound `{}`", parts[1])))?;
            let max: f64 =
                parts[2].parse().map_err(|_| parse_err(hline, format!("non-numeric range bound `{}`", parts[2])))?;
            if !(min < max) {
                return Err(parse_err(hline, format!("empty range for `{}`", parts[0])));
            }
            declared[idx] = Some((min, max));
        }

        let mut entries: BTreeMap<String, Vec<Option<f64>>> = BTreeMap::new();
        for (line, row) in body {
            let cols: Vec<&str> = row.split('\t').collect();
            if cols.len() != 3 {
                return Err(parse_err(line, "expected `word<TAB>attribute<TAB>score`"));
            }
            let attr = attributes
                .iter()
                .position(|a| a == cols[1].trim())
                .ok_or_else(|| parse_err(line, format!("unknown attribute `{}`", cols[1].trim())))?;
            let score: f64 = cols[2]
                .trim()
                .parse()
                .ok()
                .filter(|s: &f64| s.is_finite())
                .ok_or_else(|| parse_err(line, format!("non-numeric score `{}`", cols[2].trim())))?;
            if let Some((min, max)) = declared[attr] {
                if score < min || score > max {
                    return Err(parse_err(
                        line,
                        format!("score {score} outside declared range [{min}, {max}] for `{}`", attributes[attr]),
                    ));
                }
            }
            let word = cols[0].trim().to_lowercase();
            if word.is_empty() {
                return Err(parse_err(line, "empty word"));
            }
            entries.entry(word).or_insert_with(|| vec![None; attributes.len()])[attr] = Some(score);
        }

        let ranges = (0..attributes.len())
            .map(|a| {
                declared[a].unwrap_or_else(|| {
                    let observed = entries.values().filter_map(|v| v[a]);
                    let (lo, hi) =
                        observed.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s), hi.max(s)));
                    if lo.is_finite() {
                        (lo, hi)
                    } else {
                        (0.0, 0.0)
                    }
                })
            })
            .collect();

        Ok(ScoredLexicon { name, attributes, ranges, bins: DEFAULT_BINS, entries })
    }

    pub fn with_bins(mut self, bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(Error::Config("bins must be at least 1".into()));
        }
        self.bins = bins;
        Ok(self)
    }

    pub fn attribute_index(&self, attribute: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a == attribute)
    }

    pub fn score(&self, word: &str, attribute: usize) -> Option<f64> {
        self.entries.get(word).and_then(|v| v.get(attribute).copied().flatten())
    }

    /// Bin of `word` for `attribute`, or `None` when the word has no score.
    pub fn bin_of(&self, word: &str, attribute: usize) -> Option<usize> {
        self.score(word, attribute).map(|s| bin_index(s, self.ranges[attribute], self.bins))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    /// SHA-256 over a canonical rendering of the full lexicon content.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(b"scored\0");
        h.update(self.name.as_bytes());
        h.update(b"\0");
        for (attr, (lo, hi)) in self.attributes.iter().zip(&self.ranges) {
            h.update(attr.as_bytes());
            h.update(lo.to_bits().to_le_bytes());
            h.update(hi.to_bits().to_le_bytes());
        }
        h.update((self.bins as u64).to_le_bytes());
        for (word, scores) in &self.entries {
            h.update(word.as_bytes());
            h.update(b"\0");
            for s in scores {
                match s {
                    Some(v) => {
                        h.update([1u8]);
                        h.update(v.to_bits().to_le_bytes());
                    }
                    None => h.update([0u8]),
                }
            }
        }
        hex::encode(h.finalize())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CategoryLexicon {
    pub name: String,
    pub categories: Vec<String>,
    exact: BTreeMap<String, BTreeSet<usize>>,
    /// Wildcard entries (`happ*`) keyed by their prefix.
    prefixes: BTreeMap<String, BTreeSet<usize>>,
}

impl CategoryLexicon {
    pub fn parse<R: BufRead>(source: R) -> Result<Self> {
        let (header, body) = header_and_body(source)?;
        let (hline, header) = header.ok_or_else(|| parse_err(1, "missing `#categories` header"))?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("#categories") {
            return Err(parse_err(hline, "expected header `#categories <name> <cat,...>`"));
        }
        let name = fields.next().ok_or_else(|| parse_err(hline, "missing lexicon name"))?.to_string();
        let categories: Vec<String> = fields
            .next()
            .ok_or_else(|| parse_err(hline, "missing category list"))?
            .split(',')
            .filter(|c| !c.is_empty())
            .map(str::to_string)
            .collect();
        let unique: BTreeSet<&String> = categories.iter().collect();
        if unique.len() != categories.len() {
            return Err(parse_err(hline, "duplicate category name"));
        }
        let index: BTreeMap<&str, usize> = categories.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();

        let mut exact: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
        let mut prefixes: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
        for (line, row) in body {
            let (word, cats) =
                row.split_once('\t').ok_or_else(|| parse_err(line, "expected `word<TAB>cat1,cat2,...`"))?;
            let word = word.trim().to_lowercase();
            let mut set = BTreeSet::new();
            for label in cats.split(',').map(str::trim).filter(|c| !c.is_empty()) {
                let idx = index.get(label).ok_or_else(|| parse_err(line, format!("unknown category `{label}`")))?;
                set.insert(*idx);
            }
            let (key, target) = match word.strip_suffix('*') {
                Some(prefix) => (prefix.to_string(), &mut prefixes),
                None => (word, &mut exact),
            };
            if key.is_empty() {
                return Err(parse_err(line, "empty word"));
            }
            target.entry(key).or_default().extend(set);
        }
        Ok(CategoryLexicon { name, categories, exact, prefixes })
    }

    /// Union of the exact entry for `word` and every wildcard prefix of it.
    pub fn lookup(&self, word: &str) -> BTreeSet<usize> {
        let lowered;
        let word = if word.chars().any(char::is_uppercase) {
            lowered = word.to_lowercase();
            lowered.as_str()
        } else {
            word
        };
        let mut out = self.exact.get(word).cloned().unwrap_or_default();
        if !self.prefixes.is_empty() {
            for (i, c) in word.char_indices() {
                let end = i + c.len_utf8();
                if let Some(cats) = self.prefixes.get(&word[..end]) {
                    out.extend(cats);
                }
            }
        }
        out
    }

    pub fn lookup_names(&self, word: &str) -> BTreeSet<&str> {
        self.lookup(word).into_iter().map(|i| self.categories[i].as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.exact.len() + self.prefixes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(b"categories\0");
        h.update(self.name.as_bytes());
        h.update(b"\0");
        for c in &self.categories {
            h.update(c.as_bytes());
            h.update(b"\0");
        }
        for (tag, map) in [(b'=', &self.exact), (b'*', &self.prefixes)] {
            for (word, cats) in map {
                h.update([tag]);
                h.update(word.as_bytes());
                h.update(b"\0");
                for c in cats {
                    h.update((*c as u64).to_le_bytes());
                }
            }
        }
        hex::encode(h.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MRC: &str = "#scored mrc imagery,concreteness imagery:100:700\n\
                       # comment line\n\
                       cat\timagery\t600\n\
                       cat\tconcreteness\t610\n\
                       Dog\tconcreteness\t580\n";

    #[test]
    fn bin_index_boundaries() {
        assert_eq!(bin_index(100.0, (100.0, 700.0), 230), 0);
        assert_eq!(bin_index(700.0, (100.0, 700.0), 230), 229);
        assert_eq!(bin_index(400.0, (100.0, 700.0), 230), 115);
        assert_eq!(bin_index(50.0, (100.0, 700.0), 230), 0);
        assert_eq!(bin_index(9000.0, (100.0, 700.0), 230), 229);
        assert_eq!(bin_index(3.0, (3.0, 3.0), 10), 0);
    }

    #[test]
    fn header_only_lexicon_is_empty() {
        let lex = ScoredLexicon::parse("#scored mrc imagery\n".as_bytes()).unwrap();
        assert!(lex.is_empty());
        assert_eq!(lex.bins, DEFAULT_BINS);
    }

    #[test]
    fn scored_load_and_ranges() {
        let lex = ScoredLexicon::parse(MRC.as_bytes()).unwrap();
        assert_eq!(lex.len(), 2);
        assert_eq!(lex.score("cat", 0), Some(600.0));
        assert_eq!(lex.score("cat", 1), Some(610.0));
        assert_eq!(lex.score("dog", 0), None);
        assert_eq!(lex.ranges[0], (100.0, 700.0));
        // observed, not declared
        assert_eq!(lex.ranges[1], (580.0, 610.0));
    }

    #[test]
    fn scored_duplicate_rows_last_wins() {
        let src = "#scored m a\nx\ta\t1\nx\ta\t5\ny\ta\t3\n";
        let lex = ScoredLexicon::parse(src.as_bytes()).unwrap();
        assert_eq!(lex.score("x", 0), Some(5.0));
    }

    #[test]
    fn scored_errors_carry_line_numbers() {
        let bad = "#scored m a:0:10\nx\ta\tten\n";
        assert!(matches!(ScoredLexicon::parse(bad.as_bytes()), Err(Error::Parse { line: 2, .. })));
        let bad = "#scored m a:0:10\nx\tb\t1\n";
        assert!(matches!(ScoredLexicon::parse(bad.as_bytes()), Err(Error::Parse { line: 2, .. })));
        let bad = "#scored m a:0:10\n\nx\ta\t11\n";
        assert!(matches!(ScoredLexicon::parse(bad.as_bytes()), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn content_hash_tracks_content() {
        let a = ScoredLexicon::parse(MRC.as_bytes()).unwrap();
        let b = ScoredLexicon::parse(MRC.replace("600", "601").as_bytes()).unwrap();
        assert_eq!(a.content_hash(), a.clone().content_hash());
        assert_ne!(a.content_hash(), b.content_hash());
        assert_ne!(a.content_hash(), a.clone().with_bins(10).unwrap().content_hash());
    }

    const INQ: &str = "#categories inq NEG,VICE,POSEMO,TIME\nabsurd\tNEG,VICE\nhapp*\tPOSEMO\nhappy\tTIME\n";

    #[test]
    fn category_exact_and_wildcard() {
        let lex = CategoryLexicon::parse(INQ.as_bytes()).unwrap();
        assert_eq!(lex.lookup_names("absurd"), ["NEG", "VICE"].into_iter().collect());
        assert_eq!(lex.lookup_names("happiness"), ["POSEMO"].into_iter().collect());
        assert_eq!(lex.lookup_names("Happy"), ["POSEMO", "TIME"].into_iter().collect());
        assert!(lex.lookup("zebra").is_empty());
        assert!(lex.lookup("hap").is_empty());
    }

    #[test]
    fn category_unknown_label_errors() {
        let bad = "#categories inq NEG\n# c\nabsurd\tNEG,VICE\n";
        assert!(matches!(CategoryLexicon::parse(bad.as_bytes()), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn category_order_insensitive() {
        let a = CategoryLexicon::parse(INQ.as_bytes()).unwrap();
        let reordered = "#categories inq NEG,VICE,POSEMO,TIME\nhappy\tTIME\nhapp*\tPOSEMO\nabsurd\tVICE,NEG\n";
        let b = CategoryLexicon::parse(reordered.as_bytes()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.content_hash(), b.content_hash());
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn bin_index_monotone(a in -50.0f64..150.0, b in -50.0f64..150.0, bins in 1usize..300) {
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                let r = (0.0, 100.0);
                prop_assert!(bin_index(lo, r, bins) <= bin_index(hi, r, bins));
                prop_assert!(bin_index(hi, r, bins) < bins);
            }

            #[test]
            fn bin_index_surjective(bins in 1usize..400) {
                let r = (100.0, 700.0);
                let hit: BTreeSet<usize> = (0..bins)
                    .map(|i| bin_index(100.0 + 600.0 * (i as f64 + 0.5) / bins as f64, r, bins))
                    .collect();
                prop_assert_eq!(hit.len(), bins);
            }

            #[test]
            fn lookup_within_declared(word in "[a-z]{1,8}") {
                let lex = CategoryLexicon::parse(
                    "#categories l A,B,C\na*\tA\nab*\tB\nabc\tC\nb\tA,C\n".as_bytes()).unwrap();
                prop_assert!(lex.lookup(&word).iter().all(|&c| c < lex.categories.len()));
            }
        }
    }
}
