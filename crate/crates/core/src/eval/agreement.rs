use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Annotator votes for one article sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldVotes {
    pub doc_id: String,
    pub sentence_id: usize,
    pub votes: Vec<bool>,
}

pub fn write_gold<W: Write>(gold: &[GoldVotes], mut out: W) -> Result<()> {
    for g in gold {
        serde_json::to_writer(&mut out, g)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_gold<R: BufRead>(source: R) -> Result<Vec<GoldVotes>> {
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

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub kappa: f64,
    /// Observed agreement rate.
    pub observed: f64,
    /// Agreement expected by chance from the marginals.
    pub expected: f64,
}

/// Cohen's kappa for two annotators over the same items.
pub fn cohen_kappa<T: Ord>(a: &[T], b: &[T]) -> Result<Agreement> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(Error::InvalidInput("kappa needs at least one item".into()));
    }
    let n = a.len() as f64;
    let mut marg: BTreeMap<&T, (f64, f64)> = BTreeMap::new();
    let mut agree = 0usize;
    for (x, y) in a.iter().zip(b) {
        marg.entry(x).or_default().0 += 1.0;
        marg.entry(y).or_default().1 += 1.0;
        if x == y {
            agree += 1;
        }
    }
    let observed = agree as f64 / n;
    let expected: f64 = marg.values().map(|(ca, cb)| (ca / n) * (cb / n)).sum();
    if expected >= 1.0 {
        return if agree == a.len() {
            Ok(Agreement { kappa: 1.0, observed, expected })
        } else {
            Err(Error::DegenerateAgreement)
        };
    }
    Ok(Agreement { kappa: (observed - expected) / (1.0 - expected), observed, expected })
}

/// Per-item majority over an odd number of binary votes.
pub fn majority_vote(votes: &[Vec<bool>]) -> Result<Vec<bool>> {
    votes
        .iter()
        .enumerate()
        .map(|(item, v)| {
            if v.len() % 2 == 0 {
                return Err(Error::TiePossible { item, votes: v.len() });
            }
            Ok(2 * v.iter().filter(|&&x| x).count() > v.len())
        })
        .collect()
}
