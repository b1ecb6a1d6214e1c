//! Sentence importance detection trained from positive and unlabeled
//! document/summary data, and the extractive summarizers built on top of it.
//!
//! The crate is organised along the data flow:
//!
//! * [`corpus`]: documents, sentences, tokenization and IDF statistics.
//! * [`lexicons`]: scored (MRC-style) and category (LIWC/Inquirer-style) word lists.
//! * [`features`]: fixed-layout sentence feature vectors.
//! * [`weak_label`]: positive/unlabeled labels from extracts or summary alignment.
//! * [`pu`]: the two-stage positive-unlabeled learner.
//! * [`summarize`]: InfoRank, InfoFilter, LeadWords and RandomRank.
//! * [`eval`]: ROUGE, classification metrics and paired significance tests.
//! * [`pipeline`]: the configuration-driven end-to-end pipeline used by the CLI.
//! * [`synth`]: synthetic corpora and Gaussian PU data for testing.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod lexicons;
pub mod pipeline;
pub mod pu;
pub mod summarize;
pub mod synth;
pub mod weak_label;

pub use error::{Error, Result};
