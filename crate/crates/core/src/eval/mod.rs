//! Summary and classifier evaluation: ROUGE, precision/recall/F1, paired
//! significance tests, rank correlation and annotator agreement.

mod agreement;
mod classification;
pub mod report;
mod rouge;
mod stats;

pub use agreement::{cohen_kappa, majority_vote, read_gold, write_gold, Agreement, GoldVotes};
pub use classification::{classification_report, prf, ClassificationReport};
pub use rouge::{rouge_n, rouge_text, RougeScore};
pub use stats::{
    average_ranks, mcnemar, mcnemar_counts, spearman, wilcoxon_signed_rank, McNemarMode, TestResult, WilcoxonMode,
};
