use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate doc_id `{0}`")]
    DuplicateDocId(String),

    #[error("document `{0}` has no sentences")]
    EmptyDocument(String),

    #[error("empty-sentence: sentence has no word tokens")]
    EmptySentence,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("document `{0}` has no reference summary")]
    MissingSummary(String),

    #[error("extract sentence id {id} out of range for document `{doc_id}` ({len} sentences)")]
    ExtractOutOfRange { doc_id: String, id: usize, len: usize },

    #[error("degenerate-training-set: {0}")]
    DegenerateTrainingSet(String),

    #[error("empty positive set")]
    EmptyPositiveSet,

    #[error("layout mismatch: model expects {expected}, features have {found}")]
    LayoutMismatch { expected: String, found: String },

    #[error("feature dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported model version {found} (expected {expected})")]
    ModelVersion { expected: u32, found: u32 },

    #[error("model file integrity check failed: {0}")]
    HashMismatch(String),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("zero-variance: input is constant")]
    ZeroVariance,

    #[error("tie-possible: item {item} has an even number of votes ({votes})")]
    TiePossible { item: usize, votes: usize },

    #[error("degenerate agreement: expected agreement is 1 but annotations differ")]
    DegenerateAgreement,

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by malformed inputs or configuration rather than by a
    /// failure while running a well-formed job.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::DuplicateDocId(_)
                | Error::EmptyDocument(_)
                | Error::Config(_)
                | Error::ExtractOutOfRange { .. }
                | Error::LayoutMismatch { .. }
                | Error::ModelVersion { .. }
                | Error::HashMismatch(_)
                | Error::InvalidInput(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
