use thiserror::Error;

/// Errors produced by ingestion, metric evaluation, clustering, and tests of
/// independence. Line numbers are 1-based and refer to the source CSV,
/// header included.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Ingest { line: usize, message: String },

    #[error("line {line}: duplicate label code {code:?}")]
    DuplicateCode { line: usize, code: String },

    #[error("line {line}: invalid label code {code:?}: {reason}")]
    InvalidCode {
        line: usize,
        code: String,
        reason: &'static str,
    },

    #[error("line {line}: sequence {id:?} uses unknown label code {code:?}")]
    UnknownCode {
        line: usize,
        id: String,
        code: String,
    },

    #[error("line {line}: duplicate sequence id {id:?}")]
    DuplicateId { line: usize, id: String },

    #[error("line {line}: attribute row for unknown sequence id {id:?}")]
    UnknownAttributeId { line: usize, id: String },

    #[error("line {line}: empty sequence cell for id {id:?}")]
    EmptySequence { line: usize, id: String },

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("mileage for {organization:?} must be positive to compute a rate")]
    ZeroMiles { organization: String },

    #[error("label {code:?} is not in the alphabet")]
    UnknownLabel { code: String },

    #[error("reverse conditional undefined: label {code:?} never occurs")]
    UndefinedConditional { code: String },

    #[error("invalid cost scheme: {0}")]
    InvalidCostScheme(String),

    #[error("metric domain error for pair ({id_a:?}, {id_b:?}): {message}")]
    MetricDomain {
        id_a: String,
        id_b: String,
        message: String,
    },

    #[error("k = {k} out of range for {n} sequences")]
    KOutOfRange { k: usize, n: usize },

    #[error("silhouette is undefined for a single cluster")]
    SilhouetteUndefined,

    #[error("invalid k range {k_min}..={k_max} for {n} sequences")]
    InvalidKRange {
        k_min: usize,
        k_max: usize,
        n: usize,
    },

    #[error("attribute {name:?} is not declared")]
    UnknownAttribute { name: String },

    #[error("contingency table is empty after filtering")]
    EmptyTable,

    #[error("degenerate contingency table: {0}")]
    DegenerateTable(String),

    #[error("regroup mapping does not cover observed category {category:?}")]
    UnmappedCategory { category: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
