use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("denominator vanishes at q = {q}")]
    PoleAtQ { q: f64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("non-finite value {0}")]
    NonFinite(f64),
    #[error("negative radicand: {0}")]
    NegativeRadicand(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid basis label {0}")]
    InvalidLabel(String),
    #[error("label {label} lies outside the truncation nmax = {nmax}")]
    OutOfTruncation { label: String, nmax: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operator is not diagonal")]
    NotDiagonal,
    #[error("singular Gram matrix in weight class {0}")]
    SingularGram(String),
    #[error("inconsistent linear system: {0}")]
    InconsistentSystem(String),
    #[error("element leaves the truncated span: {0}")]
    TruncationOverflow(String),
    #[error("nonvanishing coefficient dropped at {0}")]
    NonvanishingDrop(String),
    #[error("sign gauge cannot be fixed: {0}")]
    GaugeFailure(String),
    #[error("index pairing has no spectral gap around threshold {threshold}: {detail}")]
    UnstableIndex { threshold: f64, detail: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
