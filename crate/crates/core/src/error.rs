use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by eyefold operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed record at line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },

    #[error("non-triangle face at line {line} ({arity} vertices)")]
    NonTriangleFace { line: usize, arity: usize },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("index {index} out of range for {len} vertices")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("count mismatch: expected {expected}, got {actual}")]
    CountMismatch { expected: usize, actual: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate curve: total arc length is zero")]
    DegenerateCurve,

    #[error("degenerate brow-to-margin frame at t = {t}")]
    DegenerateFrame { t: f64 },

    #[error("sample mismatch: {0}")]
    SampleMismatch(String),

    #[error("empty input")]
    EmptyInput,

    #[error("missing metadata for mesh id {0:?}")]
    MissingMetadata(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("topology error: {0}")]
    Topology(String),

    #[error("unknown scan {0:?}")]
    UnknownScan(String),

    #[error("no annotation for scan {0:?}")]
    NoAnnotation(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("csv error: {0}")]
    Csv(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::FileNotFound(path)
        } else {
            Error::Io { path, source }
        }
    }

    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::FileNotFound(_) => "FileNotFound",
            Error::Io { .. } => "IoError",
            Error::MalformedLine { .. } => "MalformedLine",
            Error::NonTriangleFace { .. } => "NonTriangleFace",
            Error::Schema(_) => "SchemaError",
            Error::InvariantViolation(_) => "InvariantViolation",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::CountMismatch { .. } => "CountMismatch",
            Error::Domain(_) => "DomainError",
            Error::DegenerateCurve => "DegenerateCurve",
            Error::DegenerateFrame { .. } => "DegenerateFrame",
            Error::SampleMismatch(_) => "SampleMismatch",
            Error::EmptyInput => "EmptyInput",
            Error::MissingMetadata(_) => "MissingMetadata",
            Error::DegenerateData(_) => "DegenerateData",
            Error::Topology(_) => "TopologyError",
            Error::UnknownScan(_) => "UnknownScan",
            Error::NoAnnotation(_) => "NoAnnotation",
            Error::Validation(_) => "ValidationError",
            Error::Csv(_) => "CsvError",
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
