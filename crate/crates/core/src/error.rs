use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = RelarmError> = std::result::Result<T, E>;

/// Errors raised anywhere in the rating pipeline.
///
/// Variants split into two families: input validation problems (bad files,
/// inconsistent configuration, shape mismatches) and numerical failures
/// (eigensolver non-convergence, degenerate data). The CLI maps the first
/// family to exit code 1 and the second to exit code 2.
#[derive(Debug, Error)]
pub enum RelarmError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed CSV: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: malformed JSON: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("row {row}, column {column} ({name}): missing value")]
    MissingCell {
        row: usize,
        column: usize,
        name: String,
    },

    #[error("row {row}, column {column} ({name}): {value:?} is not a finite number")]
    NonNumericCell {
        row: usize,
        column: usize,
        name: String,
        value: String,
    },

    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("row {row}: duplicate object id {id:?}")]
    DuplicateObject { row: usize, id: String },

    #[error("indicator {0:?} appears in the data but not in the indicator specs")]
    UndeclaredIndicator(String),

    #[error("indicator {0:?} is declared but missing from the data")]
    MissingIndicator(String),

    #[error("invalid indicator spec: {0}")]
    InvalidIndicator(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("pre-normalized indicator {indicator:?}, object {object:?}: value {value} is outside [0, 1]")]
    OutOfUnitRange {
        indicator: String,
        object: String,
        value: f64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("index {index} out of range for {context} (valid: 0..{len})")]
    IndexOutOfRange {
        context: &'static str,
        index: usize,
        len: usize,
    },

    #[error("category {0:?} cannot be collapsed onto the rating scale")]
    UncollapsibleCategory(String),

    #[error("fixture check failed: {0}")]
    Fixture(String),

    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl RelarmError {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Self::NoConvergence { .. } | Self::Numerical(_))
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Self::Csv {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        Self::Json {
            path: path.into(),
            source,
        }
    }
}
