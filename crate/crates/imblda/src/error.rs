use std::path::PathBuf;

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix is not symmetric: |a[{i}][{j}] - a[{j}][{i}]| exceeds tolerance")]
    NotSymmetric { i: usize, j: usize },

    #[error("matrix is not positive definite (pivot {pivot:.3e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("invalid covariance spec: {0}")]
    InvalidSpec(String),

    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("class {label} has no samples")]
    EmptyClass { label: u8 },

    #[error("too few samples: need at least {required}, got {actual}")]
    TooFewSamples { required: usize, actual: usize },

    #[error("invalid part sizes: {0}")]
    InvalidSizes(String),

    #[error("selected set of size {s} is too large; must be below {max}")]
    SelectionTooLarge { s: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("empty list")]
    EmptyList,

    #[error("parse error in {path}{at}: {message}", at = location_suffix(.row, .column))]
    Parse {
        path: PathBuf,
        row: Option<usize>,
        column: Option<String>,
        message: String,
    },

    #[error("invalid label {value} at row {row}: labels must be 1 or 2")]
    Label { row: usize, value: String },

    #[error("invalid config field `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("{context}: {source}")]
    Experiment {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn location_suffix(row: &Option<usize>, column: &Option<String>) -> String {
    match (row, column) {
        (Some(r), Some(c)) => format!(" (row {r}, column {c})"),
        (Some(r), None) => format!(" (row {r})"),
        (None, Some(c)) => format!(" (column {c})"),
        (None, None) => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
