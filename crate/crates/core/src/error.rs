//! Error type shared by every module in the crate.

use std::path::PathBuf;

/// Everything that can go wrong across the library.
///
/// One flat enum keeps matching simple at the CLI boundary, where each
/// variant maps onto a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A dataset or embedding cell is NaN or infinite. Indices are 0-based.
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    /// Fewer samples than the minimum an operation can work with.
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    /// A label vector whose length does not match the number of points.
    #[error("label count {labels} does not match point count {points}")]
    LabelLengthMismatch { labels: usize, points: usize },

    /// The input path does not exist.
    #[error("file not found: {path}")]
    FileNotFound { path: PathBuf },

    /// Any I/O failure other than a missing file.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A cell that does not parse as a finite number. Line and column are
    /// 1-based, as an editor would report them.
    #[error("parse error at line {line}, column {col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },

    /// Rows of a table with differing field counts. Line is 1-based.
    #[error("ragged row at line {line}: expected {expected} fields, found {found}")]
    RaggedRows {
        line: usize,
        expected: usize,
        found: usize,
    },

    /// A projection or neighbour count larger than the data can support.
    #[error("requested dimension {requested} exceeds maximum {max}")]
    DimensionTooLarge { requested: usize, max: usize },

    /// Two sequences that must be equally long are not.
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// A probability vector or matrix that should sum to 1 does not.
    #[error("probabilities sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    /// A point whose distances to all others are zero, so no bandwidth
    /// can be fit for it.
    #[error("degenerate distance row for point {row}: all distances are zero")]
    DegenerateRow { row: usize },

    /// The optimizer produced a NaN or infinite coordinate.
    #[error("non-finite iterate at iteration {iteration}")]
    NonFiniteIterate { iteration: usize },

    /// A neighbourhood size k that exceeds n - 1.
    #[error("k = {k} too large: at most {max} neighbours available")]
    KTooLarge { k: usize, max: usize },

    /// A k-NN radius of zero, which makes radius ratios undefined.
    #[error("zero k-NN radius at point {point}; radius ratios are undefined")]
    ZeroRadius { point: usize },

    /// A synthetic data specification that is internally inconsistent.
    #[error("invalid generator spec: {0}")]
    SpecInvalid(String),

    /// An embedding configuration that fails validation.
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
