//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

/// Errors produced by ingestion, feature extraction, and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to decode {path}: {reason}")]
    Decode { path: PathBuf, reason: String },

    #[error("unsupported pixel format in {path}: {found} (supported: 8-bit and 16-bit gray/RGB)")]
    UnsupportedFormat { path: PathBuf, found: String },

    #[error("cannot encode {path}: {reason}")]
    Encode { path: PathBuf, reason: String },

    #[error("grid must be non-empty")]
    EmptyGrid,

    #[error("{width}x{height} grid needs {expected} values, got {got}")]
    ShapeMismatch {
        width: usize,
        height: usize,
        expected: usize,
        got: usize,
    },

    #[error("non-finite value at pixel index {index}")]
    NonFinite { index: usize },

    #[error("channel dimensions disagree: {0}")]
    ChannelMismatch(String),

    #[error("square side {side} does not fit a {n}x{n} grid with its margin")]
    SquareTooLarge { side: usize, n: usize },

    #[error("threshold grid needs at least 2 points, got {0}")]
    TooFewThresholds(usize),

    #[error("dataset root {path} must contain exactly 2 class directories, found {found}")]
    ClassLayout { path: PathBuf, found: usize },

    #[error("dataset under {path} contains no readable images")]
    EmptyDataset { path: PathBuf },

    #[error("feature vector length {got} does not match schema length {expected}")]
    FeatureLength { expected: usize, got: usize },

    #[error("feature matrix is empty")]
    EmptyMatrix,

    #[error("feature matrices disagree: {0}")]
    MatrixMismatch(String),

    #[error("labels and rows disagree in length: {labels} labels for {rows} rows")]
    LabelLength { labels: usize, rows: usize },

    #[error("training set must contain both classes")]
    SingleClassTraining,

    #[error("training set is empty")]
    EmptyTraining,

    #[error("prediction input has {got} features, model expects {expected}")]
    ModelArity { expected: usize, got: usize },

    #[error("model file version {got} is not supported (expected {expected})")]
    ModelVersion { expected: u32, got: u32 },

    #[error("label vectors disagree in length: {a} vs {b}")]
    LabelPairLength { a: usize, b: usize },

    #[error("label vector is empty")]
    EmptyLabels,

    #[error("bootstrap needs at least 1 round")]
    NoRounds,

    #[error(
        "train fraction {0} must lie strictly between 0 and 1 and leave both splits non-empty"
    )]
    BadTrainFraction(f64),

    #[error(
        "bootstrap round {round} drew a single-class training split; use more data or another seed"
    )]
    DegenerateSplit { round: usize },

    #[error("reference diagram guard: {0}")]
    OracleGuard(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
