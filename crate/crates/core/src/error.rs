//! Error type shared by every audit stage.

use std::path::PathBuf;

use thiserror::Error;

use crate::fairness::FairnessResult;
use crate::frame::Column;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("frame is empty: at least one instance is required")]
    EmptyFrame,

    #[error("column {column} has length {found}, expected {expected}")]
    LengthMismatch {
        column: Column,
        expected: usize,
        found: usize,
    },

    #[error("column {column} has non-binary value {value} at index {index}")]
    NonBinary { column: Column, index: usize, value: i64 },

    #[error("mask has length {found}, expected {expected}")]
    MaskLength { expected: usize, found: usize },

    #[error("empty group: the selection contains no instances")]
    EmptySelection,

    #[error("group {group} has no instances")]
    GroupHasNoInstances { group: u8 },

    #[error("EO requires true labels")]
    MissingTrueLabels,

    #[error("unknown metric name {0:?}")]
    UnknownMetric(String),

    #[error("invalid threshold for {metric}: {reason}")]
    InvalidThreshold { metric: String, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("epsilon must be positive, got {0}")]
    InvalidEpsilon(f64),

    #[error("statistical parity gap {epsilon} is unreachable; best achievable gap is {best_gap}")]
    EpsilonUnreachable { epsilon: f64, best_gap: f64 },

    #[error("debiasing failed after the fairness gate ran: {source}")]
    DebiasFailed {
        pre_fairness: Box<FairnessResult>,
        #[source]
        source: Box<Error>,
    },

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unknown column {0:?}")]
    UnknownColumn(String),

    #[error("column {0:?} is mapped more than once")]
    DuplicateColumn(String),

    #[error("row {row}, column {column:?}: value {value:?} is not 0 or 1")]
    NonBinaryCell { row: usize, column: String, value: String },

    #[error("row {row}, column {column:?}: missing value")]
    MissingCell { row: usize, column: String },

    #[error("row {row} has {found} fields, expected {expected}")]
    RaggedRow { row: usize, expected: usize, found: usize },

    #[error("malformed input: {0}")]
    Malformed(String),
}

impl Error {
    /// Stable machine-readable code for the error class.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyFrame => "E_EMPTY_FRAME",
            Error::LengthMismatch { .. } => "E_LENGTH_MISMATCH",
            Error::NonBinary { .. } => "E_NON_BINARY",
            Error::MaskLength { .. } => "E_MASK_LENGTH",
            Error::EmptySelection => "E_EMPTY_GROUP",
            Error::GroupHasNoInstances { .. } => "E_MISSING_GROUP",
            Error::MissingTrueLabels => "E_MISSING_TRUE_LABELS",
            Error::UnknownMetric(_) => "E_UNKNOWN_METRIC",
            Error::InvalidThreshold { .. } => "E_INVALID_THRESHOLD",
            Error::Config(_) => "E_CONFIG",
            Error::InvalidScenario(_) => "E_INVALID_SCENARIO",
            Error::InvalidEpsilon(_) => "E_INVALID_EPSILON",
            Error::EpsilonUnreachable { .. } => "E_EPSILON_UNREACHABLE",
            Error::DebiasFailed { .. } => "E_DEBIAS_FAILED",
            Error::Read { .. } => "E_UNREADABLE_FILE",
            Error::Write { .. } => "E_UNWRITABLE_PATH",
            Error::UnknownColumn(_) => "E_UNKNOWN_COLUMN",
            Error::DuplicateColumn(_) => "E_DUPLICATE_COLUMN",
            Error::NonBinaryCell { .. } => "E_NON_BINARY_CELL",
            Error::MissingCell { .. } => "E_MISSING_CELL",
            Error::RaggedRow { .. } => "E_RAGGED_ROW",
            Error::Malformed(_) => "E_MALFORMED",
        }
    }
}
