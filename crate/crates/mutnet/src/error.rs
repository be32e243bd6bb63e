//! Crate-wide error type.

use crate::data::Split;
use crate::mutation::{MutantRecord, PoolStats};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{context}: expected dimension {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("non-finite value in {0}")]
    NotFinite(String),

    #[error("invalid parameter: {0}")]
    InvalidSpec(String),

    #[error("empty batch")]
    EmptyBatch,

    #[error("empty dataset")]
    EmptyDataset,

    #[error("{0:?} split is empty")]
    EmptySplit(Split),

    #[error("empty mutant pool")]
    EmptyPool,

    #[error("csv parse error at row {row}, column {column}: {message}")]
    CsvParse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("label column {0:?} not found in header")]
    LabelColumnNotFound(String),

    #[error("train split would be empty")]
    TrainSplitEmptied,

    #[error("empty mutation: no elements selected")]
    EmptyMutation,

    #[error("mutation not applicable: {0}")]
    MutationNotApplicable(String),

    #[error("attempt budget exhausted: {} of {} mutants retained after {} attempts", partial.pool.len(), partial.requested, partial.attempts)]
    BudgetExhausted { partial: Box<PartialPool> },

    #[error("no scorable mutants: every mutant is pseudo-equivalent")]
    NoScorableMutants,

    #[error("insufficient calibration data: got {got} samples, need {need}")]
    InsufficientCalibrationData { got: usize, need: usize },

    #[error("degenerate training set: {0}")]
    DegenerateTrainingSet(String),

    #[error("convergence failed: {0}")]
    ConvergenceFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Retained mutants and stats accumulated before the attempt budget ran out.
#[derive(Debug)]
pub struct PartialPool {
    pub pool: Vec<MutantRecord>,
    pub stats: PoolStats,
    pub requested: usize,
    pub attempts: usize,
}
