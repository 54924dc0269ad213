use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("input is empty")]
    EmptyInput,

    #[error("object index {index} out of range for dataset of {n} objects")]
    OutOfBounds { index: usize, n: usize },

    #[error("invalid insertion order: {0}")]
    InvalidPermutation(String),

    #[error("object {0} is already stored in the tree")]
    DuplicateInsertion(usize),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("infeasible configuration: {0}")]
    Infeasible(String),

    #[error("mixture fit failed: {0}")]
    Fit(String),

    #[error("metric undefined: {0}")]
    Metric(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
