use std::io;
use std::path::PathBuf;

use callout_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{path}: malformed JSON: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{0}")]
    Usage(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    /// Process exit code: 2 for bad input, 3 for broken invariants, 4 for
    /// infeasible generator configurations.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(CoreError::Infeasible(_)) => 4,
            CliError::Core(CoreError::DuplicateInsertion(_)) | CliError::Invariant(_) => 3,
            _ => 2,
        }
    }

    pub(crate) fn file(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::File { path, source }
    }
}

pub type CliResult<T> = Result<T, CliError>;
