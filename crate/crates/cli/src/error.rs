use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    /// Malformed input file; `at` is the JSON path of the offending value.
    #[error("{file}: schema error at `{at}`: {message}")]
    Schema {
        file: PathBuf,
        at: String,
        message: String,
    },

    #[error("invalid input: {0}")]
    Input(String),

    #[error(transparent)]
    Core(#[from] regulator_core::Error),

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;
