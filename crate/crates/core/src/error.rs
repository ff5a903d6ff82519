use std::path::PathBuf;

use crate::alignment::{BeadType, Violation};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("embedding file size {size} is not a multiple of {row_bytes} bytes (dim {dim})")]
    SizeMismatch {
        size: u64,
        dim: usize,
        row_bytes: u64,
    },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("non-finite value in embedding row {row}")]
    NonFinite { row: usize },

    #[error("{name} = {value} out of range: {expected}")]
    OutOfRange {
        name: &'static str,
        value: String,
        expected: &'static str,
    },

    #[error("unknown bead type {0}")]
    UnknownBeadType(BeadType),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid alignment: {0}")]
    Invalid(#[from] Violation),

    #[error("{0}")]
    Validation(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn out_of_range(
        name: &'static str,
        value: impl std::fmt::Display,
        expected: &'static str,
    ) -> Self {
        Error::OutOfRange {
            name,
            value: value.to_string(),
            expected,
        }
    }
}
