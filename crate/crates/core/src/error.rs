use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the decomposition toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("signal too short: {len} samples, need at least {min}")]
    SignalTooShort { len: usize, min: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("signal power is zero, SNR is undefined")]
    ZeroPower,

    #[error("zero variance or zero norm input: {0}")]
    Degenerate(String),

    #[error("spectrum has no dominant frequency above DC")]
    NoDominantFrequency,

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("symmetric eigensolver did not converge for eigenvalue {index}")]
    NoConvergence { index: usize },

    #[error("empty eigenbasis")]
    EmptyBasis,

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the numerical core (as opposed to bad input or I/O).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotPositiveDefinite { .. }
                | Error::NoConvergence { .. }
                | Error::SignalTooShort { .. }
                | Error::NoDominantFrequency
                | Error::EmptyBasis
                | Error::Degenerate(_)
                | Error::ZeroPower
        )
    }

    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::Io { .. } | Error::Parse { .. } | Error::Json { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
