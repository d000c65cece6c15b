use std::path::PathBuf;

use thiserror::Error;

/// Errors returned by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("amplitude label width {0} out of range 1..=7")]
    LabelWidth(u32),

    #[error("invalid probability mass function: {0}")]
    InvalidPmf(String),

    #[error("invalid rate parameters: {0}")]
    InvalidRates(String),

    #[error("rate loss is negative ({0:.3e}); the configuration carries more bits than its entropy allows")]
    NegativeRateLoss(f64),

    #[error("non-finite SNR")]
    NonFiniteSnr,

    #[error("empty sample set")]
    EmptySamples,

    #[error("invalid HiDM tree at layer {layer}: {reason}")]
    InvalidTree { layer: usize, reason: String },

    #[error("invalid HiDM tree: {0}")]
    TreeMismatch(String),

    #[error("expected {expected} input bits, got {actual}")]
    InputLength { expected: usize, actual: usize },

    #[error("invalid composition: {0}")]
    InvalidComposition(String),

    #[error("requested {requested} input bits but the composition only supports {available}")]
    InfeasibleInputBits { requested: u64, available: u64 },

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("parity-check matrix is not encodable: {0}")]
    NotEncodable(String),

    #[error("frame geometry: {0}")]
    Geometry(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("{n_errors} errors requested for a {word_len}-bit word")]
    TooManyErrors { n_errors: usize, word_len: usize },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, reason: impl Into<String>) -> Self {
        Error::Parse {
            line,
            reason: reason.into(),
        }
    }
}
