use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("series too short: length {len} requires at least {required}")]
    SeriesTooShort { len: usize, required: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no cross-sectional variation")]
    NoCrossSectionalVariation,

    #[error("intraday pattern is zero at minute {minute}")]
    ZeroPattern { minute: usize },

    #[error("{message}, line {line}")]
    Record { line: u64, message: String },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable machine-readable category name.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::SeriesTooShort { .. } => "series_too_short",
            Error::DegenerateInput(_) => "degenerate_input",
            Error::InsufficientData(_) => "insufficient_data",
            Error::Domain(_) => "domain",
            Error::NoCrossSectionalVariation => "no_cross_sectional_variation",
            Error::ZeroPattern { .. } => "zero_pattern",
            Error::Record { .. } => "record",
            Error::Internal(_) => "internal",
            Error::Io { .. } => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
