use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution parameters: {0}")]
    InvalidDistributionParams(String),

    #[error("invalid size bounds a={a}, b={b}: need 2 <= a <= b")]
    InvalidSizeBounds { a: f64, b: f64 },

    #[error("invalid fraction {name}={value}: {requirement}")]
    InvalidFraction {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("invalid condition number kappa={0}")]
    InvalidKappa(f64),

    #[error("invalid rank L={rank} for a {m}x{n} matrix")]
    InvalidRank { rank: usize, m: usize, n: usize },

    #[error("invalid singular value parameters: {0}")]
    InvalidSingularValueParams(String),

    #[error("matrix has no singular value above the absolute floor")]
    ZeroMatrix,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("singular value mutation needs rank >= 2, got {0}")]
    RankTooSmall(usize),

    #[error("size mismatch: source is {source_m}x{source_n}, target is {target_m}x{target_n}")]
    SizeMismatch {
        source_m: usize,
        source_n: usize,
        target_m: usize,
        target_n: usize,
    },

    #[error("position {pos} out of range 0..{len}")]
    PositionOutOfRange { pos: usize, len: usize },

    #[error("empty batch")]
    EmptyBatch,

    #[error("invalid coding: {0}")]
    InvalidCoding(String),

    #[error("I/O failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.into(),
        }
    }
}
