use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lexicon: {0}")]
    Lexicon(String),

    #[error("population too small: requested {requested}, available {available}")]
    PopulationTooSmall { requested: usize, available: u128 },

    #[error("no derivation for sentence {0:?}")]
    Unparseable(String),

    #[error("arity mismatch: cannot apply {head} to {arg}")]
    Arity { head: String, arg: String },

    #[error("term did not normalize within {0} reduction steps")]
    NonNormalizing(usize),

    #[error("term is not a formula: {0}")]
    NotAFormula(String),

    #[error("parse error at token {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("parse error at line {line}: {message}")]
    ParseLine { line: usize, message: String },

    #[error("unsupported formula shape: {0}")]
    UnsupportedShape(String),

    #[error("infeasible split: {0}")]
    InfeasibleSplit(String),

    #[error("duplicate record id {0}")]
    DuplicateId(String),

    #[error("no records")]
    NoRecords,

    #[error("external prover: {0}")]
    External(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(position: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            position,
            message: message.into(),
        }
    }
}
