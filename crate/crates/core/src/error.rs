use std::fmt;

use thiserror::Error;

/// Opaque node label. Labels survive every tree transformation unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub struct Label(pub u32);

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{what} {value} out of range 1..={len}")]
    Range {
        what: &'static str,
        value: usize,
        len: usize,
    },
    #[error("occurrence {index} of symbol {symbol} does not exist (only {count} present)")]
    NotFound {
        symbol: u8,
        index: usize,
        count: usize,
    },
    #[error("contract violated: {0}")]
    Contract(String),
    #[error("invalid tree at node {node}: {reason}")]
    InvalidTree { node: Label, reason: String },
    #[error("invalid input at index {index}: {reason}")]
    Validation { index: usize, reason: String },
    #[error("parse error at position {position}: {reason}")]
    Parse { position: usize, reason: String },
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
