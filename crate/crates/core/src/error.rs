use thiserror::Error;

use crate::fol::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("atom index {index} out of range for {n} atoms")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("{what} is limited to n <= {limit} (got n = {n}); raise the guard to override")]
    GuardExceeded {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("cycle {0} is an identity cycle and cannot be chosen freely")]
    IdentityCycleChosen(usize),

    #[error("invalid census parameters n = {n}, s = {s} (need 1 <= s <= n and n - s even)")]
    InvalidCensus { n: usize, s: usize },

    #[error("closed-form FAS count at n = {n} is outside the oracle-validated range n <= {validated}")]
    Unvalidated { n: usize, validated: usize },

    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),

    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),

    #[error("invalid extension-axiom parameters: {0}")]
    InvalidPattern(String),

    #[error("json: {0}")]
    Json(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
