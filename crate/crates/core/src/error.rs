//! Crate-wide error type.

use thiserror::Error;

use crate::sets::Base;

/// Every failure mode surfaced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("no closed-form relation between bases {a} and {b}")]
    UnknownBasePair { a: Base, b: Base },

    #[error("index {index} is outside the range of collection {collection}")]
    IndexOutOfRange { collection: String, index: usize },

    #[error("collection {collection} lacks the {capability} capability")]
    CapabilityMissing {
        collection: String,
        capability: String,
    },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("language {index} of {collection} has no {kind} tell-tale")]
    NoTellTale {
        collection: String,
        index: usize,
        kind: String,
    },

    #[error("version space is empty")]
    EmptyVersionSpace,

    #[error("({collection}, star {star}, {kind}) is not a declared violation point")]
    NotAViolationPoint {
        collection: String,
        star: usize,
        kind: String,
    },

    #[error("support is empty")]
    EmptySupport,

    #[error("support is undefined")]
    UndefinedSupport,

    #[error("generator {generator} only runs on {expected}, not {found}")]
    WrongCollection {
        generator: String,
        expected: String,
        found: String,
    },

    #[error("phase stalled after {budget} steps: {verdict}")]
    StalledPhase { budget: u64, verdict: String },

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for errors that stem from a collection lacking an oracle.
    pub fn is_capability(&self) -> bool {
        matches!(
            self,
            Error::CapabilityMissing { .. }
                | Error::NoTellTale { .. }
                | Error::NotAViolationPoint { .. }
                | Error::WrongCollection { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
