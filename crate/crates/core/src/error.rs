use thiserror::Error;

use crate::digits::DigitString;

pub type Result<T, E = CfError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CfError {
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("operation undefined for the empty digit string")]
    EmptyString,
    #[error("precision exhausted after {} safe digit(s) [{emitted}]", emitted.len())]
    PrecisionExhausted { emitted: DigitString },
    #[error("overlapping fundamental intervals: {first} and {second}")]
    Overlap {
        first: DigitString,
        second: DigitString,
    },
}

impl CfError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        CfError::Domain(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        CfError::InvalidParameter(msg.into())
    }
}
