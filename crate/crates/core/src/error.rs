use thiserror::Error;

/// Errors raised by operations on the dyadic group and its function spaces.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("resolution mismatch: {left} vs {right}")]
    Mismatch { left: u32, right: u32 },

    /// The object cannot be represented exactly at the working resolution.
    #[error("{what} needs resolution {needed}, have {have}")]
    Resolution {
        what: String,
        needed: u32,
        have: u32,
    },

    #[error("{0}")]
    Range(String),

    #[error("exponent must satisfy {constraint}, got {value}")]
    Exponent {
        value: f64,
        constraint: &'static str,
    },

    #[error("invalid alpha sequence: {0}")]
    Alpha(String),

    #[error("length {got} is not 2^{resolution} = {expected}")]
    Length {
        resolution: u32,
        expected: usize,
        got: usize,
    },

    #[error("non-finite value at cell {0}")]
    NonFinite(usize),

    #[error("resolution {requested} exceeds the memory gate {limit}")]
    MemoryGate { requested: u32, limit: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn range(msg: impl Into<String>) -> Error {
    Error::Range(msg.into())
}
