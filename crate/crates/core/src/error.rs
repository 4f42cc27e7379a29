use thiserror::Error;

/// Errors raised by field operations, the solver and the monitor.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite sample {value} at index ({}, {}, {})", index[0], index[1], index[2])]
    NonFinite { index: [usize; 3], value: f64 },

    #[error(
        "coefficients are not Hermitian: worst violation {violation:e} at k = ({}, {}, {})",
        k[0], k[1], k[2]
    )]
    NotHermitian { k: [i64; 3], violation: f64 },

    #[error("grid mismatch: {0} vs {1} points per axis")]
    GridMismatch(usize, usize),

    #[error("invalid grid size {0}: must be even and at least 8")]
    InvalidGrid(usize),

    #[error("invalid Lebesgue exponent {0}: must satisfy p >= 1")]
    InvalidExponent(f64),

    #[error("{theorem} requires {range}, got s = {s}")]
    ParameterOutOfRange {
        theorem: String,
        range: String,
        s: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty time series")]
    EmptySeries,

    #[error("time series is not strictly increasing at sample {0}")]
    NonMonotoneTime(usize),

    #[error(
        "blow-up at t = {time}: {reason} (worst mode k = ({}, {}, {}))",
        worst_mode[0], worst_mode[1], worst_mode[2]
    )]
    BlowUp {
        time: f64,
        reason: String,
        worst_mode: [i64; 3],
    },

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
