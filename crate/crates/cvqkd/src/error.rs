//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by state construction, channel propagation and rate
/// evaluation.
#[derive(Debug, Error)]
pub enum Error {
    /// An input that must be finite was NaN or infinite.
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    /// A parameter fell outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// The requested photon-number cutoff leaves too much probability mass
    /// in the top coefficient.
    #[error("Fock cutoff too small: tail mass {tail:.3e} exceeds {limit:.3e} at N = {truncation}")]
    CutoffTooSmall {
        truncation: usize,
        tail: f64,
        limit: f64,
    },

    /// A creation operator pushed significant amplitude past the cutoff.
    #[error("truncation overflow: creation drops mass {loss:.3e} past N = {truncation}")]
    TruncationOverflow { truncation: usize, loss: f64 },

    /// Covariance data that cannot come from a physical state, e.g. a
    /// symplectic eigenvalue below one beyond tolerance.
    #[error("unphysical covariance data: {0}")]
    Unphysical(String),

    /// The key rate is nonpositive everywhere on the searched interval.
    #[error("no secure operating point: key rate is nonpositive over the search interval")]
    NoSecureOperatingPoint,
}

pub type Result<T> = std::result::Result<T, Error>;
