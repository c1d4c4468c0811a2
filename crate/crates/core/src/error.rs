//! Error type shared by every module in the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// An enumeration was requested above the configured ground-set cap.
    #[error("ground-set size {n} exceeds the enumeration cap {cap}")]
    SizeLimit { n: usize, cap: usize },

    /// Two arguments that must share a ground-set size do not.
    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    /// A structurally invalid argument (empty input, bad index, non-permutation, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A value lies outside the mathematical domain of the operation
    /// (partition not in the lattice, incomparable pair, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// An operator word is too long for the truncated basis to evaluate exactly.
    #[error("operator word of length {len} needs truncation degree >= {len}, basis has degree {degree}; rebuild the basis with a larger degree")]
    Truncation { len: usize, degree: usize },

    /// A moment or cumulant oracle has no value for a required word.
    #[error("oracle has no value for word [{0}]")]
    OracleGap(String),

    /// Textual input could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
