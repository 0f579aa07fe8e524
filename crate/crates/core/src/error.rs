//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Matrix shapes inconsistent with the governing product system spec.
    #[error("shape error: {0}")]
    Shape(String),

    /// A hypothesis of the operation failed beyond tolerance (e.g. a
    /// subspace handed in as a quotient subspace is not one).
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// An identity the construction relies on failed beyond tolerance,
    /// signalling a broken input rather than a mathematical outcome.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
