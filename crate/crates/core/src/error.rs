use thiserror::Error;

/// Errors raised by the numerical routines and loaders of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid exponent {0}: expected a value in the admissible range")]
    InvalidExponent(f64),

    #[error("invalid arguments: {0}")]
    InvalidArguments(String),

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("gap violation: {0}")]
    GapViolation(String),

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("quadrature tolerance not met ({achieved:.3e} > {requested:.3e}) within {subdivisions} subdivisions")]
    ToleranceNotMet {
        achieved: f64,
        requested: f64,
        subdivisions: usize,
    },

    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),

    #[error("row {n} violates the unit row-sum condition (sum = {sum})")]
    RowSumViolation { n: usize, sum: f64 },

    #[error("invalid c = {0}: must exceed 1")]
    InvalidC(f64),

    #[error("hypothesis violation: {0}")]
    HypothesisViolation(String),

    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
