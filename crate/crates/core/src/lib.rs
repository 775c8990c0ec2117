//! Strong summability means of Fourier series of periodic and Stepanov
//! almost periodic functions, sequence class checkers for summability
//! matrices, and a harness comparing both sides of approximation bounds.

pub mod apfun;
pub mod error;
pub mod extremum;
pub mod fixtures;
pub mod norms;
pub mod quadrature;
pub mod seqclass;
mod serde_util;
pub mod summation;
pub mod verify;

pub use apfun::{APFunction, PeriodicFunction, Term};
pub use error::{Error, Result};
pub use fixtures::Fixture;
pub use norms::{Measured, NormKind, NormSpace};
pub use seqclass::{ClassReport, MatrixRow, SummabilityMatrix};
pub use summation::{GammaSequence, QuadratureSpec};
pub use verify::{BoundCase, BoundReport, Majorant, Statement, Verifier};
