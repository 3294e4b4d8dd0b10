//! Exact scalars and dense matrices.
//!
//! Everything above this module works with [`DenseMatrix`], which stores its
//! entries either as big rationals or as residues modulo a word-sized prime.
//! The two representations share one API; kernels are written once against
//! the private [`field::Arith`] trait and dispatched on the domain.

mod field;
mod matrix;
mod rank;
mod scalar;
pub mod sparse;

pub use matrix::DenseMatrix;
pub(crate) use rank::rank_mod_p;
pub use scalar::{parse_rational, PrimeField, Scalar, ScalarDomain, DEFAULT_MODULUS, MIN_RANDOMIZED_MODULUS};
pub use sparse::SparseMatrix;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("{0} is not a prime below 2^63")]
    NotPrime(u64),
    #[error("domain mismatch: {left} vs {right}")]
    DomainMismatch { left: ScalarDomain, right: ScalarDomain },
    #[error("dimension mismatch: {op} on {left:?} and {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix must be square, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("cannot delete the last row and column of a {0}x{1} matrix")]
    DimensionUnderflow(usize, usize),
    #[error("entry buffer has length {got}, expected {expected}")]
    BadLength { expected: usize, got: usize },
    #[error("index ({0}, {1}) out of range")]
    OutOfRange(usize, usize),
    #[error("cannot parse scalar {0:?}")]
    BadScalar(String),
    #[error("denominator of {value} vanishes modulo {modulus}")]
    DenominatorVanishes { value: String, modulus: u64 },
}
