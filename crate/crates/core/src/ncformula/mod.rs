//! Non-commutative rational formulas: parsing, evaluation on matrices and
//! linearization to pencils.

mod ast;
pub mod bergman;
mod formula;
pub mod linearize;
mod parse;
pub mod random;

use thiserror::Error;

use crate::exactmat::MatrixError;
use crate::pencil::PencilError;

pub use ast::Expr;
pub use bergman::{
    bergman_dichotomy, bergman_psi, counterexample_expr, find_blowup_nonmonotone, random_assignment,
    scan_gates, BergmanOutcome, BergmanReport, GateScan, NonMonotoneGate,
};
pub use formula::{eval, eval_formula, eval_gates, Assignment, EvalOutcome, Formula, Gate};
pub use linearize::{linearize, Realization};
pub use parse::{parse, SyntaxError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("variable {0:?} has no value")]
    Unbound(String),
    #[error("value for {name:?} is {got:?}, expected {expected}x{expected}")]
    AssignmentShape {
        name: String,
        expected: usize,
        got: (usize, usize),
    },
    #[error("modulus {0} is too small (need at least 2^40)")]
    ModulusTooSmall(u64),
    #[error("at least one trial is required")]
    NoTrials,
    #[error(
        "no gate among {gates} showed r2/2 > r3/3; the construction guarantees one, \
         so the random points were unlucky or the expression does not separate 2x2 from 3x3"
    )]
    NotFound { gates: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Pencil(#[from] PencilError),
}

#[cfg(test)]
mod tests;
