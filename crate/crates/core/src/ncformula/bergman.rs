//! Bergman's two-variable expression and the blow-up non-monotonicity search.
//!
//! With `W' = [x, W]` and `δ(W) = (W²)' · ((W⁻¹)')⁻¹`, the expression is
//! `ψ = δ(y') δ(y'') ((δ(y'')⁻¹)') ((δ(y''')⁻¹)')` where `y'' = [x, y']` and
//! `y''' = [x, y'']`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ast::Expr;
use super::formula::{eval_formula, Assignment, EvalOutcome, Formula};
use super::linearize::linearize;
use super::FormulaError;
use crate::exactmat::{DenseMatrix, PrimeField, ScalarDomain, MIN_RANDOMIZED_MODULUS};
use crate::pencil::estimate::square_trials;
use crate::rng;

const TAG_BERGMAN: u64 = 0x62;
const TAG_GATE: u64 = 0x67;

fn prime(w: Expr) -> Expr {
    Expr::comm(Expr::var("x"), w)
}

fn delta(w: Expr) -> Expr {
    let sq = prime(Expr::mul(w.clone(), w.clone()));
    Expr::mul(sq, Expr::inv(prime(Expr::inv(w))))
}

/// `ψ` in the variables `x`, `y`.
pub fn bergman_psi() -> Expr {
    let y1 = prime(Expr::var("y"));
    let y2 = prime(y1.clone());
    let y3 = prime(y2.clone());
    let head = Expr::mul(delta(y1), delta(y2.clone()));
    let t2 = prime(Expr::inv(delta(y2)));
    let t3 = prime(Expr::inv(delta(y3)));
    Expr::mul(Expr::mul(head, t2), t3)
}

/// `(ψ - 1)⁻¹`.
pub fn counterexample_expr() -> Expr {
    Expr::inv(Expr::sub(bergman_psi(), Expr::int(1)))
}

/// Uniformly random `n x n` matrices for the variables of `f`, drawn from
/// the stream of `seed` named by `tags`.
pub fn random_assignment(
    f: &Formula,
    n: usize,
    field: PrimeField,
    seed: u64,
    tags: &[u64],
) -> Result<Assignment, FormulaError> {
    let mut rng = rng::stream(seed, tags);
    let mut at = Assignment::new(
        n,
        ScalarDomain::PrimeField {
            modulus: field.modulus(),
        },
    );
    for v in f.vars() {
        at.set(v, DenseMatrix::random(n, n, field, &mut rng))?;
    }
    Ok(at)
}

pub(crate) fn checked_field(modulus: u64) -> Result<PrimeField, FormulaError> {
    let field = PrimeField::new(modulus)?;
    if field.modulus() < MIN_RANDOMIZED_MODULUS {
        return Err(FormulaError::ModulusTooSmall(field.modulus()));
    }
    Ok(field)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BergmanOutcome {
    Zero,
    Identity,
    Other,
    Undefined { gate: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BergmanReport {
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub modulus: u64,
    pub expected: BergmanOutcome,
    pub outcomes: Vec<BergmanOutcome>,
    pub passed: bool,
}

/// Evaluates `ψ` at `trials` random `dim x dim` pairs. Expected: zero for
/// `dim = 2`, the identity for `dim = 3`.
pub fn bergman_dichotomy(
    dim: usize,
    trials: usize,
    seed: u64,
    modulus: u64,
) -> Result<BergmanReport, FormulaError> {
    if trials == 0 {
        return Err(FormulaError::NoTrials);
    }
    let field = checked_field(modulus)?;
    let f = Formula::from_expr(&bergman_psi());
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| {
            let at = random_assignment(&f, dim, field, seed, &[TAG_BERGMAN, dim as u64, t as u64])?;
            Ok(match eval_formula(&f, &at)? {
                EvalOutcome::Undefined(gate) => BergmanOutcome::Undefined { gate },
                EvalOutcome::Value(m) if m.is_zero() => BergmanOutcome::Zero,
                EvalOutcome::Value(m) if m.is_identity() => BergmanOutcome::Identity,
                EvalOutcome::Value(_) => BergmanOutcome::Other,
            })
        })
        .collect::<Result<Vec<_>, FormulaError>>()?;
    let expected = match dim {
        2 => BergmanOutcome::Zero,
        3 => BergmanOutcome::Identity,
        _ => BergmanOutcome::Other,
    };
    let passed = matches!(dim, 2 | 3) && outcomes.iter().all(|o| *o == expected);
    Ok(BergmanReport {
        dim,
        trials,
        seed,
        modulus: field.modulus(),
        expected,
        outcomes,
        passed,
    })
}

/// A gate whose pencil has `r2 / 2 > r3 / 3`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonMonotoneGate {
    pub gate_id: usize,
    pub size: usize,
    pub r2: usize,
    pub r3: usize,
}

/// Blow-up ranks of one gate pencil. `r2` is only computed when `r3` is
/// short of full, since `r2 <= 2s` rules the gate out otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateScan {
    pub gate_id: usize,
    pub size: usize,
    pub r3: usize,
    pub r2: Option<usize>,
}

fn max_until_full(support: &crate::pencil::Support, m: usize, d: usize, trials: usize, seed: u64) -> usize {
    let full = d * support.rows;
    let mut best = 0;
    for t in 0..trials {
        best = best.max(square_trials(support, m, d, t..t + 1, seed));
        if best == full {
            break;
        }
    }
    best
}

/// Scans every gate pencil of the linearized `expr`.
pub fn scan_gates(
    expr: &Expr,
    trials: usize,
    seed: u64,
    modulus: u64,
) -> Result<Vec<GateScan>, FormulaError> {
    if trials == 0 {
        return Err(FormulaError::NoTrials);
    }
    let field = checked_field(modulus)?;
    let f = Formula::from_expr(expr);
    let m = f.vars().len();
    linearize(&f)
        .par_iter()
        .map(|r| {
            let support = r.support(field)?;
            let gate_seed = rand::Rng::random(&mut rng::stream(seed, &[TAG_GATE, r.gate() as u64]));
            let s = r.size();
            let r3 = max_until_full(&support, m, 3, trials, gate_seed);
            let r2 = (r3 < 3 * s).then(|| max_until_full(&support, m, 2, trials, gate_seed));
            Ok(GateScan {
                gate_id: r.gate(),
                size: s,
                r3,
                r2,
            })
        })
        .collect()
}

/// The first gate (by id) of the linearized `(ψ - 1)⁻¹` whose pencil has
/// `r2 / 2 > r3 / 3`.
pub fn find_blowup_nonmonotone(
    trials: usize,
    seed: u64,
    modulus: u64,
) -> Result<NonMonotoneGate, FormulaError> {
    let scans = scan_gates(&counterexample_expr(), trials, seed, modulus)?;
    scans
        .iter()
        .find_map(|g| {
            let r2 = g.r2?;
            (3 * r2 > 2 * g.r3).then_some(NonMonotoneGate {
                gate_id: g.gate_id,
                size: g.size,
                r2,
                r3: g.r3,
            })
        })
        .ok_or(FormulaError::NotFound { gates: scans.len() })
}
