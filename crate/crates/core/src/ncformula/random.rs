//! Random formulas for testing.

use num_rational::BigRational;
use rand::Rng;

use super::ast::Expr;

/// A random formula of depth at most `depth` over `vars`. Leaves are
/// variables or small rational constants.
pub fn random_expr<R: Rng + ?Sized>(depth: usize, vars: &[&str], rng: &mut R) -> Expr {
    if depth == 0 || rng.random_bool(0.25) {
        return if vars.is_empty() || rng.random_bool(0.2) {
            let n: i64 = rng.random_range(-3..=3);
            let d: i64 = rng.random_range(1..=2);
            Expr::Const(BigRational::new(n.into(), d.into()))
        } else {
            Expr::var(vars[rng.random_range(0..vars.len())])
        };
    }
    let sub = |rng: &mut R| random_expr(depth - 1, vars, rng);
    match rng.random_range(0..6) {
        0 => Expr::add(sub(rng), sub(rng)),
        1 => Expr::sub(sub(rng), sub(rng)),
        2 | 3 => Expr::mul(sub(rng), sub(rng)),
        4 => Expr::neg(sub(rng)),
        _ => Expr::inv(sub(rng)),
    }
}
