use std::collections::HashMap;

use proptest::prelude::*;
use rand::Rng;

use super::random::random_expr;
use super::*;
use crate::exactmat::{DenseMatrix, PrimeField, Scalar, ScalarDomain, DEFAULT_MODULUS};
use crate::rng;

const VARS: [&str; 3] = ["x", "y", "z"];

/// Scalar evaluation straight off the syntax tree, independent of the core
/// form and of the matrix code.
fn scalar_value(e: &Expr, f: &PrimeField, at: &HashMap<String, u64>) -> Option<u64> {
    Some(match e {
        Expr::Var(v) => at[v],
        Expr::Const(c) => f.from_rational(c).unwrap(),
        Expr::Add(a, b) => f.add(scalar_value(a, f, at)?, scalar_value(b, f, at)?),
        Expr::Sub(a, b) => f.sub(scalar_value(a, f, at)?, scalar_value(b, f, at)?),
        Expr::Mul(a, b) => f.mul(scalar_value(a, f, at)?, scalar_value(b, f, at)?),
        Expr::Neg(a) => f.neg(scalar_value(a, f, at)?),
        Expr::Inv(a) => f.inv(scalar_value(a, f, at)?)?,
    })
}

fn random_assignment(f: &Formula, n: usize, rng: &mut impl Rng) -> Assignment {
    let field = PrimeField::default_field();
    let mut at = Assignment::new(n, ScalarDomain::default_prime());
    for v in f.vars() {
        at.set(v, DenseMatrix::random(n, n, field, rng)).unwrap();
    }
    at
}

#[test]
fn printer_output_is_stable() {
    let e = parse("comm(x, inv(y - 1/2)) * -(3) + -2*x").unwrap();
    assert_eq!(e.to_string(), "(x*inv(y - 1/2) - inv(y - 1/2)*x)*-(3) + -2*x");
    let e = parse("x - (y - z)").unwrap();
    assert_eq!(e.to_string(), "x - (y - z)");
    let e = parse("x * (y * z)").unwrap();
    assert_eq!(e.to_string(), "x*(y*z)");
    let e = parse("-(x*y) * --z").unwrap();
    assert_eq!(e.to_string(), "-(x*y)*--z");
}

#[test]
fn scalar_points_match_the_oracle() {
    let field = PrimeField::default_field();
    let mut rng = rng::stream(11, &[]);
    for _ in 0..40 {
        let e = random_expr(4, &VARS, &mut rng);
        let f = Formula::from_expr(&e);
        let at = random_assignment(&f, 1, &mut rng);
        let scalars: HashMap<String, u64> = f
            .vars()
            .iter()
            .map(|v| (v.clone(), at.get(v).unwrap().residues().unwrap()[0]))
            .collect();
        let expected = scalar_value(&e, &field, &scalars);
        let got = eval(&e, &at).unwrap();
        match expected {
            Some(v) => assert_eq!(got.value().unwrap().get(0, 0), Scalar::Residue(v), "{e}"),
            None => assert!(got.value().is_none(), "{e}"),
        }
    }
}

#[test]
fn gate_realizations_are_sound_on_matrices() {
    let mut rng = rng::stream(12, &[]);
    for n in [1, 2, 3] {
        for _ in 0..10 {
            let e = random_expr(4, &VARS, &mut rng);
            let f = Formula::from_expr(&e);
            let at = random_assignment(&f, n, &mut rng);
            let values = eval_gates(&f, &at).unwrap();
            for (r, value) in linearize(&f).iter().zip(&values) {
                let lin = r.evaluate(&f, &at).unwrap();
                // Defined gates must agree; undefined ones must be singular.
                assert_eq!(&lin, value, "{e} gate {}", r.gate());
            }
        }
    }
}

#[test]
fn the_constructed_expression_uses_only_x_and_y() {
    let psi = bergman_psi();
    assert_eq!(psi.variables(), ["x", "y"]);
    assert_eq!(parse(&psi.to_string()).unwrap(), psi);
    assert!(counterexample_expr().size() > psi.size());
}

// Under the iterated-commutator reading of `y''` and `y'''`, `δ(y'')` is
// zero on 2x2 matrices (its argument is traceless), so the expression is
// undefined there, and on 3x3 matrices the factor `(δ(y'')⁻¹)'` vanishes
// because `δ` of a traceless 3x3 matrix is central.
#[test]
fn observed_behaviour_of_the_constructed_expression() {
    let two = bergman_dichotomy(2, 3, 1, DEFAULT_MODULUS).unwrap();
    assert!(two
        .outcomes
        .iter()
        .all(|o| matches!(o, BergmanOutcome::Undefined { .. })));
    let three = bergman_dichotomy(3, 3, 1, DEFAULT_MODULUS).unwrap();
    assert!(three.outcomes.iter().all(|o| *o == BergmanOutcome::Zero));
    assert!(!two.passed && !three.passed);
}

#[test]
fn delta_of_traceless_three_by_three_is_central() {
    let e =
        parse("(x*(comm(x,y)*comm(x,y)) - comm(x,y)*comm(x,y)*x) * inv(x*inv(comm(x,y)) - inv(comm(x,y))*x)")
            .unwrap();
    let f = Formula::from_expr(&e);
    let mut rng = rng::stream(13, &[]);
    let at = random_assignment(&f, 3, &mut rng);
    let v = eval_formula(&f, &at).unwrap();
    let m = v.value().unwrap();
    let c = m.get(0, 0);
    assert!(!c.is_zero());
    let scalar = DenseMatrix::identity(3, ScalarDomain::default_prime())
        .scale(&c)
        .unwrap();
    assert_eq!(m, &scalar);
}

#[test]
fn bergman_checks_reject_small_moduli() {
    assert_eq!(
        bergman_dichotomy(2, 1, 0, 101),
        Err(FormulaError::ModulusTooSmall(101))
    );
    assert_eq!(
        bergman_dichotomy(2, 0, 0, DEFAULT_MODULUS),
        Err(FormulaError::NoTrials)
    );
}

#[test]
fn gate_scan_agrees_with_evaluation() {
    // Defined on generic 2x2 and 3x3 inputs, so every gate is full at d = 3.
    let e = parse("inv(comm(x, y)) + inv(x)*y").unwrap();
    let scans = scan_gates(&e, 4, 3, DEFAULT_MODULUS).unwrap();
    assert_eq!(scans.len(), Formula::from_expr(&e).len());
    assert!(scans.iter().all(|g| g.r3 == 3 * g.size && g.r2.is_none()));
    // x - x is identically zero, so its inverse is nowhere defined.
    let e = parse("inv(x - x)").unwrap();
    let root = &scan_gates(&e, 4, 3, DEFAULT_MODULUS).unwrap()[0];
    assert!(root.r3 < 3 * root.size);
    assert!(root.r2.unwrap() < 2 * root.size);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn print_parse_round_trip(seed in any::<u64>(), depth in 0usize..6) {
        let e = random_expr(depth, &VARS, &mut rng::stream(seed, &[]));
        let text = e.to_string();
        prop_assert_eq!(parse(&text).unwrap(), e, "{}", text);
    }

    #[test]
    fn realization_sizes(seed in any::<u64>()) {
        let e = random_expr(5, &VARS, &mut rng::stream(seed, &[]));
        let f = Formula::from_expr(&e);
        let rs = linearize(&f);
        for (id, r) in rs.iter().enumerate() {
            let expected = match f.gate(id) {
                Gate::Var(_) | Gate::Const(_) => 2,
                Gate::Add(a, b) | Gate::Mul(a, b) => rs[*a].size() + rs[*b].size(),
                Gate::Inv(a) => rs[*a].size() + 1,
            };
            prop_assert_eq!(r.size(), expected);
        }
    }
}
