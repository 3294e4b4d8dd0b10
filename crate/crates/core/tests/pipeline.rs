//! Cross-module round trips through the public API.

use ncrank::brank;
use ncrank::exactmat::ScalarDomain;
use ncrank::io;
use ncrank::ncformula::{self, linearize, parse, EvalOutcome, Formula};
use ncrank::pencil::{self, fixtures};
use ncrank::wedge;
use proptest::prelude::*;

const SEED: u64 = 77;

fn prime() -> ScalarDomain {
    ScalarDomain::default_prime()
}

#[test]
fn wedge_pencil_survives_a_file_round_trip() {
    let a = wedge::wedge_pencil(2, 5, ScalarDomain::Rational).unwrap();
    let text = io::write_pencil(&a);
    let b = io::read_pencil(&text).unwrap().to_domain(prime()).unwrap();
    assert_eq!(pencil::crank_estimate(&b, 8, SEED).unwrap(), 6);
    assert_eq!(
        pencil::blowup_rank_estimate(&b, 3, 8, SEED)
            .unwrap()
            .observed_rank,
        30
    );
}

#[test]
fn explicit_tensor_file_certifies_the_same_bound() {
    let t = brank::explicit_tensor(2).unwrap();
    let back = io::read_tensor(&io::write_tensor(&t)).unwrap();
    let a = brank::certify(&t, 2, brank::Arithmetic::ExactRational).unwrap();
    let b = brank::certify(&back, 2, brank::Arithmetic::ExactRational).unwrap();
    assert_eq!(a, b);
}

// A defined formula has an invertible root pencil, so the pencil has full
// non-commutative rank.
#[test]
fn root_pencil_of_a_defined_formula_is_full() {
    let e = parse("inv(x*y - y*x) + x").unwrap();
    let f = Formula::from_expr(&e);
    let r = &linearize(&f)[0];
    let a = r.to_pencil(prime()).unwrap();
    assert_eq!(pencil::ncrank(&a, 4, SEED).unwrap(), r.size());
    // x*y - y*x vanishes on scalars, so the commutative rank is deficient.
    assert!(pencil::crank_estimate(&a, 4, SEED).unwrap() < r.size());
}

#[test]
fn commutator_inverse_is_undefined_on_scalars_only() {
    let e = parse("inv(x*y - y*x)").unwrap();
    let f = Formula::from_expr(&e);
    let field = prime().field().unwrap();
    let at1 = ncformula::random_assignment(&f, 1, field, SEED, &[1]).unwrap();
    let at2 = ncformula::random_assignment(&f, 2, field, SEED, &[2]).unwrap();
    assert_eq!(
        ncformula::eval_formula(&f, &at1).unwrap(),
        EvalOutcome::Undefined(0)
    );
    assert!(ncformula::eval_formula(&f, &at2).unwrap().value().is_some());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn random_pencils_keep_their_ranks_through_files(seed in any::<u64>()) {
        let a = fixtures::random_batch(3, 4, 2, 1, seed, prime()).remove(0);
        let b = io::read_pencil(&io::write_pencil(&a)).unwrap();
        prop_assert_eq!(
            pencil::ncrank_report(&a, 4, SEED).ok(),
            pencil::ncrank_report(&b, 4, SEED).ok()
        );
    }
}
