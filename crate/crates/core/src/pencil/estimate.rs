//! Randomized rank estimators.
//!
//! Each trial substitutes uniformly random field elements (or random `d x d`
//! blocks) for the variables and computes an exact rank. Any single trial is
//! a lower bound on the generic rank, so the estimators report the maximum
//! over trials.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{LinearPencil, PencilError, Support};
use crate::rng;

// Stream tags, so the different estimators never share random draws.
const TAG_SQUARE: u64 = 1;
const TAG_RECT: u64 = 2;

/// One blow-up rank measurement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowupRankReport {
    pub d: usize,
    pub observed_rank: usize,
    pub trials: usize,
    pub seed: u64,
    pub modulus: u64,
    pub divisible_by_d: bool,
}

impl BlowupRankReport {
    /// Whether the blow-up was observed to have rank `d * min(rows, cols)`.
    pub fn is_full(&self, rows: usize, cols: usize) -> bool {
        self.observed_rank == self.d * rows.min(cols)
    }
}

fn check_trials(trials: usize) -> Result<(), PencilError> {
    if trials == 0 {
        Err(PencilError::NoTrials)
    } else {
        Ok(())
    }
}

/// Max over trials of the rank of `A` at random scalars.
pub fn crank_estimate(a: &LinearPencil, trials: usize, seed: u64) -> Result<usize, PencilError> {
    Ok(blowup_rank_estimate(a, 1, trials, seed)?.observed_rank)
}

/// Max over trials of `rk(X_0 ⊗ I_d + Σ X_i ⊗ T_i)` with random `d x d` `T_i`.
pub fn blowup_rank_estimate(
    a: &LinearPencil,
    d: usize,
    trials: usize,
    seed: u64,
) -> Result<BlowupRankReport, PencilError> {
    check_trials(trials)?;
    if d == 0 {
        return Err(PencilError::ZeroBlowup);
    }
    let support = a.support()?;
    let observed_rank = square_trials(&support, a.num_vars(), d, 0..trials, seed);
    Ok(BlowupRankReport {
        d,
        observed_rank,
        trials,
        seed,
        modulus: support.field.modulus(),
        divisible_by_d: observed_rank.is_multiple_of(d),
    })
}

pub(crate) fn square_trials(
    support: &Support,
    num_vars: usize,
    d: usize,
    trials: std::ops::Range<usize>,
    seed: u64,
) -> usize {
    let p = support.field.modulus();
    let mut identity = vec![0u64; d * d];
    for i in 0..d {
        identity[i * d + i] = 1;
    }
    trials
        .into_par_iter()
        .map(|t| {
            let mut rng = rng::stream(seed, &[TAG_SQUARE, d as u64, t as u64]);
            let mut blocks = Vec::with_capacity(num_vars + 1);
            blocks.push(identity.clone());
            for _ in 0..num_vars {
                blocks.push((0..d * d).map(|_| rng.random_range(0..p)).collect());
            }
            support.blowup_rank(&blocks, d, d)
        })
        .max()
        .unwrap_or(0)
}

/// Rank of the rectangular blow-up `X^{p,q}`: every matrix of the spanning
/// set `{X_0, ..., X_m}` gets its own random `p x q` block.
pub(crate) fn rect_trials(
    support: &Support,
    num_vars: usize,
    (p, q): (usize, usize),
    trials: std::ops::Range<usize>,
    seed: u64,
) -> usize {
    if p == 0 || q == 0 {
        return 0;
    }
    let modulus = support.field.modulus();
    trials
        .into_par_iter()
        .map(|t| {
            let mut rng = rng::stream(seed, &[TAG_RECT, p as u64, q as u64, t as u64]);
            let blocks: Vec<Vec<u64>> = (0..=num_vars)
                .map(|_| (0..p * q).map(|_| rng.random_range(0..modulus)).collect())
                .collect();
            support.blowup_rank(&blocks, p, q)
        })
        .max()
        .unwrap_or(0)
}

/// Non-commutative rank, read off the blow-up at `d* = max(rows, cols)`.
pub fn ncrank(a: &LinearPencil, trials: usize, seed: u64) -> Result<usize, PencilError> {
    let report = ncrank_report(a, trials, seed)?;
    Ok(report.observed_rank / report.d)
}

/// The blow-up report behind [`ncrank`]; errors with `NotStabilized` when
/// `d*` does not divide the observed rank.
pub fn ncrank_report(a: &LinearPencil, trials: usize, seed: u64) -> Result<BlowupRankReport, PencilError> {
    let d = a.rows().max(a.cols()).max(1);
    let report = blowup_rank_estimate(a, d, trials, seed)?;
    if !report.divisible_by_d {
        return Err(PencilError::NotStabilized {
            d,
            rank: report.observed_rank,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::super::fixtures;
    use super::*;
    use crate::exactmat::{DenseMatrix, ScalarDomain};
    use proptest::prelude::*;

    const SEED: u64 = 0x5eed;

    fn prime() -> ScalarDomain {
        ScalarDomain::default_prime()
    }

    #[test]
    fn skew3_blowups() {
        let a = fixtures::skew3(prime());
        let ranks: Vec<usize> = (1..=4)
            .map(|d| blowup_rank_estimate(&a, d, 8, SEED).unwrap().observed_rank)
            .collect();
        assert_eq!(ranks, vec![2, 6, 9, 12]);
        assert_eq!(crank_estimate(&a, 8, SEED).unwrap(), 2);
        assert_eq!(ncrank(&a, 8, SEED).unwrap(), 3);
    }

    #[test]
    fn eh_fixtures() {
        let a = fixtures::eh_first(prime());
        assert_eq!(crank_estimate(&a, 8, SEED).unwrap(), 3);
        assert_eq!(blowup_rank_estimate(&a, 3, 8, SEED).unwrap().observed_rank, 12);
        assert_eq!(ncrank(&a, 8, SEED).unwrap(), 4);
    }

    #[test]
    fn second_eh_fixture_is_generically_invertible() {
        // Its determinant is -a b^2 d, so the value at (a,b,c,d) = (1,1,0,1)
        // is already nonzero over the rationals.
        let exact = fixtures::eh_second(ScalarDomain::Rational);
        assert_eq!(exact.evaluate_scalars(&[1, 1, 0, 1]).unwrap().rank(), 4);
        let a = fixtures::eh_second(prime());
        assert_eq!(crank_estimate(&a, 8, SEED).unwrap(), 4);
        assert_eq!(ncrank(&a, 8, SEED).unwrap(), 4);
    }

    #[test]
    fn degenerate_pencils() {
        let z = LinearPencil::zero(3, 2, 2, prime());
        assert_eq!(crank_estimate(&z, 4, SEED).unwrap(), 0);
        assert_eq!(ncrank(&z, 4, SEED).unwrap(), 0);
        let r1 = fixtures::rank_one_spanned(4, prime());
        assert_eq!(ncrank(&r1, 4, SEED).unwrap(), 1);
    }

    #[test]
    fn rejects_rational_and_small_moduli() {
        let a = fixtures::skew3(ScalarDomain::Rational);
        assert!(matches!(
            crank_estimate(&a, 1, 0),
            Err(PencilError::NeedsPrimeField(_))
        ));
        let b = fixtures::skew3(ScalarDomain::prime(101).unwrap());
        assert_eq!(crank_estimate(&b, 1, 0), Err(PencilError::ModulusTooSmall(101)));
        assert_eq!(
            crank_estimate(&fixtures::skew3(prime()), 0, 0),
            Err(PencilError::NoTrials)
        );
    }

    #[test]
    fn more_trials_never_lower_the_rank() {
        let a = fixtures::eh_first(prime());
        let few = blowup_rank_estimate(&a, 2, 1, SEED).unwrap().observed_rank;
        let many = blowup_rank_estimate(&a, 2, 6, SEED).unwrap().observed_rank;
        assert!(many >= few);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn blowup_sandwich(rows in 1usize..5, cols in 1usize..5, vars in 1usize..4, seed in any::<u64>(), d in 1usize..4) {
            let mut rng = rng::stream(seed, &[]);
            let a = fixtures::random_low_rank(rows, cols, vars, prime(), &mut rng);
            let crk = crank_estimate(&a, 4, seed).unwrap();
            let r = blowup_rank_estimate(&a, d, 4, seed).unwrap();
            prop_assert!(d * crk <= r.observed_rank);
            prop_assert!(r.observed_rank <= d * rows.min(cols));
        }

        #[test]
        fn constant_only_pencils_scale(n in 1usize..5, seed in any::<u64>(), d in 1usize..4) {
            let mut rng = rng::stream(seed, &[]);
            let f = crate::exactmat::PrimeField::default_field();
            let x0 = DenseMatrix::random(n, n, f, &mut rng);
            let a = LinearPencil::new(x0.clone(), vec![]).unwrap();
            prop_assert_eq!(blowup_rank_estimate(&a, d, 2, seed).unwrap().observed_rank, d * x0.rank());
        }
    }
}
