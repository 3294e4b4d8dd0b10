//! Property audits over blow-up ranks.
//!
//! All of the checked properties are theorems, so a violation means that
//! the random trials undershot a generic rank. Every audit re-runs a failing
//! instance with four times as many trials before reporting it.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::estimate::{blowup_rank_estimate, crank_estimate, ncrank, rect_trials};
use super::{BlowupRankReport, LinearPencil, PencilError};

/// Factor applied to the trial budget when an audit sees a violation.
pub const RERUN_FACTOR: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityAudit {
    pub reports: Vec<BlowupRankReport>,
    /// Blow-up sizes that needed a re-run.
    pub reruns: Vec<usize>,
    pub passed: bool,
}

/// Blow-up reports for `d = 1..=d_max`; passes iff every rank is a multiple
/// of its `d`.
pub fn regularity_audit(
    a: &LinearPencil,
    d_max: usize,
    trials: usize,
    seed: u64,
) -> Result<RegularityAudit, PencilError> {
    let mut reports = Vec::with_capacity(d_max);
    let mut reruns = Vec::new();
    for d in 1..=d_max {
        let mut report = blowup_rank_estimate(a, d, trials, seed)?;
        if !report.divisible_by_d {
            reruns.push(d);
            report = blowup_rank_estimate(a, d, trials * RERUN_FACTOR, seed)?;
        }
        reports.push(report);
    }
    let passed = reports.iter().all(|r| r.divisible_by_d);
    Ok(RegularityAudit {
        reports,
        reruns,
        passed,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotoneAudit {
    /// `r(d, d)` for `d = 1..=d_max`.
    pub ranks: Vec<usize>,
    /// First `d` from which `r(d,d)/d` is required to be weakly increasing.
    pub start: usize,
    /// False for rectangular pencils: their ranks are recorded only.
    pub asserted: bool,
    /// Each `d` with `r(d+1,d+1)/(d+1) < r(d,d)/d`.
    pub violations: Vec<usize>,
    pub reruns: Vec<usize>,
    pub passed: bool,
}

/// Checks that `r(d,d)/d` is weakly increasing for
/// `d ≥ max(1, ⌈n/2⌉ - 1)`. Only square pencils are asserted.
pub fn monotone_audit(
    a: &LinearPencil,
    d_max: usize,
    trials: usize,
    seed: u64,
) -> Result<MonotoneAudit, PencilError> {
    let n = a.rows().max(a.cols());
    let start = n.div_ceil(2).saturating_sub(1).max(1);
    let asserted = a.rows() == a.cols();
    let rank = |d: usize, t: usize| blowup_rank_estimate(a, d, t, seed).map(|r| r.observed_rank);
    let mut ranks = (1..=d_max)
        .map(|d| rank(d, trials))
        .collect::<Result<Vec<_>, _>>()?;
    let decreasing = |ranks: &[usize], d: usize| ranks[d] * d < ranks[d - 1] * (d + 1);
    let mut reruns = Vec::new();
    for d in start..d_max {
        if decreasing(&ranks, d) {
            reruns.push(d);
            ranks[d - 1] = rank(d, trials * RERUN_FACTOR)?;
            ranks[d] = rank(d + 1, trials * RERUN_FACTOR)?;
        }
    }
    let violations: Vec<usize> = (start..d_max).filter(|&d| decreasing(&ranks, d)).collect();
    let passed = !asserted || violations.is_empty();
    Ok(MonotoneAudit {
        ranks,
        start,
        asserted,
        violations,
        reruns,
        passed,
    })
}

/// Observed ranks `r(p, q)` of rectangular blow-ups for
/// `0 ≤ p ≤ p_max`, `0 ≤ q ≤ q_max`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowupProfile {
    pub p_max: usize,
    pub q_max: usize,
    pub trials: usize,
    pub seed: u64,
    pub modulus: u64,
    /// `ranks[p][q]`.
    pub ranks: Vec<Vec<usize>>,
}

impl BlowupProfile {
    pub fn get(&self, p: usize, q: usize) -> usize {
        self.ranks[p][q]
    }
}

/// Rectangular blow-up profile. Each of `X_0, ..., X_m` receives an
/// independent random `p x q` block, so the constant term is treated as one
/// more spanning matrix.
pub fn profile(
    a: &LinearPencil,
    p_max: usize,
    q_max: usize,
    trials: usize,
    seed: u64,
) -> Result<BlowupProfile, PencilError> {
    if trials == 0 {
        return Err(PencilError::NoTrials);
    }
    let support = a.support()?;
    let ranks = (0..=p_max)
        .map(|p| {
            (0..=q_max)
                .map(|q| rect_trials(&support, a.num_vars(), (p, q), 0..trials, seed))
                .collect()
        })
        .collect();
    Ok(BlowupProfile {
        p_max,
        q_max,
        trials,
        seed,
        modulus: support.field.modulus(),
        ranks,
    })
}

/// One failed inequality. `inequality` numbers the checks:
/// 1. `r(p,q+1) ≥ r(p,q)`
/// 2. `r(p+1,q) ≥ r(p,q)`
/// 3. `2 r(p,q+1) ≥ r(p,q) + r(p,q+2)`
/// 4. `2 r(p+1,q) ≥ r(p,q) + r(p+2,q)`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConcavityViolation {
    pub inequality: u8,
    pub p: usize,
    pub q: usize,
}

/// Lists every violated monotonicity or concavity inequality in `profile`.
pub fn concavity_audit(profile: &BlowupProfile) -> Vec<ConcavityViolation> {
    let r = |p: usize, q: usize| profile.get(p, q);
    let mut out = Vec::new();
    for p in 0..=profile.p_max {
        for q in 0..=profile.q_max {
            let mut push = |inequality| out.push(ConcavityViolation { inequality, p, q });
            if q < profile.q_max && r(p, q + 1) < r(p, q) {
                push(1);
            }
            if p < profile.p_max && r(p + 1, q) < r(p, q) {
                push(2);
            }
            if q + 2 <= profile.q_max && 2 * r(p, q + 1) < r(p, q) + r(p, q + 2) {
                push(3);
            }
            if p + 2 <= profile.p_max && 2 * r(p + 1, q) < r(p, q) + r(p + 2, q) {
                push(4);
            }
        }
    }
    out
}

/// Profile plus audit, re-profiling with more trials if anything fails.
pub fn audited_profile(
    a: &LinearPencil,
    p_max: usize,
    q_max: usize,
    trials: usize,
    seed: u64,
) -> Result<(BlowupProfile, Vec<ConcavityViolation>), PencilError> {
    let first = profile(a, p_max, q_max, trials, seed)?;
    let violations = concavity_audit(&first);
    if violations.is_empty() {
        return Ok((first, violations));
    }
    let second = profile(a, p_max, q_max, trials * RERUN_FACTOR, seed)?;
    let violations = concavity_audit(&second);
    Ok((second, violations))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioAudit {
    pub crk: usize,
    pub ncrk: usize,
    pub rerun: bool,
    pub passed: bool,
}

impl RatioAudit {
    /// `ncrk / crk`, or `None` for the zero pencil.
    pub fn ratio(&self) -> Option<Ratio<usize>> {
        (self.crk > 0).then(|| Ratio::new(self.ncrk, self.crk))
    }
}

fn ratio_holds(crk: usize, ncrk: usize) -> bool {
    ncrk < 2 * crk || (crk == 0 && ncrk == 0)
}

/// Checks `ncrk < 2 crk`; the zero pencil passes by convention.
pub fn ratio_audit(a: &LinearPencil, trials: usize, seed: u64) -> Result<RatioAudit, PencilError> {
    let mut crk = crank_estimate(a, trials, seed)?;
    let mut ncrk = ncrank(a, trials, seed)?;
    let mut rerun = false;
    if !ratio_holds(crk, ncrk) {
        rerun = true;
        crk = crank_estimate(a, trials * RERUN_FACTOR, seed)?;
        ncrk = ncrank(a, trials * RERUN_FACTOR, seed)?;
    }
    Ok(RatioAudit {
        crk,
        ncrk,
        rerun,
        passed: ratio_holds(crk, ncrk),
    })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures;
    use super::*;
    use crate::exactmat::ScalarDomain;
    use crate::rng;
    use proptest::prelude::*;

    fn prime() -> ScalarDomain {
        ScalarDomain::default_prime()
    }

    #[test]
    fn skew3_regularity() {
        let audit = regularity_audit(&fixtures::skew3(prime()), 4, 8, 11).unwrap();
        let ranks: Vec<usize> = audit.reports.iter().map(|r| r.observed_rank).collect();
        assert_eq!(ranks, vec![2, 6, 9, 12]);
        assert!(audit.passed);
    }

    #[test]
    fn identity_regularity() {
        let audit = regularity_audit(&fixtures::identity_spanned(3, prime()), 3, 2, 1).unwrap();
        let ranks: Vec<usize> = audit.reports.iter().map(|r| r.observed_rank).collect();
        assert_eq!(ranks, vec![3, 6, 9]);
    }

    #[test]
    fn skew3_ratio() {
        let r = ratio_audit(&fixtures::skew3(prime()), 8, 5).unwrap();
        assert_eq!((r.crk, r.ncrk), (2, 3));
        assert_eq!(r.ratio(), Some(Ratio::new(3, 2)));
        assert!(r.passed);
        let z = ratio_audit(&LinearPencil::zero(2, 2, 1, prime()), 2, 5).unwrap();
        assert!(z.passed);
        assert_eq!(z.ratio(), None);
    }

    #[test]
    fn skew3_monotone_and_concave() {
        let a = fixtures::skew3(prime());
        let m = monotone_audit(&a, 4, 8, 3).unwrap();
        assert!(m.passed && m.violations.is_empty());
        let prof = profile(&a, 4, 4, 8, 3).unwrap();
        assert!(concavity_audit(&prof).is_empty());
        assert_eq!(prof.get(0, 3), 0);
        assert_eq!(prof.get(2, 2), 6);
    }

    #[test]
    fn concavity_audit_flags_a_dip() {
        let prof = BlowupProfile {
            p_max: 0,
            q_max: 2,
            trials: 1,
            seed: 0,
            modulus: 2,
            ranks: vec![vec![0, 1, 3]],
        };
        let v = concavity_audit(&prof);
        assert_eq!(
            v,
            vec![ConcavityViolation {
                inequality: 3,
                p: 0,
                q: 0
            }]
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn profile_entries_are_bounded(rows in 1usize..4, cols in 1usize..4, seed in any::<u64>()) {
            let mut r = rng::stream(seed, &[]);
            let a = fixtures::random_low_rank(rows, cols, 2, prime(), &mut r);
            let prof = profile(&a, 3, 3, 2, seed).unwrap();
            for p in 0..=3 {
                for q in 0..=3 {
                    prop_assert!(prof.get(p, q) <= (rows * p).min(cols * q));
                }
            }
        }

        #[test]
        fn full_blowups_propagate(seed in any::<u64>()) {
            let mut r = rng::stream(seed, &[]);
            let a = fixtures::random_low_rank(3, 3, 3, prime(), &mut r);
            let at = |d| blowup_rank_estimate(&a, d, 4, seed).unwrap();
            for d in 1..=2 {
                if at(d).is_full(3, 3) {
                    prop_assert!(at(2 * d).is_full(3, 3));
                }
            }
        }
    }
}
