//! Exterior multiplication pencils.
//!
//! `L_{e_i}: Λ^p(K^n) → Λ^{p+1}(K^n)` sends `e_S` to `e_i ∧ e_S`. In the
//! subset basis this is `0` when `i ∈ S` and `±e_{S ∪ {i}}` otherwise, with
//! sign `(-1)^{#{s ∈ S : s < i}}` (moving `e_i` past the smaller indices).
//! The pencil `A(p, n) = Σ t_i L_{e_i}` has commutative rank `C(n-1, p)`;
//! for `n = 2p + 1` it is square of size `C(2p+1, p)` and has full
//! non-commutative rank, witnessed by a Toeplitz blow-up at `d = p + 1`.

mod basis;

use num_integer::binomial;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactmat::{DenseMatrix, MatrixError, ScalarDomain};
use crate::pencil::{crank_estimate, ncrank, LinearPencil, PencilError};

pub use basis::{BasisOrder, SubsetBasis};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WedgeError {
    #[error("index i = {i} outside 1..={n}")]
    IndexOutOfRange { i: usize, n: usize },
    #[error("degree p = {p} outside the allowed range for n = {n}")]
    DegreeOutOfRange { p: usize, n: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Pencil(#[from] PencilError),
}

/// Matrix of `L_{e_i}` from `source` (a basis of `Λ^p`) to `target` (a basis
/// of `Λ^{p+1}`), of size `target.len() x source.len()`.
pub fn wedge_matrix_in(
    i: usize,
    source: &SubsetBasis,
    target: &SubsetBasis,
    domain: ScalarDomain,
) -> Result<DenseMatrix, WedgeError> {
    let n = source.n();
    if i == 0 || i > n {
        return Err(WedgeError::IndexOutOfRange { i, n });
    }
    assert_eq!(target.n(), n);
    assert_eq!(target.k(), source.k() + 1);
    let mut m = DenseMatrix::zeros(target.len(), source.len(), domain);
    for (col, s) in source.subsets().iter().enumerate() {
        if s.contains(&i) {
            continue;
        }
        let below = s.iter().filter(|&&x| x < i).count();
        let mut t = s.clone();
        t.insert(below, i);
        let row = target.position(&t).expect("S ∪ {i} is a basis subset");
        m.set_i64(row, col, if below % 2 == 0 { 1 } else { -1 });
    }
    Ok(m)
}

/// `L_{e_i}: Λ^p(K^n) → Λ^{p+1}(K^n)` in the lexicographic bases.
pub fn wedge_matrix(i: usize, p: usize, n: usize, domain: ScalarDomain) -> Result<DenseMatrix, WedgeError> {
    if p >= n {
        return Err(WedgeError::DegreeOutOfRange { p, n });
    }
    wedge_matrix_in(i, &SubsetBasis::lex(n, p), &SubsetBasis::lex(n, p + 1), domain)
}

fn pencil_in(
    p: usize,
    n: usize,
    source: &SubsetBasis,
    target: &SubsetBasis,
    domain: ScalarDomain,
) -> Result<LinearPencil, WedgeError> {
    let coeffs = (1..=n)
        .map(|i| wedge_matrix_in(i, source, target, domain))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LinearPencil::homogeneous(
        binomial(n, p + 1),
        binomial(n, p),
        coeffs,
        domain,
    )?)
}

/// `A(p, n) = t_1 L_{e_1} + ... + t_n L_{e_n}` in the lexicographic bases.
pub fn wedge_pencil(p: usize, n: usize, domain: ScalarDomain) -> Result<LinearPencil, WedgeError> {
    if p >= n {
        return Err(WedgeError::DegreeOutOfRange { p, n });
    }
    pencil_in(p, n, &SubsetBasis::lex(n, p), &SubsetBasis::lex(n, p + 1), domain)
}

/// Outcome of [`block_structure_check`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockCheck {
    pub p: usize,
    pub n: usize,
    /// Side of the top-left block, `C(n-1, p)`.
    pub identity_size: usize,
    /// The scalar multiple of the identity found in front of `t_n`,
    /// `(-1)^p` with the left-insertion sign convention.
    pub identity_sign: i64,
    pub passed: bool,
    pub diffs: Vec<String>,
}

/// Verifies the recursive shape
///
/// ```text
/// A(p, n) = [ ±t_n I     A(p-1, n-1) ]
///           [ A(p, n-1)  0           ]
/// ```
///
/// with columns ordered as (subsets avoiding `n`, subsets containing `n`)
/// and rows as (subsets containing `n`, subsets avoiding `n`).
pub fn block_structure_check(p: usize, n: usize) -> Result<BlockCheck, WedgeError> {
    if p == 0 || p + 2 > n {
        return Err(WedgeError::DegreeOutOfRange { p, n });
    }
    let domain = ScalarDomain::Rational;
    let source = SubsetBasis::new(n, p, BasisOrder::SplitAvoidingFirst);
    let target = SubsetBasis::new(n, p + 1, BasisOrder::SplitContainingFirst);
    let split = pencil_in(p, n, &source, &target, domain)?;
    let top = binomial(n - 1, p);
    let left = binomial(n - 1, p);
    let (rows, cols) = (split.rows(), split.cols());
    let (bottom, right) = (rows - top, cols - left);
    let sign = if p.is_multiple_of(2) { 1 } else { -1 };
    let upper = wedge_pencil(p - 1, n - 1, domain)?;
    let lower = wedge_pencil(p, n - 1, domain)?;
    let mut diffs = Vec::new();
    let mut expect = |what: String, got: DenseMatrix, want: DenseMatrix| {
        if got != want {
            diffs.push(what);
        }
    };
    for (idx, x) in split.coeffs().iter().enumerate() {
        let i = idx + 1;
        let tl = x.submatrix(0, 0, top, left);
        let tr = x.submatrix(0, left, top, right);
        let bl = x.submatrix(top, 0, bottom, left);
        let br = x.submatrix(top, left, bottom, right);
        let zero = |h, w| DenseMatrix::zeros(h, w, domain);
        expect(format!("t_{i}: bottom-right block"), br, zero(bottom, right));
        if i == n {
            expect(
                format!("t_{i}: top-left block is not {sign}·I"),
                tl,
                DenseMatrix::identity(top, domain).scale_i64(sign),
            );
            expect(format!("t_{i}: top-right block"), tr, zero(top, right));
            expect(format!("t_{i}: bottom-left block"), bl, zero(bottom, left));
        } else {
            expect(format!("t_{i}: top-left block"), tl, zero(top, left));
            expect(
                format!("t_{i}: top-right block differs from A({}, {})", p - 1, n - 1),
                tr,
                upper.coeffs()[idx].clone(),
            );
            expect(
                format!("t_{i}: bottom-left block differs from A({p}, {})", n - 1),
                bl,
                lower.coeffs()[idx].clone(),
            );
        }
    }
    Ok(BlockCheck {
        p,
        n,
        identity_size: top,
        identity_sign: sign,
        passed: diffs.is_empty(),
        diffs,
    })
}

/// The `(p+1) x (p+1)` shift matrix `S_r`: entry `(j, k)` (one-based) is 1
/// iff `j = k + r`.
pub fn shift_matrix(r: i64, p: usize, domain: ScalarDomain) -> DenseMatrix {
    let size = p + 1;
    let mut m = DenseMatrix::zeros(size, size, domain);
    for k in 1..=size as i64 {
        let j = k + r;
        if (1..=size as i64).contains(&j) {
            m.set_i64((j - 1) as usize, (k - 1) as usize, 1);
        }
    }
    m
}

/// `Σ_i L_{e_i} ⊗ S_{i-p-1}` for `A(p, 2p+1)`, a square matrix of size
/// `C(2p+1, p) (p+1)`.
pub fn toeplitz_witness(p: usize, domain: ScalarDomain) -> Result<DenseMatrix, WedgeError> {
    if p == 0 {
        return Err(WedgeError::DegreeOutOfRange { p, n: 1 });
    }
    let n = 2 * p + 1;
    let pencil = wedge_pencil(p, n, domain)?;
    let shifts: Vec<DenseMatrix> = (1..=n)
        .map(|i| shift_matrix(i as i64 - p as i64 - 1, p, domain))
        .collect();
    Ok(pencil.evaluate(&shifts, p + 1)?)
}

/// Exact rank certificate for a Toeplitz witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub p: usize,
    pub size: usize,
    pub rank: usize,
    pub full: bool,
    /// Where the rank was computed: `GF(q)` or `QQ`.
    pub arithmetic: String,
}

/// Computes the witness rank modulo `modulus` first; full rank there
/// already certifies full rank over the rationals. Otherwise the rank is
/// recomputed exactly over the rationals.
pub fn certify_witness(p: usize, modulus: u64) -> Result<WitnessCertificate, WedgeError> {
    let prime = ScalarDomain::prime(modulus)?;
    let w = toeplitz_witness(p, prime)?;
    let size = w.rows();
    let mut rank = w.rank();
    let mut arithmetic = prime.to_string();
    if rank < size {
        rank = toeplitz_witness(p, ScalarDomain::Rational)?.rank();
        arithmetic = ScalarDomain::Rational.to_string();
    }
    Ok(WitnessCertificate {
        p,
        size,
        rank,
        full: rank == size,
        arithmetic,
    })
}

/// Commutative and non-commutative rank of `A(p, 2p+1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioReport {
    pub p: usize,
    pub crk: usize,
    pub crk_expected: usize,
    pub ncrk: usize,
    pub ncrk_expected: usize,
    pub witness: WitnessCertificate,
    /// `ncrk / crk` in lowest terms.
    pub ratio: String,
    pub passed: bool,
}

/// Estimates `crk(A(p, 2p+1))` and certifies `ncrk` through the Toeplitz
/// witness: full rank at `d = p + 1` gives `ncrk = rank / (p + 1)`.
pub fn ratio_report(p: usize, trials: usize, seed: u64, modulus: u64) -> Result<RatioReport, WedgeError> {
    let n = 2 * p + 1;
    let pencil = wedge_pencil(p, n, ScalarDomain::prime(modulus)?)?;
    let crk = crank_estimate(&pencil, trials, seed)?;
    let witness = certify_witness(p, modulus)?;
    let ncrk = witness.rank / (p + 1);
    let (crk_expected, ncrk_expected) = (binomial(2 * p, p), binomial(n, p));
    let ratio = if crk == 0 {
        "undefined".to_string()
    } else {
        Ratio::new(ncrk, crk).to_string()
    };
    Ok(RatioReport {
        p,
        crk,
        crk_expected,
        ncrk,
        ncrk_expected,
        passed: crk == crk_expected && ncrk == ncrk_expected && witness.full,
        witness,
        ratio,
    })
}

/// Commutative and non-commutative rank of `A(i, n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EgFamilyAudit {
    pub i: usize,
    pub n: usize,
    pub crk: usize,
    pub crk_expected: usize,
    pub ncrk: usize,
    /// `min(C(n, i), C(n, i+1))`.
    pub full: usize,
    pub passed: bool,
}

/// Checks that `A(i, n)` has full non-commutative rank, and that its
/// commutative rank `C(n-1, i)` is not full unless `i ∈ {0, n-1}`.
pub fn egfamily_audit(
    i: usize,
    n: usize,
    trials: usize,
    seed: u64,
    modulus: u64,
) -> Result<EgFamilyAudit, WedgeError> {
    let pencil = wedge_pencil(i, n, ScalarDomain::prime(modulus)?)?;
    let crk = crank_estimate(&pencil, trials, seed)?;
    let ncrk = ncrank(&pencil, trials, seed)?;
    let full = binomial(n, i).min(binomial(n, i + 1));
    let crk_expected = binomial(n - 1, i);
    let deficient_ok = i == 0 || i + 1 == n || crk < full;
    Ok(EgFamilyAudit {
        i,
        n,
        crk,
        crk_expected,
        ncrk,
        full,
        passed: ncrk == full && crk == crk_expected && deficient_ok,
    })
}
