//! Linear pencils `A = X_0 + t_1 X_1 + ... + t_m X_m` and their blow-ups.
//!
//! The randomized estimators live in [`estimate`], the property audits in
//! [`audit`] and a handful of standard pencils in [`fixtures`].

pub mod audit;
pub mod estimate;
pub mod fixtures;

use thiserror::Error;

use crate::exactmat::{
    rank_mod_p, DenseMatrix, MatrixError, PrimeField, ScalarDomain, SparseMatrix, MIN_RANDOMIZED_MODULUS,
};

pub use audit::{
    concavity_audit, monotone_audit, profile, ratio_audit, regularity_audit, BlowupProfile,
    ConcavityViolation, MonotoneAudit, RatioAudit, RegularityAudit,
};
pub use estimate::{blowup_rank_estimate, crank_estimate, ncrank, ncrank_report, BlowupRankReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PencilError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("pencil has {expected} variables but {got} substitutes were given")]
    SubstituteCount { expected: usize, got: usize },
    #[error("substitute {index} is {got:?}, expected {expected:?}")]
    SubstituteShape {
        index: usize,
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("randomized estimation needs a prime-field pencil, got {0}")]
    NeedsPrimeField(ScalarDomain),
    #[error("modulus {0} is too small for randomized estimation (need at least 2^40)")]
    ModulusTooSmall(u64),
    #[error("at least one trial is required")]
    NoTrials,
    #[error("blow-up size must be at least 1")]
    ZeroBlowup,
    #[error(
        "blow-up rank {rank} at d = {d} is not a multiple of d; the trials did not reach \
         the generic rank, raise --trials or use a larger modulus"
    )]
    NotStabilized { d: usize, rank: usize },
}

/// A linear pencil with constant term `X_0` and coefficients `X_1..X_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearPencil {
    rows: usize,
    cols: usize,
    constant: DenseMatrix,
    coeffs: Vec<DenseMatrix>,
}

impl LinearPencil {
    /// Checks that every matrix has the shape and domain of `constant`.
    pub fn new(constant: DenseMatrix, coeffs: Vec<DenseMatrix>) -> Result<Self, PencilError> {
        let (rows, cols) = constant.dims();
        for x in &coeffs {
            if x.dims() != (rows, cols) {
                return Err(MatrixError::DimensionMismatch {
                    op: "pencil",
                    left: (rows, cols),
                    right: x.dims(),
                }
                .into());
            }
            if x.domain() != constant.domain() {
                return Err(MatrixError::DomainMismatch {
                    left: constant.domain(),
                    right: x.domain(),
                }
                .into());
            }
        }
        Ok(Self {
            rows,
            cols,
            constant,
            coeffs,
        })
    }

    /// The pencil `t_1 X_1 + ... + t_m X_m` with zero constant term.
    pub fn homogeneous(
        rows: usize,
        cols: usize,
        coeffs: Vec<DenseMatrix>,
        domain: ScalarDomain,
    ) -> Result<Self, PencilError> {
        Self::new(DenseMatrix::zeros(rows, cols, domain), coeffs)
    }

    pub fn zero(rows: usize, cols: usize, num_vars: usize, domain: ScalarDomain) -> Self {
        let z = DenseMatrix::zeros(rows, cols, domain);
        Self {
            rows,
            cols,
            constant: z.clone(),
            coeffs: vec![z; num_vars],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn num_vars(&self) -> usize {
        self.coeffs.len()
    }

    pub fn domain(&self) -> ScalarDomain {
        self.constant.domain()
    }

    pub fn constant(&self) -> &DenseMatrix {
        &self.constant
    }

    pub fn coeffs(&self) -> &[DenseMatrix] {
        &self.coeffs
    }

    /// `X_0, X_1, ..., X_m` in order.
    pub fn matrices(&self) -> impl Iterator<Item = &DenseMatrix> {
        std::iter::once(&self.constant).chain(&self.coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.matrices().all(DenseMatrix::is_zero)
    }

    /// Reduces every matrix into `domain`.
    pub fn to_domain(&self, domain: ScalarDomain) -> Result<Self, PencilError> {
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            constant: self.constant.to_domain(domain)?,
            coeffs: self
                .coeffs
                .iter()
                .map(|x| x.to_domain(domain))
                .collect::<Result<_, _>>()?,
        })
    }

    /// `X_0 ⊗ I_d + Σ X_i ⊗ S_i` for `d x d` substitutes `S_i`.
    pub fn evaluate(&self, subs: &[DenseMatrix], d: usize) -> Result<DenseMatrix, PencilError> {
        if subs.len() != self.num_vars() {
            return Err(PencilError::SubstituteCount {
                expected: self.num_vars(),
                got: subs.len(),
            });
        }
        for (index, s) in subs.iter().enumerate() {
            if s.dims() != (d, d) {
                return Err(PencilError::SubstituteShape {
                    index,
                    expected: (d, d),
                    got: s.dims(),
                });
            }
        }
        let domain = self.domain();
        let mut acc = self.constant.kron(&DenseMatrix::identity(d, domain))?;
        for (x, s) in self.coeffs.iter().zip(subs) {
            acc = acc.add(&x.kron(s)?)?;
        }
        Ok(acc)
    }

    /// Evaluates at scalars, `X_0 + Σ t_i X_i`.
    pub fn evaluate_scalars(&self, values: &[i64]) -> Result<DenseMatrix, PencilError> {
        let domain = self.domain();
        let subs: Vec<_> = values
            .iter()
            .map(|&v| DenseMatrix::from_i64(1, 1, &[v], domain))
            .collect::<Result<_, _>>()?;
        self.evaluate(&subs, 1)
    }

    /// The same pencil with variables `X_1..X_m` and `X_0` treated as a
    /// spanning set, as residues. Used by the estimators.
    pub(crate) fn support(&self) -> Result<Support, PencilError> {
        let field = self.randomized_field()?;
        let mats: Vec<&[u64]> = self
            .matrices()
            .map(|m| m.residues().expect("prime-field pencil"))
            .collect();
        let mut entries = Vec::new();
        for a in 0..self.rows {
            for b in 0..self.cols {
                let k = a * self.cols + b;
                let terms: Vec<(usize, u64)> = mats
                    .iter()
                    .enumerate()
                    .filter(|(_, m)| m[k] != 0)
                    .map(|(i, m)| (i, m[k]))
                    .collect();
                if !terms.is_empty() {
                    entries.push((a, b, terms));
                }
            }
        }
        Ok(Support {
            field,
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub(crate) fn randomized_field(&self) -> Result<PrimeField, PencilError> {
        let domain = self.domain();
        let field = domain.field().ok_or(PencilError::NeedsPrimeField(domain))?;
        if field.modulus() < MIN_RANDOMIZED_MODULUS {
            return Err(PencilError::ModulusTooSmall(field.modulus()));
        }
        Ok(field)
    }
}

/// `(row, col, [(matrix, value)])`; matrix 0 is the constant.
pub(crate) type SupportEntry = (usize, usize, Vec<(usize, u64)>);

/// Nonzero positions of a prime-field pencil with their `(matrix, value)`
/// terms; index 0 is the constant.
#[derive(Debug, PartialEq, Eq)]
pub(crate) struct Support {
    pub field: PrimeField,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<SupportEntry>,
}

impl Support {
    /// Rank of `Σ_i X_i ⊗ R_i` where `R_i` are `p x q` row-major residue
    /// blocks, one per matrix of the pencil (constant first).
    pub fn blowup_rank(&self, blocks: &[Vec<u64>], p: usize, q: usize) -> usize {
        let f = self.field;
        let (n, m) = (self.rows * p, self.cols * q);
        if n == 0 || m == 0 {
            return 0;
        }
        let sparse = self.entries.len() * 4 < self.rows * self.cols && n * m > 1 << 16;
        let mut block = vec![0u64; p * q];
        let fill = |terms: &[(usize, u64)], block: &mut [u64]| {
            block.iter_mut().for_each(|x| *x = 0);
            for &(i, c) in terms {
                for (x, &r) in block.iter_mut().zip(&blocks[i]) {
                    if r != 0 {
                        *x = f.add(*x, f.mul(c, r));
                    }
                }
            }
        };
        if sparse {
            let mut triplets = Vec::new();
            for (a, b, terms) in &self.entries {
                fill(terms, &mut block);
                for (k, &v) in block.iter().enumerate() {
                    if v != 0 {
                        triplets.push((a * p + k / q, b * q + k % q, v));
                    }
                }
            }
            SparseMatrix::from_triplets(f, n, m, triplets).rank()
        } else {
            let mut buf = vec![0u64; n * m];
            for (a, b, terms) in &self.entries {
                fill(terms, &mut block);
                for r in 0..p {
                    let dst = (a * p + r) * m + b * q;
                    buf[dst..dst + q].copy_from_slice(&block[r * q..(r + 1) * q]);
                }
            }
            rank_mod_p(&f, buf, n, m)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_substitutes_leave_constant() {
        let p = fixtures::skew3(ScalarDomain::Rational);
        let d = 2;
        let z = DenseMatrix::zeros(d, d, ScalarDomain::Rational);
        let got = p.evaluate(&[z.clone(), z], d).unwrap();
        let want = p
            .constant()
            .kron(&DenseMatrix::identity(d, ScalarDomain::Rational))
            .unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn skew3_scalar_rank() {
        let p = fixtures::skew3(ScalarDomain::Rational);
        assert_eq!(p.evaluate_scalars(&[1, 2]).unwrap().rank(), 2);
    }

    #[test]
    fn rejects_bad_substitutes() {
        let p = fixtures::skew3(ScalarDomain::Rational);
        let s = DenseMatrix::identity(2, ScalarDomain::Rational);
        assert!(matches!(
            p.evaluate(std::slice::from_ref(&s), 2),
            Err(PencilError::SubstituteCount { .. })
        ));
        assert!(matches!(
            p.evaluate(&[s.clone(), s], 3),
            Err(PencilError::SubstituteShape { .. })
        ));
    }

    #[test]
    fn dense_and_sparse_assembly_agree() {
        use rand::Rng;
        // A sparse pencil large enough to take the sparse branch.
        let f = PrimeField::default_field();
        let domain = ScalarDomain::default_prime();
        let n = 80;
        let mut rng = crate::rng::stream(3, &[]);
        let mut coeffs = Vec::new();
        for _ in 0..2 {
            let mut x = DenseMatrix::zeros(n, n, domain);
            for _ in 0..n {
                let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
                x.set_i64(i, j, 1);
            }
            coeffs.push(x);
        }
        let pencil = LinearPencil::homogeneous(n, n, coeffs, domain).unwrap();
        let support = pencil.support().unwrap();
        let d = 4;
        let blocks: Vec<Vec<u64>> = (0..3)
            .map(|_| {
                DenseMatrix::random(d, d, f, &mut rng)
                    .residues()
                    .unwrap()
                    .to_vec()
            })
            .collect();
        let fast = support.blowup_rank(&blocks, d, d);
        let subs: Vec<DenseMatrix> = blocks[1..]
            .iter()
            .map(|b| DenseMatrix::from_residues(d, d, b.clone(), f).unwrap())
            .collect();
        let c0 = DenseMatrix::from_residues(d, d, blocks[0].clone(), f).unwrap();
        let slow = pencil
            .evaluate(&subs, d)
            .unwrap()
            .sub(&pencil.constant().kron(&DenseMatrix::identity(d, domain)).unwrap())
            .unwrap()
            .add(&pencil.constant().kron(&c0).unwrap())
            .unwrap();
        assert_eq!(fast, slow.rank());
    }
}
