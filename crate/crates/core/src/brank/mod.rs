//! Border-rank lower bounds from exterior flattenings.
//!
//! For a tensor `T = Σ_i e_i ⊗ X_i ∈ K^a ⊗ K^b ⊗ K^c` and the wedge map
//! `L: K^a → Hom(Λ^p K^a, Λ^{p+1} K^a)`, the block matrix
//! `ψ_L(T) = Σ_i L_{e_i} ⊗ X_i` satisfies `rk ψ_L(T) ≤ brk(T) · C(a-1, p)`.
//! Computing `rk ψ_L(T)` exactly therefore certifies
//! `brk(T) ≥ ceil(rk ψ_L(T) / C(a-1, p))`.

use num_integer::binomial;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactmat::{DenseMatrix, MatrixError, ScalarDomain};
use crate::pencil::{blowup_rank_estimate, PencilError};
use crate::wedge::{shift_matrix, wedge_matrix, WedgeError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BrankError {
    #[error("tensor dimensions must be positive, got {0}x{1}x{2}")]
    EmptyTensor(usize, usize, usize),
    #[error("slice {index} is {got:?}, expected {expected:?}")]
    SliceShape {
        index: usize,
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("p = {p} must be below a = {a}")]
    DegreeOutOfRange { p: usize, a: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Wedge(#[from] WedgeError),
    #[error(transparent)]
    Pencil(#[from] PencilError),
}

/// A dense `a x b x c` tensor stored as `a` slices `X_i` of size `b x c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor3 {
    slices: Vec<DenseMatrix>,
    b: usize,
    c: usize,
}

impl Tensor3 {
    pub fn from_slices(slices: Vec<DenseMatrix>) -> Result<Self, BrankError> {
        let (b, c) = slices.first().map(DenseMatrix::dims).unwrap_or((0, 0));
        if slices.is_empty() || b == 0 || c == 0 {
            return Err(BrankError::EmptyTensor(slices.len(), b, c));
        }
        let domain = slices[0].domain();
        for (index, s) in slices.iter().enumerate() {
            if s.dims() != (b, c) {
                return Err(BrankError::SliceShape {
                    index,
                    expected: (b, c),
                    got: s.dims(),
                });
            }
            if s.domain() != domain {
                return Err(MatrixError::DomainMismatch {
                    left: domain,
                    right: s.domain(),
                }
                .into());
            }
        }
        Ok(Self { slices, b, c })
    }

    pub fn zeros(a: usize, b: usize, c: usize, domain: ScalarDomain) -> Result<Self, BrankError> {
        Self::from_slices(vec![DenseMatrix::zeros(b, c, domain); a])
    }

    /// `u ⊗ v ⊗ w` for integer vectors.
    pub fn rank_one(u: &[i64], v: &[i64], w: &[i64], domain: ScalarDomain) -> Result<Self, BrankError> {
        let vw = DenseMatrix::from_i64(v.len(), 1, v, domain)?.mul(&DenseMatrix::from_i64(
            1,
            w.len(),
            w,
            domain,
        )?)?;
        Self::from_slices(u.iter().map(|&x| vw.scale_i64(x)).collect())
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.slices.len(), self.b, self.c)
    }

    pub fn domain(&self) -> ScalarDomain {
        self.slices[0].domain()
    }

    /// `X_i` for zero-based `i`.
    pub fn slice(&self, i: usize) -> &DenseMatrix {
        &self.slices[i]
    }

    pub fn slices(&self) -> &[DenseMatrix] {
        &self.slices
    }

    pub fn add(&self, other: &Self) -> Result<Self, BrankError> {
        if self.dims() != other.dims() {
            let (a, b, c) = self.dims();
            let (x, y, z) = other.dims();
            return Err(MatrixError::DimensionMismatch {
                op: "tensor add",
                left: (a, b * c),
                right: (x, y * z),
            }
            .into());
        }
        let slices = self
            .slices
            .iter()
            .zip(&other.slices)
            .map(|(x, y)| x.add(y))
            .collect::<Result<_, _>>()?;
        Self::from_slices(slices)
    }

    pub fn scale_i64(&self, k: i64) -> Self {
        Self {
            slices: self.slices.iter().map(|x| x.scale_i64(k)).collect(),
            b: self.b,
            c: self.c,
        }
    }

    pub fn to_domain(&self, domain: ScalarDomain) -> Result<Self, BrankError> {
        Self::from_slices(
            self.slices
                .iter()
                .map(|x| x.to_domain(domain))
                .collect::<Result<_, _>>()?,
        )
    }
}

/// `ψ_L(T) = Σ_i L_{e_i} ⊗ X_i` with `L_{e_i}: Λ^p K^a → Λ^{p+1} K^a`; size
/// `C(a, p+1) b x C(a, p) c`.
pub fn psi_apply(p: usize, t: &Tensor3) -> Result<DenseMatrix, BrankError> {
    let (a, b, c) = t.dims();
    if p >= a {
        return Err(BrankError::DegreeOutOfRange { p, a });
    }
    let domain = t.domain();
    let mut out = DenseMatrix::zeros(binomial(a, p + 1) * b, binomial(a, p) * c, domain);
    for (idx, x) in t.slices().iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let l = wedge_matrix(idx + 1, p, a, domain)?;
        for (r, col, v) in l.nonzeros() {
            let block = out.submatrix(r * b, col * c, b, c).add(&x.scale(&v)?)?;
            out.paste(r * b, col * c, &block)?;
        }
    }
    Ok(out)
}

/// How [`certify`] computes `rk ψ_L(T)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Arithmetic {
    /// Fraction-free elimination over the rationals; unconditional.
    ExactRational,
    /// Elimination modulo a prime. For an integer tensor the rank mod p never
    /// exceeds the rational rank, so the bound is still sound, only possibly
    /// weaker.
    Prime { modulus: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BorderRankCertificate {
    pub tensor_dims: (usize, usize, usize),
    pub p: usize,
    pub n: usize,
    pub psi_rank: usize,
    pub xl_rank: usize,
    pub lower_bound: usize,
    pub arithmetic: Arithmetic,
    /// Largest border rank the certificate rules out, `lower_bound - 1`.
    pub excluded_rank: usize,
    /// `excluded_rank * xl_rank`: some `(D+1)`-minor of `ψ_L(T)` is nonzero.
    pub threshold_d: usize,
}

/// Certifies `brk(T) ≥ ceil(rk ψ_L(T) / C(a-1, p))`.
pub fn certify(t: &Tensor3, p: usize, arithmetic: Arithmetic) -> Result<BorderRankCertificate, BrankError> {
    let (a, _, _) = t.dims();
    let domain = match arithmetic {
        Arithmetic::ExactRational => ScalarDomain::Rational,
        Arithmetic::Prime { modulus } => ScalarDomain::prime(modulus)?,
    };
    let psi = psi_apply(p, &t.to_domain(domain)?)?;
    let psi_rank = psi.rank();
    let xl_rank = binomial(a - 1, p);
    let lower_bound = psi_rank.div_ceil(xl_rank);
    let excluded_rank = lower_bound.saturating_sub(1);
    Ok(BorderRankCertificate {
        tensor_dims: t.dims(),
        p,
        n: a,
        psi_rank,
        xl_rank,
        lower_bound,
        arithmetic,
        excluded_rank,
        threshold_d: excluded_rank * xl_rank,
    })
}

/// The `m x m x m` tensor (`m = 2p + 1`) with slices `Q̃_{i-p-1}`, where
/// `Q_r = S_r ⊕ S_r` and `Q̃_r` drops the last row and column of `Q_r`.
pub fn explicit_tensor(p: usize) -> Result<Tensor3, BrankError> {
    if p == 0 {
        return Err(BrankError::DegreeOutOfRange { p, a: 1 });
    }
    let domain = ScalarDomain::Rational;
    let m = 2 * p + 1;
    let slices = (1..=m)
        .map(|i| {
            let s = shift_matrix(i as i64 - p as i64 - 1, p, domain);
            s.direct_sum(&s)?.delete_last_row_col()
        })
        .collect::<Result<_, _>>()?;
    Tensor3::from_slices(slices)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationsReport {
    pub p: usize,
    pub m: usize,
    pub observed_rank: usize,
    /// `D = C(2p, p) (2m - 4)`.
    pub threshold_d: usize,
    pub full_rank: usize,
    pub trials: usize,
    pub seed: u64,
    pub modulus: u64,
    /// `observed_rank > D`.
    pub passed: bool,
    /// `observed_rank == m C(2p+1, p)`; reported, not required.
    pub full: bool,
}

/// Estimates `rk(X_L^{m})` for `L` the wedge map of `A(p, 2p+1)` and
/// compares it with `D = C(2p, p)(2m - 4)`.
pub fn equations_threshold_check(
    p: usize,
    trials: usize,
    seed: u64,
    modulus: u64,
) -> Result<EquationsReport, BrankError> {
    if p == 0 {
        return Err(BrankError::DegreeOutOfRange { p, a: 1 });
    }
    let m = 2 * p + 1;
    let pencil = crate::wedge::wedge_pencil(p, m, ScalarDomain::prime(modulus)?)?;
    let report = blowup_rank_estimate(&pencil, m, trials, seed)?;
    let threshold_d = binomial(2 * p, p) * (2 * m - 4);
    let full_rank = m * binomial(m, p);
    Ok(EquationsReport {
        p,
        m,
        observed_rank: report.observed_rank,
        threshold_d,
        full_rank,
        trials,
        seed,
        modulus,
        passed: report.observed_rank > threshold_d,
        full: report.observed_rank == full_rank,
    })
}
