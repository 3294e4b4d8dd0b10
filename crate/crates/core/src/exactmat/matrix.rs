use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use super::field::{self, Arith, Rationals};
use super::{rank, MatrixError, PrimeField, Scalar, ScalarDomain};

/// A dense row-major matrix over the rationals or a prime field.
///
/// Values are immutable once shared: every operation returns a new matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Entries,
}

#[derive(Clone, PartialEq, Eq)]
pub(crate) enum Entries {
    Rational(Vec<BigRational>),
    Prime(PrimeField, Vec<u64>),
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize, domain: ScalarDomain) -> Self {
        let entries = match domain.field() {
            None => Entries::Rational(vec![BigRational::zero(); rows * cols]),
            Some(f) => Entries::Prime(f, vec![0; rows * cols]),
        };
        Self { rows, cols, entries }
    }

    pub fn identity(n: usize, domain: ScalarDomain) -> Self {
        let mut m = Self::zeros(n, n, domain);
        for i in 0..n {
            m.set_i64(i, i, 1);
        }
        m
    }

    /// Builds a matrix from row-major integers.
    pub fn from_i64(
        rows: usize,
        cols: usize,
        values: &[i64],
        domain: ScalarDomain,
    ) -> Result<Self, MatrixError> {
        check_len(rows, cols, values.len())?;
        let entries = match domain.field() {
            None => Entries::Rational(
                values
                    .iter()
                    .map(|&v| BigRational::from_integer(v.into()))
                    .collect(),
            ),
            Some(f) => Entries::Prime(f, values.iter().map(|&v| f.from_i64(v)).collect()),
        };
        Ok(Self { rows, cols, entries })
    }

    /// Builds a matrix from row-major rationals, reducing into `domain`.
    pub fn from_rationals(
        rows: usize,
        cols: usize,
        values: Vec<BigRational>,
        domain: ScalarDomain,
    ) -> Result<Self, MatrixError> {
        check_len(rows, cols, values.len())?;
        let entries = match domain.field() {
            None => Entries::Rational(values),
            Some(f) => Entries::Prime(
                f,
                values
                    .iter()
                    .map(|v| f.from_rational(v))
                    .collect::<Result<_, _>>()?,
            ),
        };
        Ok(Self { rows, cols, entries })
    }

    /// Builds a prime-field matrix from residues; values are reduced mod p.
    pub fn from_residues(
        rows: usize,
        cols: usize,
        mut values: Vec<u64>,
        field: PrimeField,
    ) -> Result<Self, MatrixError> {
        check_len(rows, cols, values.len())?;
        let p = field.modulus();
        for v in &mut values {
            *v %= p;
        }
        Ok(Self {
            rows,
            cols,
            entries: Entries::Prime(field, values),
        })
    }

    /// A matrix with independent uniform entries of `field`.
    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, field: PrimeField, rng: &mut R) -> Self {
        let p = field.modulus();
        let values = (0..rows * cols).map(|_| rng.random_range(0..p)).collect();
        Self {
            rows,
            cols,
            entries: Entries::Prime(field, values),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn domain(&self) -> ScalarDomain {
        match &self.entries {
            Entries::Rational(_) => ScalarDomain::Rational,
            Entries::Prime(f, _) => ScalarDomain::PrimeField { modulus: f.modulus() },
        }
    }

    pub fn field(&self) -> Option<PrimeField> {
        match &self.entries {
            Entries::Rational(_) => None,
            Entries::Prime(f, _) => Some(*f),
        }
    }

    /// Row-major residues, for prime-field matrices.
    pub fn residues(&self) -> Option<&[u64]> {
        match &self.entries {
            Entries::Prime(_, v) => Some(v),
            Entries::Rational(_) => None,
        }
    }

    /// Row-major entries, for rational matrices.
    pub fn rationals(&self) -> Option<&[BigRational]> {
        match &self.entries {
            Entries::Rational(v) => Some(v),
            Entries::Prime(..) => None,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of range");
        let k = i * self.cols + j;
        match &self.entries {
            Entries::Rational(v) => Scalar::Rational(v[k].clone()),
            Entries::Prime(_, v) => Scalar::Residue(v[k]),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: &BigRational) -> Result<(), MatrixError> {
        if i >= self.rows || j >= self.cols {
            return Err(MatrixError::OutOfRange(i, j));
        }
        let k = i * self.cols + j;
        match &mut self.entries {
            Entries::Rational(v) => v[k] = value.clone(),
            Entries::Prime(f, v) => v[k] = f.from_rational(value)?,
        }
        Ok(())
    }

    /// Sets an entry from an integer. Panics on out-of-range indices.
    pub fn set_i64(&mut self, i: usize, j: usize, value: i64) {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of range");
        let k = i * self.cols + j;
        match &mut self.entries {
            Entries::Rational(v) => v[k] = BigRational::from_integer(value.into()),
            Entries::Prime(f, v) => v[k] = f.from_i64(value),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.entries {
            Entries::Rational(v) => v.iter().all(Zero::is_zero),
            Entries::Prime(_, v) => v.iter().all(|&x| x == 0),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let s = self.get(i, j);
                    if i == j {
                        s.is_one()
                    } else {
                        s.is_zero()
                    }
                })
            })
    }

    /// Nonzero entries as `(row, col, value)` in row-major order.
    pub fn nonzeros(&self) -> Vec<(usize, usize, Scalar)> {
        let cols = self.cols;
        match &self.entries {
            Entries::Rational(v) => v
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(k, x)| (k / cols, k % cols, Scalar::Rational(x.clone())))
                .collect(),
            Entries::Prime(_, v) => v
                .iter()
                .enumerate()
                .filter(|(_, x)| **x != 0)
                .map(|(k, x)| (k / cols, k % cols, Scalar::Residue(*x)))
                .collect(),
        }
    }

    pub fn nnz(&self) -> usize {
        match &self.entries {
            Entries::Rational(v) => v.iter().filter(|x| !x.is_zero()).count(),
            Entries::Prime(_, v) => v.iter().filter(|&&x| x != 0).count(),
        }
    }

    /// Reduces a rational matrix into `domain` (identity if already there).
    pub fn to_domain(&self, domain: ScalarDomain) -> Result<Self, MatrixError> {
        if self.domain() == domain {
            return Ok(self.clone());
        }
        match &self.entries {
            Entries::Rational(v) => Self::from_rationals(self.rows, self.cols, v.clone(), domain),
            Entries::Prime(..) => Err(MatrixError::DomainMismatch {
                left: self.domain(),
                right: domain,
            }),
        }
    }

    pub fn transpose(&self) -> Self {
        let (r, c) = (self.rows, self.cols);
        let entries = match &self.entries {
            Entries::Rational(v) => Entries::Rational(transpose_buf(v, r, c)),
            Entries::Prime(f, v) => Entries::Prime(*f, transpose_buf(v, r, c)),
        };
        Self {
            rows: c,
            cols: r,
            entries,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, MatrixError> {
        self.check_same_dims("add", other)?;
        self.zip(other, |e, a, b| match e {
            Zip::Q => a.add_q(b),
            Zip::P(f) => a.add_p(b, f),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, MatrixError> {
        self.check_same_dims("sub", other)?;
        self.zip(other, |e, a, b| match e {
            Zip::Q => a.sub_q(b),
            Zip::P(f) => a.sub_p(b, f),
        })
    }

    pub fn neg(&self) -> Self {
        let entries = match &self.entries {
            Entries::Rational(v) => Entries::Rational(v.iter().map(|x| -x).collect()),
            Entries::Prime(f, v) => Entries::Prime(*f, v.iter().map(|&x| f.neg(x)).collect()),
        };
        Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    /// Multiplies every entry by an integer.
    pub fn scale_i64(&self, c: i64) -> Self {
        let entries = match &self.entries {
            Entries::Rational(v) => {
                let c = BigRational::from_integer(c.into());
                Entries::Rational(v.iter().map(|x| x * &c).collect())
            }
            Entries::Prime(f, v) => {
                let c = f.from_i64(c);
                Entries::Prime(*f, v.iter().map(|&x| f.mul(x, c)).collect())
            }
        };
        Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    /// Multiplies every entry by a scalar of the same domain.
    pub fn scale(&self, c: &Scalar) -> Result<Self, MatrixError> {
        let entries = match (&self.entries, c) {
            (Entries::Rational(v), Scalar::Rational(c)) => {
                Entries::Rational(v.iter().map(|x| x * c).collect())
            }
            (Entries::Prime(f, v), Scalar::Residue(c)) => {
                Entries::Prime(*f, v.iter().map(|&x| f.mul(x, *c)).collect())
            }
            (Entries::Prime(f, v), Scalar::Rational(c)) => {
                let c = f.from_rational(c)?;
                Entries::Prime(*f, v.iter().map(|&x| f.mul(x, c)).collect())
            }
            (Entries::Rational(_), Scalar::Residue(_)) => {
                return Err(MatrixError::BadScalar(format!(
                    "residue {c} applied to a rational matrix"
                )))
            }
        };
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::DimensionMismatch {
                op: "mul",
                left: self.dims(),
                right: other.dims(),
            });
        }
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let entries = match (&self.entries, &other.entries) {
            (Entries::Rational(a), Entries::Rational(b)) => {
                Entries::Rational(field::matmul(&Rationals, a, b, n, k, m))
            }
            (Entries::Prime(f, a), Entries::Prime(g, b)) if f == g => {
                Entries::Prime(*f, field::matmul(f, a, b, n, k, m))
            }
            _ => return Err(self.domain_mismatch(other)),
        };
        Ok(Self {
            rows: n,
            cols: m,
            entries,
        })
    }

    /// Kronecker product: block `(i, j)` of the result is `self[i, j] * other`.
    pub fn kron(&self, other: &Self) -> Result<Self, MatrixError> {
        let (ar, ac) = self.dims();
        let (br, bc) = other.dims();
        let (rows, cols) = (ar * br, ac * bc);
        let entries = match (&self.entries, &other.entries) {
            (Entries::Rational(a), Entries::Rational(b)) => {
                Entries::Rational(kron_buf(&Rationals, a, b, ar, ac, br, bc))
            }
            (Entries::Prime(f, a), Entries::Prime(g, b)) if f == g => {
                Entries::Prime(*f, kron_buf(f, a, b, ar, ac, br, bc))
            }
            _ => return Err(self.domain_mismatch(other)),
        };
        Ok(Self { rows, cols, entries })
    }

    /// Block-diagonal stacking `[[self, 0], [0, other]]`.
    pub fn direct_sum(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.domain() != other.domain() {
            return Err(self.domain_mismatch(other));
        }
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols, self.domain());
        out.paste(0, 0, self)?;
        out.paste(self.rows, self.cols, other)?;
        Ok(out)
    }

    /// Drops the final row and the final column.
    pub fn delete_last_row_col(&self) -> Result<Self, MatrixError> {
        if self.rows == 0 || self.cols == 0 {
            return Err(MatrixError::DimensionUnderflow(self.rows, self.cols));
        }
        Ok(self.submatrix(0, 0, self.rows - 1, self.cols - 1))
    }

    /// The `height x width` block starting at `(row, col)`.
    pub fn submatrix(&self, row: usize, col: usize, height: usize, width: usize) -> Self {
        assert!(row + height <= self.rows && col + width <= self.cols);
        let pick = |k: usize| (row + k / width) * self.cols + col + k % width;
        let entries = match &self.entries {
            Entries::Rational(v) => {
                Entries::Rational((0..height * width).map(|k| v[pick(k)].clone()).collect())
            }
            Entries::Prime(f, v) => Entries::Prime(*f, (0..height * width).map(|k| v[pick(k)]).collect()),
        };
        Self {
            rows: height,
            cols: width,
            entries,
        }
    }

    /// Overwrites the block at `(row, col)` with `block`.
    pub fn paste(&mut self, row: usize, col: usize, block: &Self) -> Result<(), MatrixError> {
        if row + block.rows > self.rows || col + block.cols > self.cols {
            return Err(MatrixError::DimensionMismatch {
                op: "paste",
                left: self.dims(),
                right: block.dims(),
            });
        }
        let cols = self.cols;
        match (&mut self.entries, &block.entries) {
            (Entries::Rational(dst), Entries::Rational(src)) => {
                for i in 0..block.rows {
                    for j in 0..block.cols {
                        dst[(row + i) * cols + col + j] = src[i * block.cols + j].clone();
                    }
                }
            }
            (Entries::Prime(f, dst), Entries::Prime(g, src)) if f == g => {
                for i in 0..block.rows {
                    let d = (row + i) * cols + col;
                    dst[d..d + block.cols].copy_from_slice(&src[i * block.cols..(i + 1) * block.cols]);
                }
            }
            _ => {
                return Err(MatrixError::DomainMismatch {
                    left: self.domain(),
                    right: block.domain(),
                })
            }
        }
        Ok(())
    }

    /// Exact rank. Rational matrices use fraction-free (Bareiss) elimination,
    /// prime-field matrices ordinary elimination mod p.
    pub fn rank(&self) -> usize {
        match &self.entries {
            Entries::Rational(v) => rank::bareiss_rank(v, self.rows, self.cols),
            Entries::Prime(f, v) => rank::rank_mod_p(f, v.clone(), self.rows, self.cols),
        }
    }

    /// Exact inverse, or `Ok(None)` when the matrix is singular.
    pub fn inverse(&self) -> Result<Option<Self>, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let entries = match &self.entries {
            Entries::Rational(v) => field::invert(&Rationals, v, n).map(Entries::Rational),
            Entries::Prime(f, v) => field::invert(f, v, n).map(|inv| Entries::Prime(*f, inv)),
        };
        Ok(entries.map(|entries| Self {
            rows: n,
            cols: n,
            entries,
        }))
    }

    /// Clears denominators row by row, returning an integer matrix of equal rank.
    pub(crate) fn integer_rows(values: &[BigRational], rows: usize, cols: usize) -> Vec<BigInt> {
        use num_integer::Integer;
        let mut out = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            let row = &values[i * cols..(i + 1) * cols];
            let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            out.extend(row.iter().map(|x| x.numer() * (&lcm / x.denom())));
        }
        out
    }

    fn check_same_dims(&self, op: &'static str, other: &Self) -> Result<(), MatrixError> {
        if self.dims() != other.dims() {
            return Err(MatrixError::DimensionMismatch {
                op,
                left: self.dims(),
                right: other.dims(),
            });
        }
        Ok(())
    }

    fn domain_mismatch(&self, other: &Self) -> MatrixError {
        MatrixError::DomainMismatch {
            left: self.domain(),
            right: other.domain(),
        }
    }

    fn zip(
        &self,
        other: &Self,
        op: impl Fn(Zip, &Entries, &Entries) -> Entries,
    ) -> Result<Self, MatrixError> {
        let tag = match (&self.entries, &other.entries) {
            (Entries::Rational(_), Entries::Rational(_)) => Zip::Q,
            (Entries::Prime(f, _), Entries::Prime(g, _)) if f == g => Zip::P(*f),
            _ => return Err(self.domain_mismatch(other)),
        };
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries: op(tag, &self.entries, &other.entries),
        })
    }
}

#[derive(Clone, Copy)]
enum Zip {
    Q,
    P(PrimeField),
}

impl Entries {
    fn q(&self) -> &[BigRational] {
        match self {
            Entries::Rational(v) => v,
            Entries::Prime(..) => unreachable!("checked by zip"),
        }
    }

    fn p(&self) -> &[u64] {
        match self {
            Entries::Prime(_, v) => v,
            Entries::Rational(_) => unreachable!("checked by zip"),
        }
    }

    fn add_q(&self, o: &Entries) -> Entries {
        Entries::Rational(self.q().iter().zip(o.q()).map(|(a, b)| a + b).collect())
    }

    fn sub_q(&self, o: &Entries) -> Entries {
        Entries::Rational(self.q().iter().zip(o.q()).map(|(a, b)| a - b).collect())
    }

    fn add_p(&self, o: &Entries, f: PrimeField) -> Entries {
        Entries::Prime(
            f,
            self.p().iter().zip(o.p()).map(|(&a, &b)| f.add(a, b)).collect(),
        )
    }

    fn sub_p(&self, o: &Entries, f: PrimeField) -> Entries {
        Entries::Prime(
            f,
            self.p().iter().zip(o.p()).map(|(&a, &b)| f.sub(a, b)).collect(),
        )
    }
}

fn check_len(rows: usize, cols: usize, got: usize) -> Result<(), MatrixError> {
    if rows * cols != got {
        return Err(MatrixError::BadLength {
            expected: rows * cols,
            got,
        });
    }
    Ok(())
}

fn transpose_buf<T: Clone>(v: &[T], r: usize, c: usize) -> Vec<T> {
    (0..r * c).map(|k| v[(k % r) * c + k / r].clone()).collect()
}

fn kron_buf<F: Arith>(
    f: &F,
    a: &[F::Elem],
    b: &[F::Elem],
    ar: usize,
    ac: usize,
    br: usize,
    bc: usize,
) -> Vec<F::Elem> {
    let cols = ac * bc;
    let mut out = vec![f.zero(); ar * br * cols];
    for i in 0..ar {
        for j in 0..ac {
            let x = &a[i * ac + j];
            if f.is_zero(x) {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k) * cols + j * bc + l] = f.mul(x, &b[k * bc + l]);
                }
            }
        }
    }
    out
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "DenseMatrix {}x{} over {}",
            self.rows,
            self.cols,
            self.domain()
        )?;
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(rows: usize, cols: usize, v: &[i64]) -> DenseMatrix {
        DenseMatrix::from_i64(rows, cols, v, ScalarDomain::Rational).unwrap()
    }

    #[test]
    fn identity_and_zero_ranks() {
        assert_eq!(DenseMatrix::identity(3, ScalarDomain::Rational).rank(), 3);
        assert_eq!(DenseMatrix::zeros(3, 3, ScalarDomain::Rational).rank(), 0);
        assert_eq!(DenseMatrix::zeros(0, 0, ScalarDomain::Rational).rank(), 0);
        assert_eq!(DenseMatrix::zeros(0, 4, ScalarDomain::default_prime()).rank(), 0);
    }

    #[test]
    fn kron_dims_and_blocks() {
        let a = q(2, 3, &[1, 2, 3, 4, 5, 6]);
        let b = DenseMatrix::zeros(4, 5, ScalarDomain::Rational);
        assert_eq!(a.kron(&b).unwrap().dims(), (8, 15));

        let c = q(1, 1, &[3]);
        let m = q(2, 2, &[1, -1, 0, 2]);
        assert_eq!(c.kron(&m).unwrap(), m.scale_i64(3));

        let i2 = DenseMatrix::identity(2, ScalarDomain::Rational);
        let low = q(2, 2, &[1, 2, 2, 4]);
        assert_eq!(i2.kron(&low).unwrap().rank(), 2);
    }

    #[test]
    fn kron_domain_mismatch() {
        let a = DenseMatrix::identity(2, ScalarDomain::Rational);
        let b = DenseMatrix::identity(2, ScalarDomain::default_prime());
        assert!(matches!(a.kron(&b), Err(MatrixError::DomainMismatch { .. })));
    }

    #[test]
    fn inverse_cases() {
        let i3 = DenseMatrix::identity(3, ScalarDomain::Rational);
        assert_eq!(i3.inverse().unwrap().unwrap(), i3);
        let j = q(2, 2, &[0, 1, -1, 0]);
        assert_eq!(j.inverse().unwrap().unwrap(), q(2, 2, &[0, -1, 1, 0]));
        assert_eq!(q(2, 2, &[1, 2, 2, 4]).inverse().unwrap(), None);
        assert!(matches!(
            q(1, 2, &[1, 2]).inverse(),
            Err(MatrixError::NotSquare(1, 2))
        ));
    }

    #[test]
    fn direct_sum_and_delete() {
        let i1 = DenseMatrix::identity(1, ScalarDomain::Rational);
        assert_eq!(
            i1.direct_sum(&i1).unwrap(),
            DenseMatrix::identity(2, ScalarDomain::Rational)
        );
        let i3 = DenseMatrix::identity(3, ScalarDomain::Rational);
        assert_eq!(
            i3.delete_last_row_col().unwrap(),
            DenseMatrix::identity(2, ScalarDomain::Rational)
        );
        let empty = DenseMatrix::zeros(0, 2, ScalarDomain::Rational);
        assert!(matches!(
            empty.delete_last_row_col(),
            Err(MatrixError::DimensionUnderflow(0, 2))
        ));
    }

    #[test]
    fn reduction_into_prime_field() {
        let m = q(2, 2, &[2, 0, 0, 3]);
        let p = m.to_domain(ScalarDomain::prime(3).unwrap()).unwrap();
        assert_eq!(p.rank(), 1);
        assert_eq!(m.rank(), 2);
    }
}
