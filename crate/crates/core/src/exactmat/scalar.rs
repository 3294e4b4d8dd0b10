//! Scalar domains: the rationals and prime fields `Z/pZ` with `p < 2^63`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::MatrixError;

/// The Mersenne prime `2^61 - 1`, used as the default modulus for randomized
/// rank estimation.
pub const DEFAULT_MODULUS: u64 = (1u64 << 61) - 1;

/// Smallest modulus accepted for randomized work. Below this the
/// Schwartz–Zippel failure bound stops being negligible.
pub const MIN_RANDOMIZED_MODULUS: u64 = 1u64 << 40;

/// A prime field `Z/pZ`.
///
/// Products are reduced with Barrett reduction, which keeps the elimination
/// kernels free of 128-bit divisions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    modulus: u64,
    // floor(2^(2k) / p) with k the bit length of p
    mu: u128,
    shift: u32,
}

impl PrimeField {
    /// Builds the field, checking that `modulus` is a prime below `2^63`.
    pub fn new(modulus: u64) -> Result<Self, MatrixError> {
        if modulus >= 1 << 63 || !primal_check::miller_rabin(modulus) {
            return Err(MatrixError::NotPrime(modulus));
        }
        Ok(Self::with_modulus(modulus))
    }

    fn with_modulus(modulus: u64) -> Self {
        let shift = 64 - modulus.leading_zeros();
        let mu = (1u128 << (2 * shift)) / modulus as u128;
        Self { modulus, mu, shift }
    }

    pub fn default_field() -> Self {
        Self::with_modulus(DEFAULT_MODULUS)
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        let x = a as u128 * b as u128;
        let q = ((x >> (self.shift - 1)) * self.mu) >> (self.shift + 1);
        let mut r = (x - q * self.modulus as u128) as u64;
        while r >= self.modulus {
            r -= self.modulus;
        }
        r
    }

    /// `a - f*b`, the elimination kernel.
    #[inline]
    pub fn sub_mul(&self, a: u64, f: u64, b: u64) -> u64 {
        self.sub(a, self.mul(f, b))
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.modulus - 2))
        }
    }

    pub fn from_i64(&self, v: i64) -> u64 {
        let m = self.modulus as i128;
        (v as i128).rem_euclid(m) as u64
    }

    pub fn from_bigint(&self, v: &BigInt) -> u64 {
        let m = BigInt::from(self.modulus);
        v.mod_floor(&m).to_u64().expect("residue fits in u64")
    }

    /// Reduces a rational; fails when the denominator vanishes mod p.
    pub fn from_rational(&self, v: &BigRational) -> Result<u64, MatrixError> {
        let num = self.from_bigint(v.numer());
        let den = self.from_bigint(v.denom());
        let inv = self.inv(den).ok_or_else(|| MatrixError::DenominatorVanishes {
            value: v.to_string(),
            modulus: self.modulus,
        })?;
        Ok(self.mul(num, inv))
    }
}

/// Which field a matrix lives over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarDomain {
    Rational,
    PrimeField { modulus: u64 },
}

impl ScalarDomain {
    pub fn prime(modulus: u64) -> Result<Self, MatrixError> {
        PrimeField::new(modulus).map(|f| ScalarDomain::PrimeField { modulus: f.modulus })
    }

    pub fn default_prime() -> Self {
        ScalarDomain::PrimeField {
            modulus: DEFAULT_MODULUS,
        }
    }

    pub fn modulus(&self) -> Option<u64> {
        match self {
            ScalarDomain::Rational => None,
            ScalarDomain::PrimeField { modulus } => Some(*modulus),
        }
    }

    pub fn field(&self) -> Option<PrimeField> {
        self.modulus().map(PrimeField::with_modulus)
    }
}

impl fmt::Display for ScalarDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarDomain::Rational => f.write_str("QQ"),
            ScalarDomain::PrimeField { modulus } => write!(f, "GF({modulus})"),
        }
    }
}

/// A single matrix entry. Rationals are always kept in lowest terms (the
/// `num-rational` invariant); residues are canonical representatives in
/// `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Residue(u64),
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Residue(v) => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Residue(v) => *v == 1,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{r}"),
            Scalar::Residue(v) => write!(f, "{v}"),
        }
    }
}

/// Parses `"-3"`, `"7/4"` or `"0.25"` into a rational.
pub fn parse_rational(text: &str) -> Result<BigRational, MatrixError> {
    let bad = || MatrixError::BadScalar(text.to_string());
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.trim_start().starts_with('-');
        let int_part = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(int).map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part = BigInt::from_str(frac).map_err(|_| bad())?;
        let mut num = int_part.abs() * &scale + frac_part;
        if negative {
            num = -num;
        }
        return Ok(BigRational::new(num, scale));
    }
    BigInt::from_str(t)
        .map(BigRational::from_integer)
        .map_err(|_| bad())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_modulus_is_prime() {
        assert!(PrimeField::new(DEFAULT_MODULUS).is_ok());
        assert!(PrimeField::new(DEFAULT_MODULUS - 2).is_err());
        assert!(PrimeField::new(1).is_err());
    }

    #[test]
    fn field_arithmetic() {
        let f = PrimeField::new(101).unwrap();
        assert_eq!(f.add(100, 5), 4);
        assert_eq!(f.sub(3, 5), 99);
        assert_eq!(f.mul(f.inv(7).unwrap(), 7), 1);
        assert_eq!(f.inv(0), None);
        assert_eq!(f.from_i64(-1), 100);
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(f.mul(f.from_rational(&half).unwrap(), 2), 1);
    }

    #[test]
    fn barrett_matches_wide_remainder() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for &p in &[
            2u64,
            3,
            101,
            65537,
            (1 << 31) - 1,
            DEFAULT_MODULUS,
            9223372036854775783,
        ] {
            let f = PrimeField::new(p).unwrap();
            for _ in 0..2000 {
                let a = rng.random_range(0..p);
                let b = rng.random_range(0..p);
                assert_eq!(f.mul(a, b) as u128, (a as u128 * b as u128) % p as u128);
            }
            assert_eq!(f.mul(p - 1, p - 1), 1 % p);
        }
    }

    #[test]
    fn parses_rationals() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(parse_rational("-3").unwrap(), r(-3, 1));
        assert_eq!(parse_rational("14/8").unwrap(), r(7, 4));
        assert_eq!(parse_rational("-0.25").unwrap(), r(-1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
