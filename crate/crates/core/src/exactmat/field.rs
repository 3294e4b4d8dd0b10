use num_rational::BigRational;
use num_traits::{One, Zero};

use super::PrimeField;

/// Field operations shared by the dense kernels.
pub(crate) trait Arith {
    type Elem: Clone + PartialEq;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
}

pub(crate) struct Rationals;

impl Arith for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
}

impl Arith for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        PrimeField::add(self, *a, *b)
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        PrimeField::sub(self, *a, *b)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        PrimeField::mul(self, *a, *b)
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        PrimeField::inv(self, *a)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
}

pub(crate) fn matmul<F: Arith>(
    f: &F,
    a: &[F::Elem],
    b: &[F::Elem],
    n: usize,
    k: usize,
    m: usize,
) -> Vec<F::Elem> {
    let mut out = vec![f.zero(); n * m];
    for i in 0..n {
        for l in 0..k {
            let x = &a[i * k + l];
            if f.is_zero(x) {
                continue;
            }
            for j in 0..m {
                let y = &b[l * m + j];
                if !f.is_zero(y) {
                    out[i * m + j] = f.add(&out[i * m + j], &f.mul(x, y));
                }
            }
        }
    }
    out
}

/// Gauss–Jordan inversion of an `n x n` row-major buffer.
pub(crate) fn invert<F: Arith>(f: &F, a: &[F::Elem], n: usize) -> Option<Vec<F::Elem>> {
    let mut m = a.to_vec();
    let mut inv = vec![f.zero(); n * n];
    for i in 0..n {
        inv[i * n + i] = f.one();
    }
    for col in 0..n {
        let pivot = (col..n).find(|&r| !f.is_zero(&m[r * n + col]))?;
        if pivot != col {
            for j in 0..n {
                m.swap(pivot * n + j, col * n + j);
                inv.swap(pivot * n + j, col * n + j);
            }
        }
        let scale = f.inv(&m[col * n + col]).expect("pivot is nonzero");
        for j in 0..n {
            m[col * n + j] = f.mul(&m[col * n + j], &scale);
            inv[col * n + j] = f.mul(&inv[col * n + j], &scale);
        }
        for r in 0..n {
            if r == col || f.is_zero(&m[r * n + col]) {
                continue;
            }
            let factor = m[r * n + col].clone();
            for j in 0..n {
                let t = f.mul(&factor, &m[col * n + j]);
                m[r * n + j] = f.sub(&m[r * n + j], &t);
                let t = f.mul(&factor, &inv[col * n + j]);
                inv[r * n + j] = f.sub(&inv[r * n + j], &t);
            }
        }
    }
    Some(inv)
}
