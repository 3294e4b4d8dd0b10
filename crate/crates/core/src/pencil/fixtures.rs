//! Small pencils with known ranks.

use rand::Rng;

use super::LinearPencil;
use crate::exactmat::{DenseMatrix, ScalarDomain};

fn sparse(n: usize, m: usize, entries: &[(usize, usize, i64)], domain: ScalarDomain) -> DenseMatrix {
    let mut x = DenseMatrix::zeros(n, m, domain);
    for &(i, j, v) in entries {
        x.set_i64(i, j, v);
    }
    x
}

/// The 3x3 skew-symmetric pencil
///
/// ```text
/// [  0    1   t1 ]
/// [ -1    0   t2 ]
/// [ -t1  -t2   0 ]
/// ```
///
/// crk 2, ncrk 3; the blow-up ranks are 2 at d = 1 and 3d for d ≥ 2.
pub fn skew3(domain: ScalarDomain) -> LinearPencil {
    let x0 = sparse(3, 3, &[(0, 1, 1), (1, 0, -1)], domain);
    let x1 = sparse(3, 3, &[(0, 2, 1), (2, 0, -1)], domain);
    let x2 = sparse(3, 3, &[(1, 2, 1), (2, 1, -1)], domain);
    LinearPencil::new(x0, vec![x1, x2]).expect("consistent shapes")
}

/// First 4x4 pencil in variables `a, b, c, d`:
///
/// ```text
/// [  c   d   0   0 ]
/// [  0   0   c   d ]
/// [ -a   0  -b   0 ]
/// [  0  -a   0  -b ]
/// ```
pub fn eh_first(domain: ScalarDomain) -> LinearPencil {
    let a = sparse(4, 4, &[(2, 0, -1), (3, 1, -1)], domain);
    let b = sparse(4, 4, &[(2, 2, -1), (3, 3, -1)], domain);
    let c = sparse(4, 4, &[(0, 0, 1), (1, 2, 1)], domain);
    let d = sparse(4, 4, &[(0, 1, 1), (1, 3, 1)], domain);
    LinearPencil::homogeneous(4, 4, vec![a, b, c, d], domain).expect("consistent shapes")
}

/// Second 4x4 pencil in variables `a, b, c, d`:
///
/// ```text
/// [ -b  -d   0   0 ]
/// [  0   0  -c  -d ]
/// [ -d   0   b   0 ]
/// [  c   a   0   b ]
/// ```
pub fn eh_second(domain: ScalarDomain) -> LinearPencil {
    let a = sparse(4, 4, &[(3, 1, 1)], domain);
    let b = sparse(4, 4, &[(0, 0, -1), (2, 2, 1), (3, 3, 1)], domain);
    let c = sparse(4, 4, &[(1, 2, -1), (3, 0, 1)], domain);
    let d = sparse(4, 4, &[(0, 1, -1), (1, 3, -1), (2, 0, -1)], domain);
    LinearPencil::homogeneous(4, 4, vec![a, b, c, d], domain).expect("consistent shapes")
}

/// `t_1 I_n`.
pub fn identity_spanned(n: usize, domain: ScalarDomain) -> LinearPencil {
    LinearPencil::homogeneous(n, n, vec![DenseMatrix::identity(n, domain)], domain)
        .expect("consistent shapes")
}

/// `t_1 E_{11}`, a single coefficient of rank one.
pub fn rank_one_spanned(n: usize, domain: ScalarDomain) -> LinearPencil {
    LinearPencil::homogeneous(n, n, vec![sparse(n, n, &[(0, 0, 1)], domain)], domain)
        .expect("consistent shapes")
}

/// A homogeneous pencil whose coefficients are random products `U V` of
/// inner dimension between 1 and `max(1, min(rows, cols) / 2)`, so that the
/// span is often rank-deficient. `domain` must be a prime field.
pub fn random_low_rank<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    num_vars: usize,
    domain: ScalarDomain,
    rng: &mut R,
) -> LinearPencil {
    let f = domain.field().expect("random pencils live over a prime field");
    let cap = (rows.min(cols) / 2).max(1);
    let coeffs = (0..num_vars)
        .map(|_| {
            let k = rng.random_range(1..=cap);
            let u = DenseMatrix::random(rows, k, f, rng);
            let v = DenseMatrix::random(k, cols, f, rng);
            u.mul(&v).expect("inner dimensions agree")
        })
        .collect();
    LinearPencil::homogeneous(rows, cols, coeffs, domain).expect("consistent shapes")
}

/// `count` pencils from [`random_low_rank`], pencil `i` drawn from its own
/// stream of `seed`, so any one of them can be regenerated alone.
pub fn random_batch(
    rows: usize,
    cols: usize,
    num_vars: usize,
    count: usize,
    seed: u64,
    domain: ScalarDomain,
) -> Vec<LinearPencil> {
    (0..count)
        .map(|i| {
            let mut rng = crate::rng::stream(seed, &[0x62, i as u64]);
            random_low_rank(rows, cols, num_vars, domain, &mut rng)
        })
        .collect()
}

/// A pencil with uniformly random constant and coefficients.
pub fn random_uniform<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    num_vars: usize,
    domain: ScalarDomain,
    rng: &mut R,
) -> LinearPencil {
    let f = domain.field().expect("random pencils live over a prime field");
    let x0 = DenseMatrix::random(rows, cols, f, rng);
    let coeffs = (0..num_vars)
        .map(|_| DenseMatrix::random(rows, cols, f, rng))
        .collect();
    LinearPencil::new(x0, coeffs).expect("consistent shapes")
}
