//! Rank kernels. Pivots are always the first nonzero entry of the current
//! column, scanning rows top to bottom, so elimination traces are
//! reproducible.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use super::{DenseMatrix, PrimeField};

const PARALLEL_ROWS: usize = 192;

/// Row-echelon elimination mod p; consumes its buffer.
pub(crate) fn rank_mod_p(f: &PrimeField, mut a: Vec<u64>, rows: usize, cols: usize) -> usize {
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| a[r * cols + col] != 0) else {
            continue;
        };
        if pivot != rank {
            for j in col..cols {
                a.swap(pivot * cols + j, rank * cols + j);
            }
        }
        let (head, tail) = a.split_at_mut((rank + 1) * cols);
        let pivot_row = &head[rank * cols + col..(rank + 1) * cols];
        let inv = f.inv(pivot_row[0]).expect("pivot is nonzero");
        let eliminate = |row: &mut [u64]| {
            let lead = row[col];
            if lead == 0 {
                return;
            }
            let factor = f.mul(lead, inv);
            for (x, &y) in row[col..].iter_mut().zip(pivot_row) {
                if y != 0 {
                    *x = f.sub_mul(*x, factor, y);
                }
            }
        };
        if rows - rank > PARALLEL_ROWS {
            tail.par_chunks_mut(cols).for_each(eliminate);
        } else {
            tail.chunks_mut(cols).for_each(eliminate);
        }
        rank += 1;
    }
    rank
}

/// Fraction-free (Bareiss) elimination over the integers after clearing
/// denominators row by row.
pub(crate) fn bareiss_rank(values: &[BigRational], rows: usize, cols: usize) -> usize {
    let a = DenseMatrix::integer_rows(values, rows, cols);
    bareiss_rank_int(a, rows, cols)
}

pub(crate) fn bareiss_rank_int(mut a: Vec<BigInt>, rows: usize, cols: usize) -> usize {
    let mut rank = 0;
    let mut prev = BigInt::from(1);
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| !a[r * cols + col].is_zero()) else {
            continue;
        };
        if pivot != rank {
            for j in col..cols {
                a.swap(pivot * cols + j, rank * cols + j);
            }
        }
        let (head, tail) = a.split_at_mut((rank + 1) * cols);
        let pivot_row = &head[rank * cols..(rank + 1) * cols];
        let p = &pivot_row[col];
        let update = |row: &mut [BigInt]| {
            let lead = row[col].clone();
            for j in col + 1..cols {
                // Exact by Sylvester's identity.
                let v = (p * &row[j] - &lead * &pivot_row[j]) / &prev;
                row[j] = v;
            }
            row[col] = BigInt::zero();
        };
        if rows - rank > 32 {
            tail.par_chunks_mut(cols).for_each(update);
        } else {
            tail.chunks_mut(cols).for_each(update);
        }
        prev = p.clone();
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::ScalarDomain;

    #[test]
    fn bareiss_handles_skipped_columns() {
        // Second column is dependent, so the elimination skips it and must
        // keep dividing by the last real pivot.
        let m = DenseMatrix::from_i64(
            3,
            4,
            &[2, 4, 1, 3, 1, 2, 5, 7, 3, 6, 6, 10],
            ScalarDomain::Rational,
        )
        .unwrap();
        assert_eq!(m.rank(), 2);
        let p = m.to_domain(ScalarDomain::default_prime()).unwrap();
        assert_eq!(p.rank(), 2);
    }

    #[test]
    fn wide_and_tall() {
        let m = DenseMatrix::from_i64(2, 3, &[1, 2, 3, 2, 4, 7], ScalarDomain::Rational).unwrap();
        assert_eq!(m.rank(), 2);
        assert_eq!(m.transpose().rank(), 2);
    }
}
