//! Sparse rank modulo a prime.
//!
//! Blow-ups of formula realizations are thousands of rows wide but carry only
//! a handful of nonzero blocks per block row. Dense elimination is cubic in the
//! full size; this routine eliminates column by column and picks, among the
//! rows that still have a nonzero in the current column, the shortest one
//! (lowest index on ties). The choice depends only on the matrix, never on
//! scheduling, so runs are reproducible.

use super::PrimeField;

/// A sparse matrix in row-list form over a prime field.
#[derive(Clone, Debug)]
pub struct SparseMatrix {
    field: PrimeField,
    cols: usize,
    rows: Vec<Vec<(u32, u64)>>,
}

impl SparseMatrix {
    pub fn new(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self {
            field,
            cols,
            rows: vec![Vec::new(); rows],
        }
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(
        field: PrimeField,
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, u64)>,
    ) -> Self {
        let mut m = Self::new(field, rows, cols);
        for (i, j, v) in triplets {
            assert!(i < rows && j < cols, "triplet ({i}, {j}) out of range");
            m.rows[i].push((j as u32, v % field.modulus()));
        }
        for row in &mut m.rows {
            row.sort_unstable_by_key(|&(c, _)| c);
            let mut merged: Vec<(u32, u64)> = Vec::with_capacity(row.len());
            for &(c, v) in row.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 = field.add(last.1, v),
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|&(_, v)| v != 0);
            *row = merged;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Rank by sparse elimination.
    pub fn rank(&self) -> usize {
        let f = self.field;
        let mut rows = self.rows.clone();
        let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); self.cols];
        for (i, row) in rows.iter().enumerate() {
            for &(c, _) in row {
                col_rows[c as usize].push(i as u32);
            }
        }
        let mut used = vec![false; rows.len()];
        let mut rank = 0;
        let mut candidates: Vec<u32> = Vec::new();
        for col in 0..self.cols {
            candidates.clear();
            // col_rows may hold stale or duplicate entries; filter them here.
            for &r in &col_rows[col] {
                if !used[r as usize] && lookup(&rows[r as usize], col as u32).is_some() {
                    candidates.push(r);
                }
            }
            candidates.sort_unstable();
            candidates.dedup();
            col_rows[col].clear();
            let Some(&pivot) = candidates.iter().min_by_key(|&&r| (rows[r as usize].len(), r)) else {
                continue;
            };
            used[pivot as usize] = true;
            rank += 1;
            let pivot_row = std::mem::take(&mut rows[pivot as usize]);
            let lead = lookup(&pivot_row, col as u32).expect("pivot present");
            let inv = f.inv(lead).expect("pivot is nonzero");
            for &r in &candidates {
                if r == pivot {
                    continue;
                }
                let row = &mut rows[r as usize];
                let factor = f.mul(lookup(row, col as u32).expect("candidate"), inv);
                let merged = axpy(&f, row, factor, &pivot_row, &mut col_rows, r);
                *row = merged;
            }
            rows[pivot as usize] = pivot_row;
        }
        rank
    }
}

fn lookup(row: &[(u32, u64)], col: u32) -> Option<u64> {
    row.binary_search_by_key(&col, |&(c, _)| c).ok().map(|k| row[k].1)
}

/// `row - factor * pivot`, recording columns that gained an entry.
fn axpy(
    f: &PrimeField,
    row: &[(u32, u64)],
    factor: u64,
    pivot: &[(u32, u64)],
    col_rows: &mut [Vec<u32>],
    row_index: u32,
) -> Vec<(u32, u64)> {
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < pivot.len() {
        let take_row = j == pivot.len() || (i < row.len() && row[i].0 < pivot[j].0);
        let take_pivot = i == row.len() || (j < pivot.len() && pivot[j].0 < row[i].0);
        if take_row {
            out.push(row[i]);
            i += 1;
        } else if take_pivot {
            let (c, v) = pivot[j];
            let nv = f.neg(f.mul(factor, v));
            if nv != 0 {
                out.push((c, nv));
                col_rows[c as usize].push(row_index);
            }
            j += 1;
        } else {
            let (c, a) = row[i];
            let v = f.sub_mul(a, factor, pivot[j].1);
            if v != 0 {
                out.push((c, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}
