use std::collections::HashMap;

use itertools::Itertools;

/// Which ordering of the `k`-subsets of `{1..n}` a [`SubsetBasis`] uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisOrder {
    /// Lexicographic order on increasing tuples.
    Lex,
    /// Subsets avoiding `n` (lexicographic), then subsets containing `n`.
    /// Used for the domain `Λ^p`.
    SplitAvoidingFirst,
    /// Subsets containing `n`, ordered through the bijection
    /// `S ↦ S ∪ {n}` with the `(k-1)`-subsets avoiding `n`, then subsets
    /// avoiding `n`. Used for the codomain `Λ^{p+1}`.
    SplitContainingFirst,
}

/// An ordered basis `{e_S}` of `Λ^k(K^n)`, one vector per `k`-subset `S`.
///
/// Subsets are stored as strictly increasing one-based index lists.
#[derive(Clone, Debug)]
pub struct SubsetBasis {
    n: usize,
    k: usize,
    order: BasisOrder,
    subsets: Vec<Vec<usize>>,
    position: HashMap<Vec<usize>, usize>,
}

impl SubsetBasis {
    pub fn new(n: usize, k: usize, order: BasisOrder) -> Self {
        let subsets = match order {
            BasisOrder::Lex => lex(n, k),
            BasisOrder::SplitAvoidingFirst => {
                let mut out = lex(n.saturating_sub(1), k);
                out.extend(with_last(n, k));
                out
            }
            BasisOrder::SplitContainingFirst => {
                let mut out = with_last(n, k);
                out.extend(lex(n.saturating_sub(1), k));
                out
            }
        };
        let position = subsets.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Self {
            n,
            k,
            order,
            subsets,
            position,
        }
    }

    pub fn lex(n: usize, k: usize) -> Self {
        Self::new(n, k, BasisOrder::Lex)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> BasisOrder {
        self.order
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn position(&self, subset: &[usize]) -> Option<usize> {
        self.position.get(subset).copied()
    }
}

fn lex(n: usize, k: usize) -> Vec<Vec<usize>> {
    (1..=n).combinations(k).collect()
}

// Subsets containing n, listed as the images of the (k-1)-subsets of
// {1..n-1} under S ↦ S ∪ {n}.
fn with_last(n: usize, k: usize) -> Vec<Vec<usize>> {
    if n == 0 || k == 0 {
        return Vec::new();
    }
    lex(n - 1, k - 1)
        .into_iter()
        .map(|mut s| {
            s.push(n);
            s
        })
        .collect()
}
