//! Formula to pencil: every gate `g` gets `(u_g, L_g, v_g)` with
//! `value(g) = u_g L_g^{-1} v_g`, read blockwise at matrix points.
//!
//! Rules, with `ℓ` a variable or a constant:
//!
//! | gate    | `L`                            | `u`           | `v`         |
//! |---------|--------------------------------|---------------|-------------|
//! | `ℓ`     | `[[1, -ℓ], [0, 1]]`            | `(1, 0)`      | `(0, 1)ᵀ`   |
//! | `f + g` | `diag(L_f, L_g)`               | `(u_f, u_g)`  | `(v_f; v_g)`|
//! | `f * g` | `[[L_f, -v_f u_g], [0, L_g]]`  | `(u_f, 0)`    | `(0; v_g)`  |
//! | `f⁻¹`   | `[[L_f, v_f], [u_f, 0]]`       | `-e_last`     | `e_last`    |
//!
//! The inverse rule rests on the Schur complement: the bottom-right entry of
//! `[[L, v], [u, 0]]^{-1}` is `-(u L^{-1} v)^{-1}`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::formula::{Assignment, Formula, Gate};
use super::FormulaError;
use crate::exactmat::{DenseMatrix, PrimeField, ScalarDomain};
use crate::pencil::{LinearPencil, Support};

/// Sparse entry: `(row, col, matrix, value)`, matrix 0 being the constant
/// term and `k >= 1` the coefficient of variable `k - 1`.
pub type Entry = (usize, usize, usize, BigRational);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Realization {
    gate: usize,
    size: usize,
    num_vars: usize,
    u: Vec<(usize, BigRational)>,
    v: Vec<(usize, BigRational)>,
    entries: Vec<Entry>,
}

fn one() -> BigRational {
    BigRational::one()
}

impl Realization {
    fn atom(gate: usize, num_vars: usize, term: Option<usize>, c: BigRational) -> Self {
        let mut entries = vec![(0, 0, 0, one()), (1, 1, 0, one())];
        match term {
            Some(k) => entries.push((0, 1, k + 1, -one())),
            None if !c.is_zero() => entries.push((0, 1, 0, -c)),
            None => {}
        }
        Realization {
            gate,
            size: 2,
            num_vars,
            u: vec![(0, one())],
            v: vec![(1, one())],
            entries,
        }
    }

    fn shifted(&self, by: usize) -> impl Iterator<Item = Entry> + '_ {
        self.entries
            .iter()
            .map(move |(r, c, k, x)| (r + by, c + by, *k, x.clone()))
    }

    fn add(gate: usize, f: &Self, g: &Self) -> Self {
        let s = f.size;
        let mut entries: Vec<Entry> = f.entries.clone();
        entries.extend(g.shifted(s));
        let shift =
            |w: &[(usize, BigRational)]| w.iter().map(|(i, x)| (i + s, x.clone())).collect::<Vec<_>>();
        Realization {
            gate,
            size: s + g.size,
            num_vars: f.num_vars,
            u: f.u.iter().cloned().chain(shift(&g.u)).collect(),
            v: f.v.iter().cloned().chain(shift(&g.v)).collect(),
            entries,
        }
    }

    fn mul(gate: usize, f: &Self, g: &Self) -> Self {
        let s = f.size;
        let mut entries: Vec<Entry> = f.entries.clone();
        for (i, a) in &f.v {
            for (j, b) in &g.u {
                entries.push((*i, s + j, 0, -(a * b)));
            }
        }
        entries.extend(g.shifted(s));
        Realization {
            gate,
            size: s + g.size,
            num_vars: f.num_vars,
            u: f.u.clone(),
            v: g.v.iter().map(|(i, x)| (i + s, x.clone())).collect(),
            entries,
        }
    }

    fn inv(gate: usize, f: &Self) -> Self {
        let s = f.size;
        let mut entries: Vec<Entry> = f.entries.clone();
        entries.extend(f.v.iter().map(|(i, x)| (*i, s, 0, x.clone())));
        entries.extend(f.u.iter().map(|(j, x)| (s, *j, 0, x.clone())));
        Realization {
            gate,
            size: s + 1,
            num_vars: f.num_vars,
            u: vec![(s, -one())],
            v: vec![(s, one())],
            entries,
        }
    }

    pub fn gate(&self) -> usize {
        self.gate
    }

    /// `L` is `size x size`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn u(&self) -> &[(usize, BigRational)] {
        &self.u
    }

    pub fn v(&self) -> &[(usize, BigRational)] {
        &self.v
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// `L` as a dense pencil over `domain`.
    pub fn to_pencil(&self, domain: ScalarDomain) -> Result<LinearPencil, FormulaError> {
        let mut mats =
            vec![DenseMatrix::zeros(self.size, self.size, ScalarDomain::Rational); self.num_vars + 1];
        for (r, c, k, x) in &self.entries {
            mats[*k].set(*r, *c, x)?;
        }
        let mats = mats
            .into_iter()
            .map(|m| m.to_domain(domain))
            .collect::<Result<Vec<_>, _>>()?;
        let mut it = mats.into_iter();
        let constant = it.next().expect("constant term");
        Ok(LinearPencil::new(constant, it.collect())?)
    }

    pub(crate) fn support(&self, field: PrimeField) -> Result<Support, FormulaError> {
        let mut cells: BTreeMap<(usize, usize), Vec<(usize, u64)>> = BTreeMap::new();
        for (r, c, k, x) in &self.entries {
            let v = field.from_rational(x)?;
            if v != 0 {
                cells.entry((*r, *c)).or_default().push((*k, v));
            }
        }
        Ok(Support {
            field,
            rows: self.size,
            cols: self.size,
            entries: cells
                .into_iter()
                .map(|((r, c), mut t)| {
                    t.sort_unstable();
                    (r, c, t)
                })
                .collect(),
        })
    }

    fn vector(
        &self,
        w: &[(usize, BigRational)],
        n: usize,
        column: bool,
        domain: ScalarDomain,
    ) -> Result<DenseMatrix, FormulaError> {
        let mut e = DenseMatrix::zeros(1, self.size, ScalarDomain::Rational);
        for (i, x) in w {
            e.set(0, *i, x)?;
        }
        let e = e.to_domain(domain)?;
        let e = if column { e.transpose() } else { e };
        Ok(e.kron(&DenseMatrix::identity(n, domain))?)
    }

    /// `L` evaluated at the assignment (`n·size` square).
    pub fn evaluate_pencil(&self, f: &Formula, at: &Assignment) -> Result<DenseMatrix, FormulaError> {
        let subs = at.ordered(f)?;
        Ok(self.to_pencil(at.domain())?.evaluate(&subs, at.n())?)
    }

    /// Blockwise `u L^{-1} v`; `None` when `L` is singular at the point.
    pub fn evaluate(&self, f: &Formula, at: &Assignment) -> Result<Option<DenseMatrix>, FormulaError> {
        let l = self.evaluate_pencil(f, at)?;
        let Some(inv) = l.inverse()? else {
            return Ok(None);
        };
        let n = at.n();
        let u = self.vector(&self.u, n, false, at.domain())?;
        let v = self.vector(&self.v, n, true, at.domain())?;
        Ok(Some(u.mul(&inv)?.mul(&v)?))
    }
}

/// One realization per gate, indexed by gate id (the root is entry 0).
pub fn linearize(f: &Formula) -> Vec<Realization> {
    let m = f.vars().len();
    let mut out: Vec<Option<Realization>> = vec![None; f.len()];
    for id in (0..f.len()).rev() {
        let get = |i: usize| out[i].as_ref().expect("children have larger ids");
        let r = match f.gate(id) {
            Gate::Var(k) => Realization::atom(id, m, Some(*k), BigRational::zero()),
            Gate::Const(c) => Realization::atom(id, m, None, c.clone()),
            Gate::Add(a, b) => Realization::add(id, get(*a), get(*b)),
            Gate::Mul(a, b) => Realization::mul(id, get(*a), get(*b)),
            Gate::Inv(a) => Realization::inv(id, get(*a)),
        };
        out[id] = Some(r);
    }
    out.into_iter().map(|r| r.expect("filled")).collect()
}

#[cfg(test)]
mod tests {
    use super::super::{eval_formula, parse, EvalOutcome};
    use super::*;
    use crate::exactmat::PrimeField;
    use crate::pencil::blowup_rank_estimate;

    fn formula(s: &str) -> Formula {
        Formula::from_expr(&parse(s).unwrap())
    }

    #[test]
    fn atom_layout() {
        let f = formula("x");
        let r = &linearize(&f)[0];
        assert_eq!(r.size(), 2);
        let p = r.to_pencil(ScalarDomain::Rational).unwrap();
        assert_eq!(p.constant(), &DenseMatrix::identity(2, ScalarDomain::Rational));
        assert_eq!(
            p.coeffs()[0],
            DenseMatrix::from_i64(2, 2, &[0, -1, 0, 0], ScalarDomain::Rational).unwrap()
        );
    }

    #[test]
    fn sizes_add_up() {
        // atoms 2, add/mul sum, inverse adds one
        let f = formula("inv(x*y + 3)");
        let rs = linearize(&f);
        assert_eq!(rs[0].size(), 7);
        assert_eq!(rs.len(), f.len());
        assert!(rs.iter().enumerate().all(|(i, r)| r.gate() == i));
    }

    #[test]
    fn matches_evaluation_at_a_rational_point() {
        let f = formula("inv(x*y - y*x) + 1/2*x - inv(inv(y) + x)");
        let q = ScalarDomain::Rational;
        let at = Assignment::new(2, q)
            .with("x", DenseMatrix::from_i64(2, 2, &[1, 2, 0, 1], q).unwrap())
            .unwrap()
            .with("y", DenseMatrix::from_i64(2, 2, &[0, 1, 1, 3], q).unwrap())
            .unwrap();
        let EvalOutcome::Value(expected) = eval_formula(&f, &at).unwrap() else {
            panic!("defined at this point")
        };
        assert_eq!(linearize(&f)[0].evaluate(&f, &at).unwrap(), Some(expected));
    }

    #[test]
    fn inverse_commutator_needs_two_by_two_blocks() {
        let f = formula("inv(comm(x, y))");
        let r = &linearize(&f)[0];
        let p = r.to_pencil(ScalarDomain::default_prime()).unwrap();
        let s = r.size();
        let at = |d| blowup_rank_estimate(&p, d, 4, 7).unwrap().observed_rank;
        assert!(at(1) < s);
        assert_eq!(at(2), 2 * s);
    }

    #[test]
    fn support_matches_pencil() {
        let f = formula("x*inv(y) - 2");
        let r = &linearize(&f)[0];
        let field = PrimeField::default_field();
        let s = r.support(field).unwrap();
        let p = r
            .to_pencil(ScalarDomain::default_prime())
            .unwrap()
            .support()
            .unwrap();
        assert_eq!(s.entries, p.entries);
    }
}
