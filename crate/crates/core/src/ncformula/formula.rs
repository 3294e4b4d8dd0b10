//! The core form: `Sub` and `Neg` rewritten, nodes stored in pre-order.
//!
//! Gate ids are pre-order indices, so the root is gate 0 and the children of
//! a gate always have larger ids.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::One;

use super::ast::Expr;
use super::FormulaError;
use crate::exactmat::{DenseMatrix, Scalar, ScalarDomain};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gate {
    /// Index into [`Formula::vars`].
    Var(usize),
    Const(BigRational),
    Add(usize, usize),
    Mul(usize, usize),
    Inv(usize),
}

impl Gate {
    pub fn kind(&self) -> &'static str {
        match self {
            Gate::Var(_) => "var",
            Gate::Const(_) => "const",
            Gate::Add(..) => "add",
            Gate::Mul(..) => "mul",
            Gate::Inv(_) => "inv",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula {
    gates: Vec<Gate>,
    vars: Vec<String>,
}

impl Formula {
    /// `a - b` becomes `a + (-1)*b` and `-a` becomes `(-1)*a`.
    pub fn from_expr(e: &Expr) -> Self {
        let vars = e.variables();
        let mut f = Formula {
            gates: Vec::new(),
            vars,
        };
        f.push(e);
        f
    }

    fn push(&mut self, e: &Expr) -> usize {
        let id = self.gates.len();
        self.gates.push(Gate::Const(BigRational::one()));
        let minus_one = || Expr::Const(-BigRational::one());
        let gate = match e {
            Expr::Var(v) => Gate::Var(self.vars.iter().position(|x| x == v).expect("collected")),
            Expr::Const(c) => Gate::Const(c.clone()),
            Expr::Add(a, b) => {
                let l = self.push(a);
                Gate::Add(l, self.push(b))
            }
            Expr::Sub(a, b) => {
                let l = self.push(a);
                Gate::Add(l, self.push(&Expr::mul(minus_one(), (**b).clone())))
            }
            Expr::Mul(a, b) => {
                let l = self.push(a);
                Gate::Mul(l, self.push(b))
            }
            Expr::Neg(a) => {
                let l = self.push(&minus_one());
                Gate::Mul(l, self.push(a))
            }
            Expr::Inv(a) => Gate::Inv(self.push(a)),
        };
        self.gates[id] = gate;
        id
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, id: usize) -> &Gate {
        &self.gates[id]
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Ids of the gates in the subformula rooted at `id` (a contiguous range).
    pub fn subtree(&self, id: usize) -> std::ops::Range<usize> {
        let mut end = id + 1;
        let mut stack = vec![id];
        while let Some(g) = stack.pop() {
            end = end.max(g + 1);
            match self.gates[g] {
                Gate::Add(a, b) | Gate::Mul(a, b) => stack.extend([a, b]),
                Gate::Inv(a) => stack.push(a),
                _ => {}
            }
        }
        id..end
    }
}

/// Square matrices of a common size substituted for the variables.
#[derive(Clone, Debug)]
pub struct Assignment {
    n: usize,
    domain: ScalarDomain,
    values: BTreeMap<String, DenseMatrix>,
}

impl Assignment {
    pub fn new(n: usize, domain: ScalarDomain) -> Self {
        Assignment {
            n,
            domain,
            values: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: &str, value: DenseMatrix) -> Result<Self, FormulaError> {
        self.set(name, value)?;
        Ok(self)
    }

    pub fn set(&mut self, name: &str, value: DenseMatrix) -> Result<(), FormulaError> {
        if value.dims() != (self.n, self.n) {
            return Err(FormulaError::AssignmentShape {
                name: name.to_string(),
                expected: self.n,
                got: value.dims(),
            });
        }
        let value = value.to_domain(self.domain)?;
        self.values.insert(name.to_string(), value);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn domain(&self) -> ScalarDomain {
        self.domain
    }

    pub fn get(&self, name: &str) -> Option<&DenseMatrix> {
        self.values.get(name)
    }

    /// Values in the variable order of `f`.
    pub(crate) fn ordered(&self, f: &Formula) -> Result<Vec<DenseMatrix>, FormulaError> {
        f.vars()
            .iter()
            .map(|v| {
                self.values
                    .get(v)
                    .cloned()
                    .ok_or_else(|| FormulaError::Unbound(v.clone()))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalOutcome {
    Value(DenseMatrix),
    /// The first inverse gate, in left-to-right depth-first order, whose
    /// argument is singular.
    Undefined(usize),
}

impl EvalOutcome {
    pub fn value(&self) -> Option<&DenseMatrix> {
        match self {
            EvalOutcome::Value(m) => Some(m),
            EvalOutcome::Undefined(_) => None,
        }
    }
}

fn constant(c: &BigRational, n: usize, domain: ScalarDomain) -> Result<DenseMatrix, FormulaError> {
    let scalar = match domain.field() {
        Some(f) => Scalar::Residue(f.from_rational(c)?),
        None => Scalar::Rational(c.clone()),
    };
    Ok(DenseMatrix::identity(n, domain).scale(&scalar)?)
}

/// Evaluates `e` at the assignment.
pub fn eval(e: &Expr, at: &Assignment) -> Result<EvalOutcome, FormulaError> {
    eval_formula(&Formula::from_expr(e), at)
}

pub fn eval_formula(f: &Formula, at: &Assignment) -> Result<EvalOutcome, FormulaError> {
    let vals = at.ordered(f)?;
    let mut first = None;
    let out = eval_rec(f, 0, &vals, at, &mut first, &mut None)?;
    Ok(match out {
        Some(m) => EvalOutcome::Value(m),
        None => EvalOutcome::Undefined(first.expect("undefined value names a gate")),
    })
}

/// The value of every gate; `None` where the gate or one of its descendants
/// is undefined.
pub fn eval_gates(f: &Formula, at: &Assignment) -> Result<Vec<Option<DenseMatrix>>, FormulaError> {
    let vals = at.ordered(f)?;
    let mut all = Some(vec![None; f.len()]);
    eval_rec(f, 0, &vals, at, &mut None, &mut all)?;
    Ok(all.unwrap())
}

type Slot = Option<DenseMatrix>;

fn eval_rec(
    f: &Formula,
    id: usize,
    vals: &[DenseMatrix],
    at: &Assignment,
    first: &mut Option<usize>,
    all: &mut Option<Vec<Slot>>,
) -> Result<Slot, FormulaError> {
    // Without `all`, evaluation stops at the first failure.
    let stop_early = all.is_none();
    let out = match &f.gates[id] {
        Gate::Var(i) => Some(vals[*i].clone()),
        Gate::Const(c) => Some(constant(c, at.n, at.domain)?),
        Gate::Add(a, b) | Gate::Mul(a, b) => {
            let l = eval_rec(f, *a, vals, at, first, all)?;
            if l.is_none() && stop_early {
                return Ok(None);
            }
            let r = eval_rec(f, *b, vals, at, first, all)?;
            match (l, r, &f.gates[id]) {
                (Some(l), Some(r), Gate::Add(..)) => Some(l.add(&r)?),
                (Some(l), Some(r), _) => Some(l.mul(&r)?),
                _ => None,
            }
        }
        Gate::Inv(a) => match eval_rec(f, *a, vals, at, first, all)? {
            Some(m) => {
                let inv = m.inverse()?;
                if inv.is_none() && first.is_none() {
                    *first = Some(id);
                }
                inv
            }
            None => None,
        },
    };
    if let Some(all) = all {
        all[id] = out.clone();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn q() -> ScalarDomain {
        ScalarDomain::Rational
    }

    fn m(rows: &[i64]) -> DenseMatrix {
        DenseMatrix::from_i64(2, 2, rows, q()).unwrap()
    }

    #[test]
    fn preorder_ids_and_desugaring() {
        let f = Formula::from_expr(&parse("x - inv(y)").unwrap());
        // Add(x, Mul(-1, Inv(y)))
        assert_eq!(f.vars(), ["x", "y"]);
        assert_eq!(f.gate(0), &Gate::Add(1, 2));
        assert_eq!(f.gate(1), &Gate::Var(0));
        assert_eq!(f.gate(2), &Gate::Mul(3, 4));
        assert_eq!(f.gate(3), &Gate::Const(-BigRational::one()));
        assert_eq!(f.gate(4), &Gate::Inv(5));
        assert_eq!(f.subtree(2), 2..6);
        assert_eq!(f.subtree(0), 0..6);
    }

    #[test]
    fn evaluates_matrices() {
        let at = Assignment::new(2, q())
            .with("x", m(&[1, 1, 0, 1]))
            .unwrap()
            .with("y", m(&[0, 1, 1, 0]))
            .unwrap();
        let v = eval(&parse("comm(x, y)").unwrap(), &at).unwrap();
        // xy - yx for the shear and the swap
        assert_eq!(v, EvalOutcome::Value(m(&[1, 0, 0, -1])));
        let v = eval(&parse("x*inv(x) - 1").unwrap(), &at).unwrap();
        assert!(v.value().unwrap().is_zero());
    }

    #[test]
    fn reports_the_first_failing_inverse() {
        let at = Assignment::new(2, q())
            .with("x", m(&[1, 0, 0, 0]))
            .unwrap()
            .with("y", m(&[0, 0, 0, 0]))
            .unwrap();
        // Gates: 0 Add, 1 Inv(2), 2 x, 3 Inv(4), 4 y
        let e = parse("inv(x) + inv(y)").unwrap();
        assert_eq!(eval(&e, &at).unwrap(), EvalOutcome::Undefined(1));
        // Gates: 0 Inv, 1 Add, 2 Inv(3), 3 y, 4 x; the inner inverse fails first.
        let e = parse("inv(inv(y) + x)").unwrap();
        assert_eq!(eval(&e, &at).unwrap(), EvalOutcome::Undefined(2));
        let all = eval_gates(&Formula::from_expr(&parse("inv(x) + y").unwrap()), &at).unwrap();
        assert!(all[0].is_none() && all[1].is_none() && all[2].is_some() && all[3].is_some());
    }

    #[test]
    fn unbound_and_misshapen() {
        let at = Assignment::new(2, q());
        assert!(matches!(
            eval(&parse("x").unwrap(), &at),
            Err(FormulaError::Unbound(_))
        ));
        assert!(Assignment::new(3, q()).with("x", m(&[1, 0, 0, 1])).is_err());
        let c = eval(&parse("3/2").unwrap(), &at).unwrap();
        assert_eq!(
            c.value().unwrap().get(1, 1),
            Scalar::Rational(BigRational::new(3.into(), 2.into()))
        );
    }
}
