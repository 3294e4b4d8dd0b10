//! JSON file formats for pencils and 3-tensors.
//!
//! Both formats list nonzero entries only, with zero-based indices and values
//! as decimal strings (`"3"`, `"-7/4"`). Writers emit entries in row-major
//! order, so reading a file and writing it back reproduces the same bytes.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::brank::Tensor3;
use crate::exactmat::{parse_rational, DenseMatrix, MatrixError, Scalar, ScalarDomain};
use crate::ncformula::Realization;
use crate::pencil::{LinearPencil, PencilError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{what} index {index:?} is out of range for shape {shape:?}")]
    OutOfRange {
        what: &'static str,
        index: Vec<usize>,
        shape: Vec<usize>,
    },
    #[error("{what} entry {index:?} is listed twice")]
    Duplicate { what: &'static str, index: Vec<usize> },
    #[error("num_vars is {num_vars} but {got} coefficient lists were given")]
    CoeffCount { num_vars: usize, got: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Pencil(#[from] PencilError),
    #[error("{0}")]
    Tensor(String),
}

pub type Triplet = (usize, usize, String);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PencilFile {
    pub rows: usize,
    pub cols: usize,
    pub num_vars: usize,
    /// Absent for pencils over the rationals.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u64>,
    pub constant: Vec<Triplet>,
    pub coeffs: Vec<Vec<Triplet>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorFile {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub entries: Vec<(usize, usize, usize, String)>,
}

fn scalar_text(s: &Scalar) -> String {
    s.to_string()
}

fn triplets(m: &DenseMatrix) -> Vec<Triplet> {
    m.nonzeros()
        .iter()
        .map(|(i, j, v)| (*i, *j, scalar_text(v)))
        .collect()
}

impl PencilFile {
    pub fn from_pencil(a: &LinearPencil) -> Self {
        PencilFile {
            rows: a.rows(),
            cols: a.cols(),
            num_vars: a.num_vars(),
            modulus: a.domain().modulus(),
            constant: triplets(a.constant()),
            coeffs: a.coeffs().iter().map(triplets).collect(),
        }
    }

    /// The pencil `L` of a gate realization, written straight from its sparse
    /// entries.
    pub fn from_realization(r: &Realization, domain: ScalarDomain) -> Result<Self, IoError> {
        let field = domain.field();
        let mut mats: Vec<BTreeMap<(usize, usize), BigRational>> = vec![BTreeMap::new(); r.num_vars() + 1];
        for (i, j, k, x) in r.entries() {
            *mats[*k].entry((*i, *j)).or_insert_with(BigRational::zero) += x;
        }
        let render = |m: &BTreeMap<(usize, usize), BigRational>| -> Result<Vec<Triplet>, IoError> {
            let mut out = Vec::new();
            for ((i, j), x) in m {
                let s = match field {
                    Some(f) => Scalar::Residue(f.from_rational(x)?),
                    None => Scalar::Rational(x.clone()),
                };
                if !s.is_zero() {
                    out.push((*i, *j, scalar_text(&s)));
                }
            }
            Ok(out)
        };
        let mut lists = mats.iter().map(render).collect::<Result<Vec<_>, _>>()?;
        let constant = lists.remove(0);
        Ok(PencilFile {
            rows: r.size(),
            cols: r.size(),
            num_vars: r.num_vars(),
            modulus: domain.modulus(),
            constant,
            coeffs: lists,
        })
    }

    pub fn domain(&self) -> Result<ScalarDomain, IoError> {
        Ok(match self.modulus {
            Some(p) => ScalarDomain::prime(p)?,
            None => ScalarDomain::Rational,
        })
    }

    fn matrix(&self, entries: &[Triplet], domain: ScalarDomain) -> Result<DenseMatrix, IoError> {
        let mut m = DenseMatrix::zeros(self.rows, self.cols, domain);
        let mut seen = std::collections::HashSet::new();
        for (i, j, v) in entries {
            if *i >= self.rows || *j >= self.cols {
                return Err(IoError::OutOfRange {
                    what: "pencil",
                    index: vec![*i, *j],
                    shape: vec![self.rows, self.cols],
                });
            }
            if !seen.insert((*i, *j)) {
                return Err(IoError::Duplicate {
                    what: "pencil",
                    index: vec![*i, *j],
                });
            }
            m.set(*i, *j, &parse_rational(v)?)?;
        }
        Ok(m)
    }

    pub fn to_pencil(&self) -> Result<LinearPencil, IoError> {
        if self.coeffs.len() != self.num_vars {
            return Err(IoError::CoeffCount {
                num_vars: self.num_vars,
                got: self.coeffs.len(),
            });
        }
        let domain = self.domain()?;
        let constant = self.matrix(&self.constant, domain)?;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| self.matrix(c, domain))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LinearPencil::new(constant, coeffs)?)
    }
}

impl TensorFile {
    pub fn from_tensor(t: &Tensor3) -> Self {
        let (a, b, c) = t.dims();
        let entries = t
            .slices()
            .iter()
            .enumerate()
            .flat_map(|(i, s)| {
                s.nonzeros()
                    .into_iter()
                    .map(move |(j, k, v)| (i, j, k, scalar_text(&v)))
            })
            .collect();
        TensorFile { a, b, c, entries }
    }

    /// Reads the tensor over the rationals.
    pub fn to_tensor(&self) -> Result<Tensor3, IoError> {
        if self.a == 0 {
            return Err(IoError::Tensor("tensor must have a >= 1".into()));
        }
        let mut slices = vec![DenseMatrix::zeros(self.b, self.c, ScalarDomain::Rational); self.a];
        let mut seen = std::collections::HashSet::new();
        for (i, j, k, v) in &self.entries {
            if *i >= self.a || *j >= self.b || *k >= self.c {
                return Err(IoError::OutOfRange {
                    what: "tensor",
                    index: vec![*i, *j, *k],
                    shape: vec![self.a, self.b, self.c],
                });
            }
            if !seen.insert((*i, *j, *k)) {
                return Err(IoError::Duplicate {
                    what: "tensor",
                    index: vec![*i, *j, *k],
                });
            }
            slices[*i].set(*j, *k, &parse_rational(v)?)?;
        }
        Tensor3::from_slices(slices).map_err(|e| IoError::Tensor(e.to_string()))
    }
}

/// Compact JSON followed by a newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn read_pencil(text: &str) -> Result<LinearPencil, IoError> {
    serde_json::from_str::<PencilFile>(text)?.to_pencil()
}

pub fn write_pencil(a: &LinearPencil) -> String {
    to_json(&PencilFile::from_pencil(a))
}

pub fn read_tensor(text: &str) -> Result<Tensor3, IoError> {
    serde_json::from_str::<TensorFile>(text)?.to_tensor()
}

pub fn write_tensor(t: &Tensor3) -> String {
    to_json(&TensorFile::from_tensor(t))
}
