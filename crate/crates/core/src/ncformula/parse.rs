//! Recursive-descent parser.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary ('*' unary)*
//! unary := '-' number | '-' unary | atom
//! atom  := number | ident | 'inv' '(' expr ')' | 'comm' '(' expr ',' expr ')' | '(' expr ')'
//! number := digits ['.' digits] ['/' digits]
//! ```
//!
//! A minus sign directly in front of a numeric literal is folded into the
//! literal, so `-3` is `Const(-3)` while `-(3)` is `Neg(Const(3))`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use super::ast::Expr;
use crate::exactmat::parse_rational;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct SyntaxError {
    /// Byte offset into the input.
    pub position: usize,
    pub message: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at offset {}: {}", self.position, self.message)
    }
}

pub fn parse(input: &str) -> Result<Expr, SyntaxError> {
    let mut p = Parser {
        src: input.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(format!("unexpected {:?}", p.src[p.pos] as char)));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> SyntaxError {
        SyntaxError {
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), SyntaxError> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => Err(self.error(format!("expected {:?}, found {:?}", c as char, x as char))),
            None => Err(self.error(format!("expected {:?}, found end of input", c as char))),
        }
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Expr::add(lhs, self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Expr::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            lhs = Expr::mul(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        if self.peek() != Some(b'-') {
            return self.atom();
        }
        self.pos += 1;
        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            let Expr::Const(c) = self.number()? else {
                unreachable!()
            };
            return Ok(Expr::Const(-c));
        }
        Ok(Expr::neg(self.unary()?))
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                let name = self.ident();
                match name.as_str() {
                    "inv" => {
                        self.expect(b'(')?;
                        let e = self.expr()?;
                        self.expect(b')')?;
                        Ok(Expr::inv(e))
                    }
                    "comm" => {
                        self.expect(b'(')?;
                        let a = self.expr()?;
                        self.expect(b',')?;
                        let b = self.expr()?;
                        self.expect(b')')?;
                        Ok(Expr::comm(a, b))
                    }
                    _ if self.peek() == Some(b'(') => Err(SyntaxError {
                        position: start,
                        message: format!("unknown function {name:?}"),
                    }),
                    _ => Ok(Expr::Var(name)),
                }
            }
            Some(c) => Err(self.error(format!("unexpected {:?}", c as char))),
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn digits(&mut self) -> &str {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits")
    }

    fn number(&mut self) -> Result<Expr, SyntaxError> {
        self.skip_ws();
        let start = self.pos;
        self.digits();
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            if self.digits().is_empty() {
                return Err(self.error("expected digits after '.'"));
            }
        }
        let mut value =
            parse_rational(std::str::from_utf8(&self.src[start..self.pos]).unwrap()).map_err(|e| {
                SyntaxError {
                    position: start,
                    message: e.to_string(),
                }
            })?;
        // `a/b` is only a literal when both sides are plain digits.
        if self.src.get(self.pos) == Some(&b'/') {
            self.pos += 1;
            let at = self.pos;
            let den = self.digits();
            if den.is_empty() {
                return Err(self.error("expected a denominator after '/'"));
            }
            let den: BigInt = den.parse().unwrap();
            if den.is_zero() {
                return Err(SyntaxError {
                    position: at,
                    message: "zero denominator".into(),
                });
            }
            value /= BigRational::from_integer(den);
        }
        if self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
        {
            return Err(self.error("identifiers cannot start with a digit"));
        }
        Ok(Expr::Const(value))
    }
}
