//! Closed expression grammar for constructible numbers:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | primary
//! primary := integer | '(' expr ')' | 'sqrt' '(' expr ')'
//! ```

use std::fmt;

use num_bigint::BigInt;

use super::{arith, ArithOp, Constructible, FieldError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Neg(Box<Expr>),
    Bin(ArithOp, Box<Expr>, Box<Expr>),
    Sqrt(Box<Expr>),
}

impl Expr {
    pub fn eval(&self) -> Result<Constructible, FieldError> {
        match self {
            Expr::Int(i) => Ok(Constructible::from_bigint(i.clone())),
            Expr::Neg(e) => Ok(-e.eval()?),
            Expr::Bin(op, a, b) => arith(*op, &a.eval()?, &b.eval()?),
            Expr::Sqrt(e) => e.eval()?.sqrt(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(ArithOp::Add | ArithOp::Sub, ..) => 1,
            Expr::Bin(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Int(_) | Expr::Sqrt(_) => 4,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &Expr, min: u8| {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expr::Int(i) => write!(f, "{i}"),
            Expr::Neg(e) => {
                f.write_str("-")?;
                wrap(f, e, 3)
            }
            Expr::Sqrt(e) => write!(f, "sqrt({e})"),
            Expr::Bin(op, a, b) => {
                let (p, sym) = match op {
                    ArithOp::Add => (1, '+'),
                    ArithOp::Sub => (1, '-'),
                    ArithOp::Mul => (2, '*'),
                    ArithOp::Div => (2, '/'),
                };
                wrap(f, a, p)?;
                write!(f, "{sym}")?;
                // right operand binds tighter to keep left associativity
                wrap(f, b, p + 1)
            }
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.pos,
            msg: msg.into(),
        })
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

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let op = if c == b'+' { ArithOp::Add } else { ArithOp::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let op = if c == b'*' { ArithOp::Mul } else { ArithOp::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Ok(Expr::Int(digits.parse().unwrap()))
            }
            Some(b's') if self.src[self.pos..].starts_with(b"sqrt") => {
                self.pos += 4;
                self.expect(b'(')?;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(Expr::Sqrt(Box::new(e)))
            }
            Some(_) => self.err("unexpected character"),
            None => self.err("unexpected end of input"),
        }
    }
}

pub fn parse_expr(s: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: s.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_associativity() {
        let e = parse_expr("1-2-3").unwrap();
        assert_eq!(e.eval().unwrap(), Constructible::from_int(-4));
        let e = parse_expr("12/2/3").unwrap();
        assert_eq!(e.eval().unwrap(), Constructible::from_int(2));
        let e = parse_expr("2+3*4").unwrap();
        assert_eq!(e.eval().unwrap(), Constructible::from_int(14));
        let e = parse_expr("-(2*sqrt(3))/5").unwrap();
        assert_eq!(e.to_string(), "-(2*sqrt(3))/5");
    }

    #[test]
    fn display_reparses_to_same_tree() {
        for s in ["(2*sqrt(3))/5", "1+sqrt(2)", "1-(2-3)", "sqrt(1/2)", "2/(3*4)", "-1/2*sqrt(2)"] {
            let e = parse_expr(s).unwrap();
            assert_eq!(parse_expr(&e.to_string()).unwrap(), e, "{s}");
        }
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse_expr("1+").unwrap_err().pos, 2);
        assert_eq!(parse_expr("sqrt 2").unwrap_err().msg, "expected '('");
        assert!(parse_expr("1 2").is_err());
        assert!(parse_expr("x").is_err());
        assert!(parse_expr("(1").is_err());
    }
}
