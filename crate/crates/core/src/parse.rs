//! Expression parser for rational functions.
//!
//! Grammar: integer literals, identifiers from the declared variable list,
//! `+ - * / ^` with `^` taking a nonnegative integer literal exponent,
//! parentheses, unary minus. Precedence `^` > unary `-` > `* /` > `+ -`,
//! left-associative within a level; whitespace insignificant.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::field::{FieldId, Scalar};
use crate::poly::VarSet;
use crate::ratfunc::RationalFunction;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(mut self) -> Result<Vec<(usize, Tok)>> {
        let mut out = Vec::new();
        while self.pos < self.src.len() {
            let start = self.pos;
            let c = self.src[self.pos];
            match c {
                b' ' | b'\t' | b'\n' | b'\r' => {
                    self.pos += 1;
                }
                b'0'..=b'9' => {
                    while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                    let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    let n: BigInt = text.parse().expect("digits parse as integer");
                    out.push((start, Tok::Int(n)));
                }
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                    while self.pos < self.src.len()
                        && (self.src[self.pos].is_ascii_alphanumeric()
                            || self.src[self.pos] == b'_')
                    {
                        self.pos += 1;
                    }
                    let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    out.push((start, Tok::Ident(text.to_string())));
                }
                b'+' => {
                    self.pos += 1;
                    out.push((start, Tok::Plus));
                }
                b'-' => {
                    self.pos += 1;
                    out.push((start, Tok::Minus));
                }
                b'*' => {
                    self.pos += 1;
                    out.push((start, Tok::Star));
                }
                b'/' => {
                    self.pos += 1;
                    out.push((start, Tok::Slash));
                }
                b'^' => {
                    self.pos += 1;
                    out.push((start, Tok::Caret));
                }
                b'(' => {
                    self.pos += 1;
                    out.push((start, Tok::LParen));
                }
                b')' => {
                    self.pos += 1;
                    out.push((start, Tok::RParen));
                }
                other => {
                    return Err(Error::Syntax {
                        pos: start,
                        msg: format!("unexpected character `{}`", other as char),
                    })
                }
            }
        }
        Ok(out)
    }
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    vars: &'a VarSet,
    field: FieldId,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(_, t)| t.clone());
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<RationalFunction> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    lhs = lhs.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    lhs = lhs.sub(&self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<RationalFunction> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    lhs = lhs.mul(&self.unary()?);
                }
                Some(Tok::Slash) => {
                    self.bump();
                    lhs = lhs.checked_div(&self.unary()?)?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<RationalFunction> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<RationalFunction> {
        let mut base = self.atom()?;
        while matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let pos = self.pos();
            match self.bump() {
                Some(Tok::Int(n)) => {
                    let e: u32 = n.try_into().map_err(|_| Error::Syntax {
                        pos,
                        msg: "exponent does not fit in u32".into(),
                    })?;
                    base = base.powi(e as i64)?;
                }
                _ => {
                    return Err(Error::Syntax {
                        pos,
                        msg: "`^` requires a nonnegative integer literal exponent".into(),
                    })
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RationalFunction> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Int(n)) => Ok(RationalFunction::constant(
                Scalar::from_bigint(n, self.field),
                self.vars.clone(),
            )),
            Some(Tok::Ident(name)) => match self.vars.index_of(&name) {
                Some(idx) => Ok(RationalFunction::variable(
                    idx,
                    self.vars.clone(),
                    self.field,
                )),
                None => Err(Error::UnknownVariable(name)),
            },
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(Error::Syntax {
                        pos: self.pos(),
                        msg: "expected `)`".into(),
                    }),
                }
            }
            other => Err(Error::Syntax {
                pos,
                msg: format!("expected literal, variable or `(`, got {other:?}"),
            }),
        }
    }
}

/// Parses `text` into a canonical rational function over the declared
/// variables.
pub fn parse_expression(text: &str, vars: &VarSet, field: FieldId) -> Result<RationalFunction> {
    let toks = Lexer {
        src: text.as_bytes(),
        pos: 0,
    }
    .tokens()?;
    let mut p = Parser {
        toks,
        idx: 0,
        vars,
        field,
        end: text.len(),
    };
    let rf = p.expr()?;
    if p.idx != p.toks.len() {
        return Err(Error::Syntax {
            pos: p.pos(),
            msg: "trailing input".into(),
        });
    }
    Ok(rf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(names: &[&str]) -> VarSet {
        VarSet::new(names.to_vec()).unwrap()
    }

    #[test]
    fn simple_power() {
        let f = parse_expression("z^2", &v(&["z"]), FieldId::Rational).unwrap();
        assert_eq!(f.to_string(), "z^2");
    }

    #[test]
    fn quotient_pair() {
        let f = parse_expression("(x+y)/(x-y)", &v(&["x", "y"]), FieldId::Rational).unwrap();
        assert_eq!(f.numerator().to_string(), "x + y");
        assert_eq!(f.denominator().to_string(), "x - y");
    }

    #[test]
    fn common_denominator() {
        let f = parse_expression("1/z + z", &v(&["z"]), FieldId::Rational).unwrap();
        assert_eq!(f.to_string(), "(z^2 + 1)/(z)");
    }

    #[test]
    fn precedence() {
        let vars = v(&["x"]);
        let a = parse_expression("-x^2", &vars, FieldId::Rational).unwrap();
        let b = parse_expression("-(x^2)", &vars, FieldId::Rational).unwrap();
        assert_eq!(a, b);
        let c = parse_expression("2*x + 3*x", &vars, FieldId::Rational).unwrap();
        assert_eq!(
            c,
            parse_expression("5*x", &vars, FieldId::Rational).unwrap()
        );
        let d = parse_expression("2^3^2", &vars, FieldId::Rational).unwrap();
        assert_eq!(
            d.as_constant().unwrap(),
            Scalar::from_i64(64, FieldId::Rational)
        );
    }

    #[test]
    fn syntax_error_position() {
        let err = parse_expression("x + $", &v(&["x"]), FieldId::Rational).unwrap_err();
        match err {
            Error::Syntax { pos, .. } => assert_eq!(pos, 4),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_variable() {
        let err = parse_expression("x + q", &v(&["x"]), FieldId::Rational).unwrap_err();
        assert!(matches!(err, Error::UnknownVariable(name) if name == "q"));
    }

    #[test]
    fn symbol_exponent_rejected() {
        assert!(matches!(
            parse_expression("x^y", &v(&["x", "y"]), FieldId::Rational),
            Err(Error::Syntax { .. })
        ));
    }

    #[test]
    fn zero_literal_division() {
        assert!(matches!(
            parse_expression("1/(x - x)", &v(&["x"]), FieldId::Rational),
            Err(Error::DivisionByZeroFunction)
        ));
        // Over F_5 the literal 5 is the zero scalar.
        let f5 = FieldId::prime(5).unwrap();
        assert!(matches!(
            parse_expression("1/5", &v(&["x"]), f5),
            Err(Error::DivisionByZeroFunction)
        ));
    }

    #[test]
    fn prime_field_literals() {
        let f5 = FieldId::prime(5).unwrap();
        let f = parse_expression("7*x", &v(&["x"]), f5).unwrap();
        assert_eq!(f.to_string(), "2*x");
    }
}
