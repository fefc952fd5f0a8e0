//! Text form of Laurent polynomials: `3*x1^2*x2^-1 - x3 + 7`, or a
//! parenthesized sum over a monomial such as `(x2 + 1)/x1`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use super::{LaurentPoly, Monomial, VarSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    vars: &'a Arc<VarSet>,
}

impl<'a> Parser<'a> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        let before = &self.src[..self.pos];
        let line = before.matches('\n').count() + 1;
        let column = before.rfind('\n').map_or(self.pos, |nl| self.pos - nl - 1) + 1;
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if f(c) {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        &self.src[start..self.pos]
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let digits = self.take_while(|c| c.is_ascii_digit());
        if digits.is_empty() {
            return Err(self.error("expected an integer"));
        }
        Ok(digits.parse().expect("ascii digits"))
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let paren = self.eat('(');
        let negative = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        self.skip_ws();
        let digits = self.take_while(|c| c.is_ascii_digit());
        let value: i32 = digits
            .parse()
            .map_err(|_| self.error("expected an exponent"))?;
        if paren && !self.eat(')') {
            return Err(self.error("expected `)`"));
        }
        Ok(if negative { -value } else { value })
    }

    /// factor ('*' factor)*
    fn term(&mut self) -> Result<(Monomial, BigInt), ParseError> {
        let mut exps = vec![0i32; self.vars.len()];
        let mut coeff = BigInt::one();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(c) if c.is_ascii_digit() => coeff *= self.integer()?,
                Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                    let start = self.pos;
                    let name = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
                    let Some(i) = self.vars.index_of(name) else {
                        self.pos = start;
                        return Err(self.error(format!("unknown variable `{name}`")));
                    };
                    let e = if self.eat('^') { self.exponent()? } else { 1 };
                    exps[i] += e;
                }
                Some(c) => return Err(self.error(format!("unexpected `{c}`"))),
                None => return Err(self.error("unexpected end of input")),
            }
            if !self.eat('*') {
                break;
            }
        }
        Ok((Monomial::new(exps), coeff))
    }

    /// sum | '(' sum ')' ('/' denominator)?
    fn poly(&mut self) -> Result<LaurentPoly, ParseError> {
        let grouped = self.eat('(');
        let mut value = if grouped {
            let inner = self.sum()?;
            if !self.eat(')') {
                return Err(self.error("expected `)`"));
            }
            inner
        } else {
            self.sum()?
        };
        if self.eat('/') {
            let bracketed = self.eat('(');
            let (m, c) = self.term()?;
            if bracketed && !self.eat(')') {
                return Err(self.error("expected `)`"));
            }
            if !c.is_one() {
                return Err(self.error("denominator must be a monomial with coefficient 1"));
            }
            if !grouped && value.len() > 1 {
                return Err(self.error("parenthesize a numerator with several terms"));
            }
            value = value.mul_monomial(&Monomial::one(self.vars.len()).div(&m));
        }
        self.skip_ws();
        if self.pos != self.src.len() {
            return Err(self.error("trailing input"));
        }
        Ok(value)
    }

    fn sum(&mut self) -> Result<LaurentPoly, ParseError> {
        let mut terms = Vec::new();
        let mut negative = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        loop {
            let (m, c) = self.term()?;
            terms.push((m, if negative { -c } else { c }));
            if self.eat('+') {
                negative = false;
            } else if self.eat('-') {
                negative = true;
            } else {
                break;
            }
        }
        Ok(LaurentPoly::from_terms(self.vars, terms))
    }
}

pub(crate) fn parse(text: &str, vars: &Arc<VarSet>) -> Result<LaurentPoly, ParseError> {
    Parser {
        src: text,
        pos: 0,
        vars,
    }
    .poly()
}
