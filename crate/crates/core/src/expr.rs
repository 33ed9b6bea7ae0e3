//! A small language for Fock states.
//!
//! ```text
//! expr := ['+'|'-'] term (('+'|'-') term)*
//! term := [scalar '*'] atom* 'vac'
//! atom := ('h(' '-' int ')' | 'h[' '-' int ']') ['^' int]
//! ```
//!
//! Atoms act as operators, the rightmost first: `h[-2] h(-1) vac` is
//! `h[-2](h(-1) 1)`. Whitespace is insignificant.

use std::fmt;

use crate::brackets::apply_h_bracket;
use crate::error::{Error, Result};
use crate::fock::FockState;
use crate::modes::apply_h;
use crate::scalar::Scalar;

pub const DEFAULT_DEGREE_CAP: u32 = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Atom {
    pub bracket: bool,
    pub n: u32,
    pub power: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: Scalar,
    pub atoms: Vec<Atom>,
}

impl Term {
    pub fn degree(&self) -> u64 {
        self.atoms.iter().map(|a| a.n as u64 * a.power as u64).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateExpr {
    pub terms: Vec<Term>,
}

impl StateExpr {
    pub fn evaluate(&self) -> FockState {
        let mut out = FockState::zero();
        for t in &self.terms {
            let mut s = FockState::vacuum();
            for a in t.atoms.iter().rev() {
                for _ in 0..a.power {
                    s = if a.bracket {
                        apply_h_bracket(-(a.n as i64), &s)
                    } else {
                        apply_h(-(a.n as i64), &s)
                    };
                }
            }
            out.add_scaled(&s, &t.coeff);
        }
        out
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (l, r) = if self.bracket { ('[', ']') } else { ('(', ')') };
        write!(f, "h{l}-{}{r}", self.n)?;
        if self.power != 1 {
            write!(f, "^{}", self.power)?;
        }
        Ok(())
    }
}

fn write_terms(f: &mut fmt::Formatter<'_>, terms: &[(Scalar, String)]) -> fmt::Result {
    if terms.is_empty() {
        return write!(f, "0 * vac");
    }
    for (i, (c, body)) in terms.iter().enumerate() {
        let mag = c.abs();
        match (i, c.is_negative()) {
            (0, true) => write!(f, "-")?,
            (0, false) => {}
            (_, true) => write!(f, " - ")?,
            (_, false) => write!(f, " + ")?,
        }
        if !mag.is_one() {
            if mag.is_integer() {
                write!(f, "{} * ", mag.numer())?;
            } else {
                write!(f, "{mag} * ")?;
            }
        }
        write!(f, "{body}")?;
    }
    Ok(())
}

impl fmt::Display for StateExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(Scalar, String)> = self
            .terms
            .iter()
            .map(|t| {
                let mut body: Vec<String> = t.atoms.iter().map(Atom::to_string).collect();
                body.push("vac".into());
                (t.coeff.clone(), body.join(" "))
            })
            .collect();
        write_terms(f, &terms)
    }
}

/// Canonical text of a state: terms in basis order, round-bracket monomials.
pub fn print_state(s: &FockState) -> String {
    struct Canon<'a>(&'a FockState);
    impl fmt::Display for Canon<'_> {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let terms: Vec<(Scalar, String)> = self
                .0
                .terms()
                .map(|(p, c)| {
                    let mut body: Vec<String> = p
                        .multiplicities()
                        .into_iter()
                        .map(|(n, k)| {
                            Atom {
                                bracket: false,
                                n,
                                power: k,
                            }
                            .to_string()
                        })
                        .collect();
                    body.push("vac".into());
                    (c.clone(), body.join(" "))
                })
                .collect();
            write_terms(f, &terms)
        }
    }
    Canon(s).to_string()
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn digits(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.text[start..self.pos]).expect("ascii"))
    }

    fn int(&mut self) -> Result<u32> {
        let at = self.pos;
        match self.digits() {
            Some(d) => d.parse().or_else(|_| {
                self.pos = at;
                self.err("integer out of range")
            }),
            None => self.err("expected an integer"),
        }
    }

    fn keyword(&mut self, word: &str) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(word.as_bytes()) {
            self.pos += word.len();
            true
        } else {
            false
        }
    }

    fn scalar(&mut self) -> Result<Option<Scalar>> {
        self.skip_ws();
        let start = self.pos;
        let Some(num) = self.digits() else {
            return Ok(None);
        };
        let mut text = num.to_string();
        if self.eat(b'/') {
            let Some(den) = self.digits() else {
                return self.err("expected a denominator");
            };
            text = format!("{text}/{den}");
        }
        let value: Scalar = text.parse().map_err(|_| Error::Parse {
            position: start,
            message: format!("invalid scalar '{text}'"),
        })?;
        self.expect(b'*')?;
        Ok(Some(value))
    }

    fn atom(&mut self) -> Result<Option<Atom>> {
        self.skip_ws();
        if self.peek() != Some(b'h') {
            return Ok(None);
        }
        self.pos += 1;
        let bracket = match self.peek() {
            Some(b'(') => false,
            Some(b'[') => true,
            _ => return self.err("expected '(' or '[' after 'h'"),
        };
        self.pos += 1;
        if !self.eat(b'-') {
            return self.err("mode index must be negative (write h(-n) with n >= 1)");
        }
        let at = self.pos;
        let n = self.int()?;
        if n == 0 {
            self.pos = at;
            return self.err("mode index must satisfy n >= 1");
        }
        self.expect(if bracket { b']' } else { b')' })?;
        let power = if self.eat(b'^') { self.int()? } else { 1 };
        Ok(Some(Atom { bracket, n, power }))
    }

    fn term(&mut self, sign: i64, cap: u32) -> Result<Term> {
        self.skip_ws();
        let start = self.pos;
        let coeff = self.scalar()?.unwrap_or_else(Scalar::one) * Scalar::from(sign);
        let mut atoms = Vec::new();
        while let Some(a) = self.atom()? {
            atoms.push(a);
        }
        if !self.keyword("vac") {
            return self.err("expected 'vac'");
        }
        let term = Term { coeff, atoms };
        let degree = term.degree();
        if degree > cap as u64 {
            return Err(Error::Parse {
                position: start,
                message: Error::DegreeCap {
                    degree: degree.min(u32::MAX as u64) as u32,
                    cap,
                }
                .to_string(),
            });
        }
        Ok(term)
    }

    fn expr(&mut self, cap: u32) -> Result<StateExpr> {
        let mut sign = if self.eat(b'-') {
            -1
        } else {
            self.eat(b'+');
            1
        };
        let mut terms = Vec::new();
        loop {
            terms.push(self.term(sign, cap)?);
            sign = match self.peek() {
                None => break,
                Some(b'+') => 1,
                Some(b'-') => -1,
                Some(_) => return self.err("expected '+', '-' or end of input"),
            };
            self.pos += 1;
        }
        Ok(StateExpr { terms })
    }
}

pub fn parse_expr(text: &str, degree_cap: u32) -> Result<StateExpr> {
    let mut p = Parser {
        text: text.as_bytes(),
        pos: 0,
    };
    p.expr(degree_cap)
}

/// Parses and evaluates a state expression.
pub fn parse_state(text: &str, degree_cap: u32) -> Result<FockState> {
    Ok(parse_expr(text, degree_cap)?.evaluate())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(parts: &[u32]) -> FockState {
        FockState::from_parts(parts).unwrap()
    }

    fn parse(s: &str) -> FockState {
        parse_state(s, DEFAULT_DEGREE_CAP).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(parse("h(-1)^2 vac"), st(&[1, 1]));
        assert_eq!(parse("h[-2] vac"), &st(&[2]) + &st(&[1]));
        let mut expect = st(&[3, 1]).scale(&Scalar::new(1, 2));
        expect.add_term(crate::fock::Partition::vacuum(), Scalar::from(-1));
        assert_eq!(parse("1/2 * h(-1) h(-3) vac - vac"), expect);
        assert_eq!(parse("vac"), FockState::vacuum());
        assert_eq!(
            parse(" - 2*vac+vac "),
            FockState::vacuum().scale(&Scalar::from(-1))
        );
    }

    #[test]
    fn errors_carry_positions() {
        let pos = |s: &str| match parse_state(s, 10) {
            Err(Error::Parse { position, .. }) => position,
            other => panic!("{s}: {other:?}"),
        };
        assert_eq!(pos("h(-0) vac"), 3);
        assert_eq!(pos("h(2) vac"), 2);
        assert_eq!(pos("h(-1)"), 5);
        assert_eq!(pos("vac + h(-11) vac"), 6);
        assert_eq!(pos("vac vac"), 4);
        assert_eq!(pos("1/0 * vac"), 0);
    }

    #[test]
    fn canonical_printing() {
        let s = parse("1/2 * h(-1) h(-3) vac - vac + h(-2)^2 vac");
        let text = print_state(&s);
        assert_eq!(text, "-vac + 1/2 * h(-3) h(-1) vac + h(-2)^2 vac");
        assert_eq!(parse(&text), s);
        assert_eq!(print_state(&FockState::zero()), "0 * vac");
        assert!(parse("0 * vac").is_zero());
    }

    #[test]
    fn ast_printing_roundtrips() {
        let e = parse_expr("2*h[-3]^2 h(-1) vac-1/3*vac", 30).unwrap();
        assert_eq!(e.to_string(), "2 * h[-3]^2 h(-1) vac - 1/3 * vac");
        assert_eq!(parse_expr(&e.to_string(), 30).unwrap(), e);
    }
}
