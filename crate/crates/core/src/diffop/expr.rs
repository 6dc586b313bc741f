//! Text form of differential operator expressions.
//!
//! ```text
//! expr    := "0" | term (("+" | "-") term)*
//! term    := INT | [INT "*"] factor+
//! factor  := "l(" element ")" | "r(" element ")" | "m" INT ["^" INT] | "id"
//! element := ["-"] atom (("+" | "-") atom)*
//! atom    := [INT "*"] NAME | NAME | INT
//! ```
//!
//! `l(a)` is `x -> a x`, `r(b)` is `x -> x b`, `mK^s` applies the `K`-th
//! outer generator `s` times and `id` is the identity. Factors act from left
//! to right. A bare integer inside an element is a multiple of the unit
//! unless it is itself a basis name.

use crate::algebra::AlgebraPresentation;
use crate::error::{Error, Result};
use crate::format::Locator;

/// Largest exponent accepted on a generator.
pub const MAX_EXPONENT: u32 = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factor {
    /// `l(a)`, model coordinates.
    Left(Vec<u64>),
    /// `r(b)`, model coordinates.
    Right(Vec<u64>),
    /// `m{i+1}^k`.
    Mu(usize, u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpTerm {
    pub coeff: u64,
    pub factors: Vec<Factor>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiffOpExpr {
    pub terms: Vec<OpTerm>,
}

impl DiffOpExpr {
    pub fn zero() -> Self {
        DiffOpExpr { terms: Vec::new() }
    }

    pub fn identity() -> Self {
        DiffOpExpr {
            terms: vec![OpTerm {
                coeff: 1,
                factors: Vec::new(),
            }],
        }
    }

    pub fn single(coeff: u64, factors: Vec<Factor>) -> Self {
        DiffOpExpr {
            terms: vec![OpTerm { coeff, factors }],
        }
    }

    /// `self` then `other`.
    pub fn then(&self, other: &DiffOpExpr, p: u64) -> DiffOpExpr {
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                let mut factors = a.factors.clone();
                factors.extend(b.factors.iter().cloned());
                terms.push(OpTerm {
                    coeff: a.coeff * b.coeff % p,
                    factors,
                });
            }
        }
        DiffOpExpr { terms }
    }

    pub fn plus(&self, other: &DiffOpExpr) -> DiffOpExpr {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        DiffOpExpr { terms }
    }

    /// Parse against the basis names of `alg`, with generators `m1..m{m}`.
    pub fn parse(text: &str, alg: &AlgebraPresentation, m: usize) -> Result<Self> {
        let mut parser = Parser {
            loc: Locator { text },
            tokens: lex(text, &Locator { text })?,
            pos: 0,
            alg,
            m,
        };
        parser.expr()
    }

    pub fn to_text(&self, alg: &AlgebraPresentation) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let terms: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let body = if t.factors.is_empty() {
                    "id".to_string()
                } else {
                    t.factors
                        .iter()
                        .map(|f| match f {
                            Factor::Left(a) => format!("l({})", alg.format_coords(a)),
                            Factor::Right(b) => format!("r({})", alg.format_coords(b)),
                            Factor::Mu(i, 1) => format!("m{}", i + 1),
                            Factor::Mu(i, k) => format!("m{}^{}", i + 1, k),
                        })
                        .collect::<Vec<_>>()
                        .join(" ")
                };
                if t.coeff == 1 {
                    body
                } else {
                    format!("{} * {}", t.coeff, body)
                }
            })
            .collect();
        terms.join(" + ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Sym(char),
}

fn lex(text: &str, loc: &Locator) -> Result<Vec<(Tok, usize)>> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if "()+-*^".contains(c) {
            out.push((Tok::Sym(c), i));
            chars.next();
        } else if c.is_alphanumeric() || c == '_' || c == '.' {
            let mut w = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if c.is_alphanumeric() || c == '_' || c == '.' {
                    w.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push((Tok::Word(w), i));
        } else {
            return Err(loc.at(i, format!("unexpected character {:?}", c)));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    loc: Locator<'a>,
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    alg: &'a AlgebraPresentation,
    m: usize,
}

fn is_int(w: &str) -> bool {
    !w.is_empty() && w.bytes().all(|b| b.is_ascii_digit())
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.loc.text.len(), |&(_, o)| o)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        self.loc.at(self.offset(), msg)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", c)))
        }
    }

    fn int(&self, w: &str) -> Result<u64> {
        w.parse::<u64>().map_err(|_| self.err(format!("integer {} out of range", w)))
    }

    fn expr(&mut self) -> Result<DiffOpExpr> {
        let p = self.alg.p();
        if self.tokens.len() == 1 && self.peek() == Some(&Tok::Word("0".into())) {
            return Ok(DiffOpExpr::zero());
        }
        let mut terms = Vec::new();
        let mut sign = if self.eat('-') { p - 1 } else { 1 };
        loop {
            let mut t = self.term()?;
            t.coeff = t.coeff * sign % p;
            terms.push(t);
            if self.eat('+') {
                sign = 1;
            } else if self.eat('-') {
                sign = p - 1;
            } else if self.peek().is_none() {
                break;
            } else {
                return Err(self.err("expected '+', '-' or end of input"));
            }
        }
        Ok(DiffOpExpr { terms })
    }

    fn term(&mut self) -> Result<OpTerm> {
        let p = self.alg.p();
        let mut coeff = 1;
        if let Some(Tok::Word(w)) = self.peek() {
            if is_int(w) {
                let w = w.clone();
                coeff = self.int(&w)? % p;
                self.pos += 1;
                if !self.eat('*') {
                    return Ok(OpTerm {
                        coeff,
                        factors: Vec::new(),
                    });
                }
            }
        }
        let mut factors = Vec::new();
        let mut seen = false;
        while let Some(Tok::Word(w)) = self.peek() {
            let w = w.clone();
            let start = self.offset();
            self.pos += 1;
            seen = true;
            if w == "id" {
                continue;
            }
            if w == "l" || w == "r" {
                self.expect('(')?;
                let a = self.element()?;
                self.expect(')')?;
                factors.push(if w == "l" { Factor::Left(a) } else { Factor::Right(a) });
                continue;
            }
            if let Some(idx) = w.strip_prefix('m').filter(|s| is_int(s)) {
                let i = self.int(idx)? as usize;
                if i == 0 || i > self.m {
                    return Err(self.loc.at(start, format!("generator m{} outside m1..m{}", i, self.m)));
                }
                let mut k = 1u32;
                if self.eat('^') {
                    match self.peek() {
                        Some(Tok::Word(e)) if is_int(e) => {
                            let e = e.clone();
                            let v = self.int(&e)?;
                            if v > MAX_EXPONENT as u64 {
                                return Err(self.err(format!("exponent {} exceeds {}", v, MAX_EXPONENT)));
                            }
                            k = v as u32;
                            self.pos += 1;
                        }
                        _ => return Err(self.err("expected an exponent")),
                    }
                }
                factors.push(Factor::Mu(i - 1, k));
                continue;
            }
            return Err(self.loc.at(start, format!("unknown factor {:?}", w)));
        }
        if !seen {
            return Err(self.err("expected a factor"));
        }
        Ok(OpTerm { coeff, factors })
    }

    fn element(&mut self) -> Result<Vec<u64>> {
        let p = self.alg.p();
        let n = self.alg.dim();
        let mut out = vec![0u64; n];
        let mut sign = if self.eat('-') { p - 1 } else { 1 };
        loop {
            let (c, v) = self.atom()?;
            let c = c * sign % p;
            for (o, x) in out.iter_mut().zip(v) {
                *o = (*o + c * x) % p;
            }
            if self.eat('+') {
                sign = 1;
            } else if self.eat('-') {
                sign = p - 1;
            } else {
                break;
            }
        }
        Ok(out)
    }

    fn atom(&mut self) -> Result<(u64, Vec<u64>)> {
        let p = self.alg.p();
        let n = self.alg.dim();
        let w = match self.peek() {
            Some(Tok::Word(w)) => w.clone(),
            _ => return Err(self.err("expected a basis name or integer")),
        };
        let start = self.offset();
        self.pos += 1;
        if is_int(&w) && self.peek() == Some(&Tok::Sym('*')) {
            let c = self.int(&w)? % p;
            self.pos += 1;
            let name = match self.peek() {
                Some(Tok::Word(name)) => name.clone(),
                _ => return Err(self.err("expected a basis name")),
            };
            let at = self.offset();
            self.pos += 1;
            let i = self
                .alg
                .index_of(&name)
                .ok_or_else(|| self.loc.at(at, format!("unknown basis name {:?}", name)))?;
            return Ok((c, crate::algebra::unit_vector(n, i)));
        }
        if let Some(i) = self.alg.index_of(&w) {
            return Ok((1, crate::algebra::unit_vector(n, i)));
        }
        if is_int(&w) {
            let c = self.int(&w)? % p;
            return Ok((c, self.alg.unit().to_vec()));
        }
        Err(self.loc.at(start, format!("unknown basis name {:?}", w)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::matrix_algebra;

    #[test]
    fn parse_and_print_round_trip() {
        let a = matrix_algebra(2, 3).unwrap();
        let e = DiffOpExpr::parse("2 * l(e11 + 2*e12) r(e21) m1^2 + id - m1", &a, 1).unwrap();
        assert_eq!(e.terms.len(), 3);
        assert_eq!(e.terms[0].coeff, 2);
        assert_eq!(e.terms[0].factors[0], Factor::Left(vec![1, 2, 0, 0]));
        assert_eq!(e.terms[0].factors[2], Factor::Mu(0, 2));
        assert_eq!(e.terms[2].coeff, 2);
        let text = e.to_text(&a);
        assert_eq!(DiffOpExpr::parse(&text, &a, 1).unwrap(), e);
    }

    #[test]
    fn scalars_and_zero() {
        let a = matrix_algebra(2, 2).unwrap();
        let e = DiffOpExpr::parse("l(1) r(0)", &a, 0).unwrap();
        assert_eq!(e.terms[0].factors[0], Factor::Left(vec![1, 0, 0, 1]));
        assert_eq!(e.terms[0].factors[1], Factor::Right(vec![0, 0, 0, 0]));
        assert_eq!(DiffOpExpr::parse("0", &a, 0).unwrap(), DiffOpExpr::zero());
        assert_eq!(DiffOpExpr::zero().to_text(&a), "0");
    }

    #[test]
    fn errors_carry_positions() {
        let a = matrix_algebra(2, 2).unwrap();
        match DiffOpExpr::parse("l(e11) m2", &a, 1) {
            Err(Error::Parse { line: 1, column: 8, .. }) => {}
            other => panic!("{:?}", other),
        }
        assert!(DiffOpExpr::parse("l(e13)", &a, 0).is_err());
        assert!(DiffOpExpr::parse("l(e11", &a, 0).is_err());
        assert!(DiffOpExpr::parse("", &a, 0).is_err());
        assert!(DiffOpExpr::parse("m1^999", &a, 1).is_err());
        assert!(DiffOpExpr::parse("3 +", &a, 0).is_err());
    }
}
