//! Expression reader for polynomials written the way computer algebra
//! systems print them: implicit multiplication, `^` powers, parentheses and
//! rational constants such as `(1/2)`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{MultiPoly, Q};
use crate::error::{Error, Result};

const MAX_EXPONENT: u32 = 256;
const MAX_TERMS: usize = 200_000;
const MAX_DEPTH: usize = 200;
const MAX_BITS: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Q),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((start, Tok::Plus)),
            b'-' => out.push((start, Tok::Minus)),
            b'*' => out.push((start, Tok::Star)),
            b'/' => out.push((start, Tok::Slash)),
            b'^' => out.push((start, Tok::Caret)),
            b'(' => out.push((start, Tok::LParen)),
            b')' => out.push((start, Tok::RParen)),
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let int_end = i;
                let mut frac = "";
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    let fs = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    frac = &src[fs..i];
                }
                let int = &src[start..int_end];
                if int.is_empty() && frac.is_empty() {
                    return Err(Error::Parse {
                        pos: start,
                        msg: "lone decimal point".into(),
                    });
                }
                let digits = format!("{}{}", int, frac);
                let n: BigInt = digits.parse().map_err(|_| Error::Parse {
                    pos: start,
                    msg: "bad number".into(),
                })?;
                let d = BigInt::from(10u32).pow(frac.len() as u32);
                out.push((start, Tok::Num(Q::new(n, d))));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
                continue;
            }
            _ => {
                return Err(Error::Parse {
                    pos: start,
                    msg: format!("unexpected character {:?}", src[start..].chars().next().unwrap_or('?')),
                })
            }
        }
        i += 1;
    }
    Ok(out)
}

/// Polynomial reader bound to a variable list and a table of parameter values.
pub struct Parser {
    vars: Vec<String>,
    params: HashMap<String, Q>,
}

impl Parser {
    pub fn new<S: AsRef<str>>(vars: &[S]) -> Self {
        Parser {
            vars: vars.iter().map(|s| s.as_ref().to_string()).collect(),
            params: HashMap::new(),
        }
    }

    pub fn param(mut self, name: &str, value: Q) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn params<'a, I: IntoIterator<Item = (&'a str, Q)>>(mut self, it: I) -> Self {
        for (k, v) in it {
            self.params.insert(k.to_string(), v);
        }
        self
    }

    pub fn parse(&self, src: &str) -> Result<MultiPoly> {
        let toks = lex(src)?;
        let mut st = State {
            toks: &toks,
            pos: 0,
            p: self,
            depth: 0,
            end: src.len(),
        };
        let e = st.expr()?;
        if st.pos != toks.len() {
            return Err(Error::Parse {
                pos: st.at(),
                msg: "trailing input".into(),
            });
        }
        Ok(e)
    }
}

/// Parse with no parameters.
pub fn parse_poly<S: AsRef<str>>(src: &str, vars: &[S]) -> Result<MultiPoly> {
    Parser::new(vars).parse(src)
}

/// Binomial coefficient, saturating at `u64::MAX`.
fn binom_bound(n: u64, k: u64) -> u64 {
    let k = k.min(n.saturating_sub(k));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

struct State<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    p: &'a Parser,
    depth: usize,
    end: usize,
}

impl<'a> State<'a> {
    fn at(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.end)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse {
            pos: self.at(),
            msg: msg.to_string(),
        })
    }

    fn nv(&self) -> usize {
        self.p.vars.len()
    }

    fn guard(&self, p: MultiPoly) -> Result<MultiPoly> {
        if p.len() > MAX_TERMS {
            return self.err("expression too large");
        }
        Ok(p)
    }

    fn mul_checked(&self, a: &MultiPoly, b: &MultiPoly) -> Result<MultiPoly> {
        let deg = a.degree().unwrap_or(0) + b.degree().unwrap_or(0);
        if deg > 4 * MAX_EXPONENT || a.len().saturating_mul(b.len()) > 20 * MAX_TERMS {
            return self.err("expression too large");
        }
        self.guard(a * b)
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.err("nesting too deep");
        }
        let mut acc = MultiPoly::zero(self.nv());
        let mut sign = match self.peek() {
            Some(Tok::Plus) => {
                self.pos += 1;
                1
            }
            Some(Tok::Minus) => {
                self.pos += 1;
                -1
            }
            _ => 1,
        };
        loop {
            let t = self.term()?;
            acc = if sign > 0 { &acc + &t } else { &acc - &t };
            acc = self.guard(acc)?;
            match self.peek() {
                Some(Tok::Plus) => sign = 1,
                Some(Tok::Minus) => sign = -1,
                _ => break,
            }
            self.pos += 1;
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let f = self.power()?;
                    acc = self.mul_checked(&acc, &f)?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let f = self.power()?;
                    let c = match f.constant_value() {
                        Some(c) if !c.is_zero() => c,
                        Some(_) => return self.err("division by zero"),
                        None => return self.err("division by a non-constant"),
                    };
                    acc = acc.scale(&(Q::one() / c));
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    let f = self.power()?;
                    acc = self.mul_checked(&acc, &f)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            let e = match self.peek() {
                Some(Tok::Num(n)) if n.is_integer() => n.to_integer(),
                _ => return self.err("exponent must be a non-negative integer"),
            };
            let e: u32 = match u32::try_from(e) {
                Ok(v) if v <= MAX_EXPONENT => v,
                _ => return self.err("exponent too large"),
            };
            self.pos += 1;
            if let Some(d) = base.degree() {
                if (d as u64) * (e as u64) > MAX_EXPONENT as u64 {
                    return self.err("degree too large");
                }
            }
            let deg = base.degree().unwrap_or(0) as u64 * e as u64;
            let bound =
                binom_bound(base.len() as u64 + e as u64 - 1, e as u64).min(binom_bound(self.nv() as u64 + deg, deg));
            let bits = base
                .terms()
                .map(|(_, c)| c.numer().bits().max(c.denom().bits()))
                .max()
                .unwrap_or(0);
            if bits.saturating_mul(e as u64) > MAX_BITS {
                return self.err("coefficient too large");
            }
            if e > 1 && bound > MAX_TERMS as u64 {
                return self.err("expression too large");
            }
            return self.guard(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        let nv = self.nv();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(MultiPoly::constant(nv, n))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if let Some(i) = self.p.vars.iter().position(|v| *v == name) {
                    Ok(MultiPoly::var(nv, i))
                } else if let Some(v) = self.p.params.get(&name) {
                    Ok(MultiPoly::constant(nv, v.clone()))
                } else {
                    Err(Error::Parse {
                        pos: self.toks[self.pos - 1].0,
                        msg: format!("unknown identifier {}", name),
                    })
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(e)
                    }
                    _ => self.err("expected ')'"),
                }
            }
            Some(Tok::Minus) => {
                // unary minus directly after an operator, e.g. "x * -y"
                self.pos += 1;
                let a = self.power()?;
                Ok(-&a)
            }
            _ => self.err("expected a number, identifier or '('"),
        }
    }
}
