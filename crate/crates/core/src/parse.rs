//! Surface syntax for polynomials and Weyl elements.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary ('*' unary | '/' INT)*
//! unary := '-' unary | power
//! power := atom ('^' INT)?
//! atom  := INT | IDENT | 'i' | 'h' | '(' expr ')'
//! ```
//!
//! `i` is the imaginary unit and `h` is ħ; neither may name a variable.
//! Positions in errors are 0-based character offsets.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::phasepoly::{ClassicalPoly, VariableSpace};
use crate::scalar::{GaussianRational, HbarScalar};
use crate::weyl::{Generator, WeylElement, WeylSignature, WeylWord};

#[derive(Clone, Debug, PartialEq, Eq)]
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

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let tok = match c {
            _ if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ if c.is_ascii_digit() => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push((start, Tok::Int(s.parse().expect("digits"))));
                continue;
            }
            _ if c.is_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(chars[start..i].iter().collect())));
                continue;
            }
            _ => return Err(Error::Parse { pos: i, msg: format!("unexpected character `{c}`") }),
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

/// Values an expression can evaluate into.
pub trait Target {
    type Value: Clone;
    fn constant(&self, c: HbarScalar) -> Self::Value;
    fn variable(&self, name: &str) -> Option<Self::Value>;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn scale(&self, a: &Self::Value, c: &HbarScalar) -> Self::Value;
}

impl Target for Arc<VariableSpace> {
    type Value = ClassicalPoly;
    fn constant(&self, c: HbarScalar) -> ClassicalPoly {
        ClassicalPoly::constant(self, c)
    }
    fn variable(&self, name: &str) -> Option<ClassicalPoly> {
        ClassicalPoly::var_named(self, name)
    }
    fn add(&self, a: &ClassicalPoly, b: &ClassicalPoly) -> ClassicalPoly {
        a + b
    }
    fn mul(&self, a: &ClassicalPoly, b: &ClassicalPoly) -> ClassicalPoly {
        a * b
    }
    fn scale(&self, a: &ClassicalPoly, c: &HbarScalar) -> ClassicalPoly {
        a.scale(c)
    }
}

impl Target for Arc<WeylSignature> {
    type Value = WeylElement;
    fn constant(&self, c: HbarScalar) -> WeylElement {
        WeylElement::scalar(self, c)
    }
    fn variable(&self, name: &str) -> Option<WeylElement> {
        self.generator_named(name).map(|g| WeylElement::generator(self, g))
    }
    fn add(&self, a: &WeylElement, b: &WeylElement) -> WeylElement {
        a + b
    }
    fn mul(&self, a: &WeylElement, b: &WeylElement) -> WeylElement {
        a * b
    }
    fn scale(&self, a: &WeylElement, c: &HbarScalar) -> WeylElement {
        a.scale(c)
    }
}

struct Parser<'a, T: Target> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    target: &'a T,
    allow_hbar: bool,
}

impl<'a, T: Target> Parser<'a, T> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn err<X>(&self, msg: &str) -> Result<X> {
        Err(Error::Parse { pos: self.here(), msg: msg.into() })
    }

    fn int(&mut self) -> Result<BigInt> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = n.clone();
                self.pos += 1;
                Ok(n)
            }
            _ => self.err("expected an integer literal"),
        }
    }

    fn expr(&mut self) -> Result<T::Value> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = self.target.add(&acc, &t);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = self.target.add(&acc, &self.target.scale(&t, &HbarScalar::from_int(-1)));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<T::Value> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let u = self.unary()?;
                    acc = self.target.mul(&acc, &u);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let at = self.here();
                    let d = self.int()?;
                    if d.is_zero() {
                        return Err(Error::Parse { pos: at, msg: "division by zero".into() });
                    }
                    let inv = HbarScalar::from_rational(BigRational::new(BigInt::one(), d));
                    acc = self.target.scale(&acc, &inv);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<T::Value> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            let u = self.unary()?;
            return Ok(self.target.scale(&u, &HbarScalar::from_int(-1)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<T::Value> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let at = self.here();
        let e = self.int()?;
        let e: u32 = e.try_into().map_err(|_| Error::Parse { pos: at, msg: "exponent too large".into() })?;
        let mut acc = self.target.constant(HbarScalar::one());
        for _ in 0..e {
            acc = self.target.mul(&acc, &base);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<T::Value> {
        let at = self.here();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(self.target.constant(HbarScalar::from_rational(BigRational::from_integer(n))))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "i" => Ok(self.target.constant(HbarScalar::constant(GaussianRational::i()))),
                    "h" if !self.allow_hbar => Err(Error::HbarInLie(format!("h at position {at}"))),
                    "h" => Ok(self.target.constant(HbarScalar::hbar())),
                    _ => self.target.variable(&name).ok_or(Error::UnknownIdentifier { pos: at, name }),
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(v)
            }
            Some(_) => self.err("expected an operand"),
            None => self.err("unexpected end of input"),
        }
    }
}

fn run<T: Target>(text: &str, target: &T, allow_hbar: bool) -> Result<T::Value> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, end: text.chars().count(), target, allow_hbar };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("unexpected token");
    }
    Ok(v)
}

pub fn parse<T: Target>(text: &str, target: &T) -> Result<T::Value> {
    run(text, target, true)
}

pub fn parse_classical(text: &str, space: &Arc<VariableSpace>) -> Result<ClassicalPoly> {
    run(text, space, true)
}

/// Like [`parse_classical`] but `h` is rejected: Lie data is classical.
pub fn parse_lie_element(text: &str, space: &Arc<VariableSpace>) -> Result<ClassicalPoly> {
    run(text, space, false)
}

pub fn parse_weyl(text: &str, sig: &Arc<WeylSignature>) -> Result<WeylElement> {
    run(text, sig, true)
}

/// A product of generators written with `*` and `^`, kept as a word.
pub fn parse_word(text: &str, sig: &Arc<WeylSignature>) -> Result<WeylWord> {
    let toks = tokenize(text)?;
    let mut symbols: Vec<Generator> = Vec::new();
    let mut i = 0;
    let end = text.chars().count();
    let at = |i: usize| toks.get(i).map_or(end, |(p, _)| *p);
    loop {
        let g = match toks.get(i) {
            Some((p, Tok::Ident(name))) => sig
                .generator_named(name)
                .ok_or_else(|| Error::UnknownIdentifier { pos: *p, name: name.clone() })?,
            _ => return Err(Error::Parse { pos: at(i), msg: "expected a generator".into() }),
        };
        i += 1;
        let mut reps = 1u32;
        if matches!(toks.get(i), Some((_, Tok::Caret))) {
            i += 1;
            match toks.get(i) {
                Some((p, Tok::Int(n))) => {
                    reps = n.try_into().map_err(|_| Error::Parse { pos: *p, msg: "exponent too large".into() })?;
                    i += 1;
                }
                _ => return Err(Error::Parse { pos: at(i), msg: "expected an integer literal".into() }),
            }
        }
        symbols.extend(std::iter::repeat(g).take(reps as usize));
        match toks.get(i) {
            None => break,
            Some((_, Tok::Star)) => i += 1,
            Some((p, _)) => return Err(Error::Parse { pos: *p, msg: "expected `*`".into() }),
        }
    }
    WeylWord::new(sig, symbols)
}

/// Renders a word as `z1*w1*z1`.
pub fn render_word(word: &WeylWord) -> String {
    if word.symbols.is_empty() {
        return "1".into();
    }
    word.symbols.iter().map(|g| word.signature.generator_name(*g)).collect::<Vec<_>>().join("*")
}

/// Canonical space from identifiers `q1..qn`, `p1..pn`: `n` is the largest
/// index seen. `None` when some other identifier occurs.
pub fn infer_canonical_space<'a, I: IntoIterator<Item = &'a str>>(texts: I) -> Option<Arc<VariableSpace>> {
    let mut n = 0usize;
    for t in texts {
        for (_, tok) in tokenize(t).ok()? {
            if let Tok::Ident(name) = tok {
                if name == "i" || name == "h" {
                    continue;
                }
                let (head, rest) = name.split_at(1);
                let k: usize = rest.parse().ok()?;
                if !(head == "q" || head == "p") || k == 0 {
                    return None;
                }
                n = n.max(k);
            }
        }
    }
    Some(VariableSpace::canonical(n.max(1)))
}

/// Weyl generators named `z_k`/`w_k` are parsed positionally: the largest
/// index fixes the number of pairs.
pub fn infer_weyl_pairs(text: &str) -> usize {
    let mut k = 1;
    if let Ok(toks) = tokenize(text) {
        for (_, t) in toks {
            if let Tok::Ident(name) = t {
                if let Some(rest) = name.strip_prefix('z').or_else(|| name.strip_prefix('w')) {
                    if let Ok(x) = rest.parse::<usize>() {
                        k = k.max(x);
                    }
                }
            }
        }
    }
    k
}
