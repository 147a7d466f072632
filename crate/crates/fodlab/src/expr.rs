//! Parser for the expression grammar used by the CLI and by replayable
//! counterexamples.
//!
//! ```text
//! map     := '[' (expr (';' expr)*)? ']' ':' nat '->' nat
//! expr    := term (('+' | '-') term)*
//! term    := factor ('*' factor)*
//! factor  := '-'? base
//! base    := atom ('^' nat)*
//! atom    := rational | 'x' nat | '(' expr ')'
//! rational:= nat ('/' nat)?
//! ```
//!
//! Whitespace is insignificant. Errors carry the byte offset of the
//! offending token. The printers in [`crate::poly`] and
//! [`crate::polymap`] emit exactly this grammar, so any serialized
//! counterexample can be fed back in.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::poly::{Poly, Rational};
use crate::polymap::PolyMap;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LBracket,
    RBracket,
    LParen,
    RParen,
    Semi,
    Colon,
    Arrow,
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    Int(BigInt),
    Var(usize),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    offset: usize,
}

fn err(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        offset,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<Spanned>> {
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
            b'[' => out.push(Spanned { tok: Tok::LBracket, offset: start }),
            b']' => out.push(Spanned { tok: Tok::RBracket, offset: start }),
            b'(' => out.push(Spanned { tok: Tok::LParen, offset: start }),
            b')' => out.push(Spanned { tok: Tok::RParen, offset: start }),
            b';' => out.push(Spanned { tok: Tok::Semi, offset: start }),
            b':' => out.push(Spanned { tok: Tok::Colon, offset: start }),
            b'+' => out.push(Spanned { tok: Tok::Plus, offset: start }),
            b'*' => out.push(Spanned { tok: Tok::Star, offset: start }),
            b'^' => out.push(Spanned { tok: Tok::Caret, offset: start }),
            b'/' => out.push(Spanned { tok: Tok::Slash, offset: start }),
            b'-' => {
                if i + 1 < bytes.len() && bytes[i + 1] == b'>' {
                    out.push(Spanned { tok: Tok::Arrow, offset: start });
                    i += 1;
                } else {
                    out.push(Spanned { tok: Tok::Minus, offset: start });
                }
            }
            b'0'..=b'9' => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                let text = &src[i..j];
                let n: BigInt = text.parse().expect("digits parse as integer");
                out.push(Spanned { tok: Tok::Int(n), offset: start });
                i = j;
                continue;
            }
            b'x' => {
                let mut j = i + 1;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j == i + 1 {
                    return Err(err(start, "variable name needs an index, e.g. x0"));
                }
                let idx: usize = src[i + 1..j]
                    .parse()
                    .map_err(|_| err(start, "variable index too large"))?;
                out.push(Spanned { tok: Tok::Var(idx), offset: start });
                i = j;
                continue;
            }
            _ => return Err(err(start, format!("unexpected character {:?}", c as char))),
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    end: usize,
    arity: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<&Spanned> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<usize> {
        match self.next() {
            Some(s) if &s.tok == want => Ok(s.offset),
            Some(s) => Err(err(s.offset, format!("expected {what}"))),
            None => Err(err(self.end, format!("expected {what}, found end of input"))),
        }
    }

    fn nat_u32(&mut self, what: &str) -> Result<u32> {
        match self.next() {
            Some(Spanned { tok: Tok::Int(n), offset }) => {
                let (offset, n) = (*offset, n.clone());
                u32::try_from(&n).map_err(|_| err(offset, format!("{what} out of range")))
            }
            Some(s) => Err(err(s.offset, format!("expected {what}"))),
            None => Err(err(self.end, format!("expected {what}, found end of input"))),
        }
    }

    fn nat_usize(&mut self, what: &str) -> Result<usize> {
        Ok(self.nat_u32(what)? as usize)
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        loop {
            match self.peek().map(|s| s.tok.clone()) {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        while matches!(self.peek().map(|s| &s.tok), Some(Tok::Star)) {
            self.pos += 1;
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly> {
        if matches!(self.peek().map(|s| &s.tok), Some(Tok::Minus)) {
            self.pos += 1;
            return Ok(self.factor()?.neg());
        }
        self.base()
    }

    fn base(&mut self) -> Result<Poly> {
        let mut acc = self.atom()?;
        while matches!(self.peek().map(|s| &s.tok), Some(Tok::Caret)) {
            self.pos += 1;
            let e = self.nat_u32("a nonnegative integer exponent")?;
            acc = acc.pow(e);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Poly> {
        let Some(s) = self.next().cloned() else {
            return Err(err(self.end, "expected an expression, found end of input"));
        };
        match s.tok {
            Tok::Int(n) => {
                // Optional '/ nat' completes a rational literal.
                if matches!(self.peek().map(|t| &t.tok), Some(Tok::Slash)) {
                    self.pos += 1;
                    match self.next().cloned() {
                        Some(Spanned { tok: Tok::Int(d), offset }) => {
                            if d.is_zero() {
                                return Err(err(offset, "zero denominator"));
                            }
                            Ok(Poly::constant(self.arity, Rational::new(n, d)))
                        }
                        Some(t) => Err(err(t.offset, "expected a denominator")),
                        None => Err(err(self.end, "expected a denominator, found end of input")),
                    }
                } else {
                    Ok(Poly::constant(self.arity, Rational::from_integer(n)))
                }
            }
            Tok::Var(idx) => {
                if idx >= self.arity {
                    return Err(err(
                        s.offset,
                        format!("variable x{idx} out of range for domain {}", self.arity),
                    ));
                }
                Ok(Poly::var(self.arity, idx))
            }
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(&Tok::RParen, "a closing parenthesis")?;
                Ok(inner)
            }
            _ => Err(err(s.offset, "expected a literal, a variable, or '('")),
        }
    }
}

/// Parses a map literal `[e0; e1; ...] : m -> n`.
pub fn parse_map(src: &str) -> Result<PolyMap> {
    let toks = lex(src)?;
    let end = src.len();

    // The domain arity is written at the end of the literal, so locate the
    // trailing `: m -> n` before lowering the component expressions.
    let colon_pos = toks
        .iter()
        .rposition(|s| s.tok == Tok::Colon)
        .ok_or_else(|| err(end, "expected ': m -> n' after the component list"))?;

    let mut tail = Parser {
        toks: &toks[colon_pos + 1..],
        pos: 0,
        end,
        arity: 0,
    };
    let dom = tail.nat_usize("a domain dimension")?;
    tail.expect(&Tok::Arrow, "'->'")?;
    let cod = tail.nat_usize("a codomain dimension")?;
    if let Some(s) = tail.peek() {
        return Err(err(s.offset, "unexpected trailing input"));
    }

    let mut p = Parser {
        toks: &toks[..colon_pos],
        pos: 0,
        end,
        arity: dom,
    };
    p.expect(&Tok::LBracket, "'['")?;
    let mut components = Vec::new();
    if matches!(p.peek().map(|s| &s.tok), Some(Tok::RBracket)) {
        p.pos += 1;
    } else {
        loop {
            components.push(p.expr()?);
            match p.next() {
                Some(Spanned { tok: Tok::Semi, .. }) => continue,
                Some(Spanned { tok: Tok::RBracket, .. }) => break,
                Some(s) => return Err(err(s.offset, "expected ';' or ']'")),
                None => return Err(err(end, "expected ']', found end of input")),
            }
        }
    }
    if let Some(s) = p.peek() {
        return Err(err(s.offset, "unexpected input before ':'"));
    }
    if components.len() != cod {
        return Err(err(
            end,
            format!("{} components declared but codomain is {cod}", components.len()),
        ));
    }
    PolyMap::new(dom, cod, components)
}
