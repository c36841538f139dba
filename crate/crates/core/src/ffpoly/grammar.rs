//! Text form of field elements and polynomials.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := INT | VAR ['^' INT] | GEN ['^' INT] | '(' expr ')'
//! ```
//!
//! `VAR` is the polynomial variable (`t` by default) and `GEN` the generator
//! symbol of a non-prime field (`g`). Integer literals must lie in `0..p`.
//! A parenthesized group may not mention `VAR`, so `(g+1)*t^2+g` is accepted
//! and `(t+1)*t` is not. Whitespace is ignored.

use super::field::{prime_power, Fq, FqElem};
use super::poly::Poly;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(u64),
    Var,
    Gen,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(s: &str, var: &str, gen: Option<&str>) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    let text: String = chars.iter().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let rest = &text[text.char_indices().nth(i).map(|(b, _)| b).unwrap_or(text.len())..];
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            d if d.is_ascii_digit() => {
                let len = rest.chars().take_while(|c| c.is_ascii_digit()).count();
                let n = rest[..len].parse::<u64>().map_err(|e| Error::parse(format!("{e} in {s:?}")))?;
                out.push(Tok::Int(n));
                i += len;
                continue;
            }
            _ => {
                let ident_len = rest.chars().take_while(|c| c.is_ascii_alphanumeric() || *c == '_').count();
                let ident = &rest[..ident_len];
                if ident == var {
                    out.push(Tok::Var);
                } else if gen == Some(ident) {
                    out.push(Tok::Gen);
                } else {
                    return Err(Error::parse(format!("unexpected {ident:?} in {s:?}")));
                }
                i += ident_len.max(1);
                continue;
            }
        };
        out.push(tok);
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    field: &'a Fq,
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn err(&self, what: &str) -> Error {
        Error::parse(format!("{what} at token {} of {:?}", self.pos, self.src))
    }

    fn exponent(&mut self) -> Result<usize> {
        if self.peek() == Some(&Tok::Caret) {
            self.bump();
            match self.bump() {
                Some(Tok::Int(n)) => usize::try_from(n).map_err(|_| self.err("exponent too large")),
                _ => Err(self.err("expected exponent")),
            }
        } else {
            Ok(1)
        }
    }

    // Polynomial in VAR whose coefficients may involve GEN.
    fn expr(&mut self, allow_var: bool) -> Result<Poly> {
        let f = self.field;
        let mut acc = Poly::zero(f);
        let mut negate = false;
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            negate = true;
        }
        loop {
            let term = self.term(allow_var)?;
            acc = if negate { &acc - &term } else { &acc + &term };
            match self.peek() {
                Some(Tok::Plus) => negate = false,
                Some(Tok::Minus) => negate = true,
                _ => break,
            }
            self.bump();
        }
        Ok(acc)
    }

    fn term(&mut self, allow_var: bool) -> Result<Poly> {
        let mut acc = self.factor(allow_var)?;
        while self.peek() == Some(&Tok::Star) {
            self.bump();
            acc = &acc * &self.factor(allow_var)?;
        }
        Ok(acc)
    }

    fn factor(&mut self, allow_var: bool) -> Result<Poly> {
        let f = self.field;
        match self.bump() {
            Some(Tok::Int(n)) => {
                if n >= f.p() as u64 {
                    return Err(self.err(&format!("coefficient {n} not in 0..{}", f.p())));
                }
                Ok(Poly::constant(f, f.from_int(n as i64)))
            }
            Some(Tok::Var) if allow_var => {
                let k = self.exponent()?;
                Ok(Poly::monomial(f, FqElem::ONE, k))
            }
            Some(Tok::Gen) => {
                let g = f.generator().ok_or_else(|| self.err("generator symbol in a prime field"))?;
                let k = self.exponent()?;
                Ok(Poly::constant(f, f.pow(g, k as u64)))
            }
            Some(Tok::LParen) => {
                let inner = self.expr(false)?;
                if self.bump() != Some(Tok::RParen) {
                    return Err(self.err("expected ')'"));
                }
                Ok(inner)
            }
            _ => Err(self.err("expected a term")),
        }
    }
}

/// Parses a polynomial in `var` over `field`.
pub fn parse_poly_in(field: &Fq, s: &str, var: &str) -> Result<Poly> {
    let gen = (field.r() > 1).then(|| field.symbol());
    let toks = tokenize(s, var, gen)?;
    if toks.is_empty() {
        return Err(Error::parse("empty polynomial"));
    }
    let mut p = Parser { toks, pos: 0, field, src: s };
    let out = p.expr(true)?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(out)
}

/// Parses a polynomial in `t`.
pub fn parse_poly(field: &Fq, s: &str) -> Result<Poly> {
    parse_poly_in(field, s, "t")
}

/// Parses a field element (a polynomial expression in the generator symbol).
pub fn parse_elem(field: &Fq, s: &str) -> Result<FqElem> {
    let gen = (field.r() > 1).then(|| field.symbol());
    let toks = tokenize(s, "\u{0}", gen)?;
    let mut p = Parser { toks, pos: 0, field, src: s };
    let out = p.expr(false)?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(out.coeff(0))
}

/// Builds `F_q` from its size and an optional defining polynomial written in
/// the generator symbol `g`, e.g. `"g^2+g+1"`.
pub fn make_field(q: u32, modulus: Option<&str>) -> Result<Fq> {
    let Some(m) = modulus else { return Fq::new(q) };
    let (p, r) = prime_power(q).ok_or_else(|| Error::domain(format!("{q} is not a prime power")))?;
    let fp = Fq::prime(p)?;
    let poly = parse_poly_in(&fp, m, "g")?;
    if poly.deg() != r as i64 {
        return Err(Error::domain(format!("field modulus {m:?} has degree {} but q = {p}^{r}", poly.deg())));
    }
    let coeffs: Vec<u32> = poly.coeffs().iter().map(|c| c.code()).collect();
    Fq::with_modulus(p, &coeffs, "g")
}

/// Splits `"a/f"` on its single `/` and parses both sides.
pub fn parse_fraction(field: &Fq, s: &str) -> Result<(Poly, Poly)> {
    let mut parts = s.split('/');
    match (parts.next(), parts.next(), parts.next()) {
        (Some(a), Some(f), None) => Ok((parse_poly(field, ungroup(a))?, parse_poly(field, ungroup(f))?)),
        _ => Err(Error::parse(format!("expected a/f, got {s:?}"))),
    }
}

/// Drops one pair of parentheses enclosing the whole of `s`, so "(t+1)/(t^2+1)"
/// reads like "t+1/t^2+1". "(g+1)*t" is left alone.
fn ungroup(s: &str) -> &str {
    let t = s.trim();
    let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) else {
        return s;
    };
    let mut depth = 0i32;
    for c in inner.chars() {
        match c {
            '(' => depth += 1,
            ')' if depth == 0 => return s,
            ')' => depth -= 1,
            _ => {}
        }
    }
    inner
}
