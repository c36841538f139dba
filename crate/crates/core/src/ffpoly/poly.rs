//! Dense univariate polynomials over `F_q` in the variable `t`.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

use super::field::{Fq, FqElem};
use crate::error::{Error, Result};

/// A polynomial over `F_q`, coefficients lowest degree first, never with a
/// trailing zero. The zero polynomial has no coefficients.
#[derive(Clone)]
pub struct Poly {
    field: Fq,
    coeffs: Vec<FqElem>,
}

impl Poly {
    pub fn new(field: &Fq, mut coeffs: Vec<FqElem>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { field: field.clone(), coeffs }
    }

    /// Polynomial with prime-subfield coefficients given as integers.
    pub fn from_ints(field: &Fq, coeffs: &[i64]) -> Poly {
        Poly::new(field, coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn zero(field: &Fq) -> Poly {
        Poly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn one(field: &Fq) -> Poly {
        Poly::constant(field, FqElem::ONE)
    }

    pub fn constant(field: &Fq, c: FqElem) -> Poly {
        Poly::new(field, vec![c])
    }

    /// `c * t^k`.
    pub fn monomial(field: &Fq, c: FqElem, k: usize) -> Poly {
        let mut coeffs = vec![FqElem::ZERO; k + 1];
        coeffs[k] = c;
        Poly::new(field, coeffs)
    }

    /// The variable `t`.
    pub fn t(field: &Fq) -> Poly {
        Poly::monomial(field, FqElem::ONE, 1)
    }

    pub fn field(&self) -> &Fq {
        &self.field
    }

    pub fn coeffs(&self) -> &[FqElem] {
        &self.coeffs
    }

    /// Coefficient of `t^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> FqElem {
        self.coeffs.get(k).copied().unwrap_or(FqElem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == FqElem::ONE
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial sent to `-1`.
    pub fn deg(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn leading(&self) -> Option<FqElem> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(FqElem::ONE)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, c: FqElem) -> Poly {
        let f = &self.field;
        Poly::new(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![FqElem::ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { field: self.field.clone(), coeffs }
    }

    /// The monic associate; zero stays zero.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some(c) => self.scale(self.field.inv(c).expect("nonzero leading coefficient")),
        }
    }

    pub fn eval(&self, x: FqElem) -> FqElem {
        let f = &self.field;
        self.coeffs.iter().rev().fold(FqElem::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut acc = Poly::one(&self.field);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Euclidean division: `self = quot * other + rem` with `deg rem < deg other`.
    pub fn divmod(&self, other: &Poly) -> Result<(Poly, Poly)> {
        let f = &self.field;
        let db = other.degree().ok_or_else(|| Error::domain("polynomial division by zero"))?;
        let lead_inv = f.inv(other.coeffs[db])?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= db {
            return Ok((Poly::zero(f), self.clone()));
        }
        let mut quot = vec![FqElem::ZERO; rem.len() - db];
        for k in (db..rem.len()).rev() {
            let c = rem[k];
            if c.is_zero() {
                continue;
            }
            let factor = f.mul(c, lead_inv);
            quot[k - db] = factor;
            for (i, &b) in other.coeffs.iter().enumerate() {
                let idx = k - db + i;
                rem[idx] = f.sub(rem[idx], f.mul(factor, b));
            }
        }
        rem.truncate(db);
        Ok((Poly::new(f, quot), Poly::new(f, rem)))
    }

    pub fn rem(&self, other: &Poly) -> Result<Poly> {
        Ok(self.divmod(other)?.1)
    }

    /// Exact quotient; fails unless `other` divides `self`.
    pub fn div_exact(&self, other: &Poly) -> Result<Poly> {
        let (q, r) = self.divmod(other)?;
        if !r.is_zero() {
            return Err(Error::domain(format!("{other} does not divide {self}")));
        }
        Ok(q)
    }

    pub fn divides(&self, other: &Poly) -> bool {
        !self.is_zero() && other.rem(self).is_ok_and(|r| r.is_zero())
    }

    /// Monic gcd (zero only when both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b).expect("b is nonzero");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: `(g, s, t)` with `s*self + t*other = g`, `g` monic.
    pub fn xgcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let f = &self.field;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(f), Poly::zero(f));
        let (mut t0, mut t1) = (Poly::zero(f), Poly::one(f));
        while !r1.is_zero() {
            let (quot, rem) = r0.divmod(&r1).expect("r1 is nonzero");
            r0 = std::mem::replace(&mut r1, rem);
            let s2 = &s0 - &(&quot * &s1);
            s0 = std::mem::replace(&mut s1, s2);
            let t2 = &t0 - &(&quot * &t1);
            t0 = std::mem::replace(&mut t1, t2);
        }
        match r0.leading() {
            None => (r0, s0, t0),
            Some(c) => {
                let inv = f.inv(c).expect("nonzero");
                (r0.scale(inv), s0.scale(inv), t0.scale(inv))
            }
        }
    }

    /// Monic least common multiple.
    pub fn lcm(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.field);
        }
        let g = self.gcd(other);
        (self * &other.div_exact(&g).expect("gcd divides")).monic()
    }

    /// Irreducibility by trial division against all monic polynomials of
    /// degree at most half the degree.
    pub fn is_irreducible(&self) -> bool {
        let Some(d) = self.degree() else { return false };
        if d == 0 {
            return false;
        }
        (1..=d / 2).all(|k| enumerate_monics(&self.field, k).all(|m| !m.divides(self)))
    }

    /// Factorization into monic irreducibles with multiplicities, by trial
    /// division in order of increasing degree; the unit factor is dropped.
    pub fn factor(&self) -> Vec<(Poly, u32)> {
        let mut rest = self.monic();
        let mut out = Vec::new();
        let mut d = 1;
        while rest.deg() >= 2 * d as i64 {
            for m in enumerate_monics(&self.field, d) {
                let mut e = 0;
                while m.divides(&rest) {
                    rest = rest.div_exact(&m).expect("divides");
                    e += 1;
                }
                if e > 0 {
                    out.push((m, e));
                }
            }
            d += 1;
        }
        if rest.deg() >= 1 {
            match out.iter_mut().find(|(m, _)| *m == rest) {
                Some((_, e)) => *e += 1,
                None => out.push((rest, 1)),
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Canonical text, with a custom variable name (the default is `t`).
    pub fn format_in(&self, var: &str) -> String {
        let f = &self.field;
        let mut terms = Vec::new();
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            let cs = f.format_elem(c);
            let cs = if k > 0 && cs.contains('+') { format!("({cs})") } else { cs };
            terms.push(match (k, c == FqElem::ONE) {
                (0, _) => cs,
                (_, true) => mono,
                _ => format!("{cs}*{mono}"),
            });
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }

    /// Integer code `sum c_i q^i` of the coefficient vector.
    pub fn code(&self) -> u64 {
        let q = self.field.q() as u64;
        self.coeffs.iter().rev().fold(0u64, |acc, c| acc * q + c.code() as u64)
    }

    /// Inverse of [`Poly::code`].
    pub fn from_code(field: &Fq, mut code: u64) -> Poly {
        let q = field.q() as u64;
        let mut coeffs = Vec::new();
        while code > 0 {
            coeffs.push(field.from_code((code % q) as u32).expect("digit below q"));
            code /= q;
        }
        Poly::new(field, coeffs)
    }

    fn zip_with(&self, other: &Poly, op: impl Fn(FqElem, FqElem) -> FqElem) -> Poly {
        assert_eq!(self.field, other.field, "polynomials over different fields");
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| op(self.coeff(k), other.coeff(k))).collect();
        Poly::new(&self.field, coeffs)
    }
}

/// The `q^d` monic polynomials of degree `d`, ordered by the code of their
/// lower coefficients (so `t^d` first).
pub fn enumerate_monics(field: &Fq, d: usize) -> impl Iterator<Item = Poly> + '_ {
    let q = field.q() as u64;
    let count = q.checked_pow(d as u32).expect("enumeration size overflows u64");
    (0..count).map(move |code| {
        let mut p = Poly::from_code(field, code).coeffs;
        p.resize(d, FqElem::ZERO);
        p.push(FqElem::ONE);
        Poly { field: field.clone(), coeffs: p }
    })
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.field == other.field
    }
}

impl Eq for Poly {}

impl Hash for Poly {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree first, then coefficients from the top down.
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_in("t"))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let f = self.field.clone();
        self.zip_with(rhs, |a, b| f.add(a, b))
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let f = self.field.clone();
        self.zip_with(rhs, |a, b| f.sub(a, b))
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let f = &self.field;
        Poly::new(f, self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.field, rhs.field, "polynomials over different fields");
        let f = &self.field;
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(f);
        }
        let mut out = vec![FqElem::ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::new(f, out)
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    )*};
}

forward_owned!(Add::add, Sub::sub, Mul::mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}
