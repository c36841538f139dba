//! The finite field `F_q`, `q = p^r`, realized as `F_p[g]/(m(g))` for an
//! explicit monic irreducible `m`.
//!
//! Elements are stored as a single integer code: the coordinates in the power
//! basis `1, g, ..., g^{r-1}` read as base-`p` digits. Multiplication goes
//! through discrete log tables built once per field.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest field size accepted by [`Fq`].
pub const MAX_FIELD_SIZE: u32 = 1 << 16;

/// Conway polynomials for the non-prime fields of size at most 64,
/// coefficients lowest degree first.
const CONWAY: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (2, 5, &[1, 0, 1, 0, 0, 1]),
    (2, 6, &[1, 1, 0, 1, 1, 0, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (5, 2, &[2, 4, 1]),
    (7, 2, &[3, 6, 1]),
];

/// An element of `F_q`, meaningful only together with the [`Fq`] that made it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FqElem(u32);

impl FqElem {
    pub const ZERO: FqElem = FqElem(0);
    pub const ONE: FqElem = FqElem(1);

    /// Integer code of the element (base-`p` digits are its coordinates).
    #[inline]
    pub fn code(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct FqInner {
    p: u32,
    r: u32,
    q: u32,
    modulus: Vec<u32>,
    symbol: String,
    /// `exp[i] = gen^i` for `0 <= i < 2(q-1)`, doubled to skip a reduction.
    exp: Vec<u32>,
    /// `log[x]` for nonzero `x`; `log[0]` is unused.
    log: Vec<u32>,
}

/// A finite field `F_{p^r}`. Cloning is cheap (shared tables).
#[derive(Clone)]
pub struct Fq(Arc<FqInner>);

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fq({}", self.q())?;
        if self.r() > 1 {
            write!(f, ", {}", self.format_modulus())?;
        }
        write!(f, ")")
    }
}

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Fq {}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^r` with `p` prime.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let (mut n, mut r) = (q, 0);
    while n % p == 0 {
        n /= p;
        r += 1;
    }
    (n == 1).then_some((p, r))
}

// Small dense polynomials over F_p, used only while building a field.
fn fp_trim(mut v: Vec<u32>) -> Vec<u32> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn fp_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut a = fp_trim(a.to_vec());
    let db = b.len() - 1;
    let lead_inv = fp_pow(b[db], p - 2, p);
    while a.len() > db {
        let da = a.len() - 1;
        let c = a[da] * lead_inv % p;
        for (i, &bi) in b.iter().enumerate() {
            let idx = da - db + i;
            a[idx] = (a[idx] + p - c * bi % p) % p;
        }
        a = fp_trim(a);
    }
    a
}

fn fp_pow(mut b: u32, mut e: u32, p: u32) -> u32 {
    let mut acc = 1u64;
    let mut base = b as u64 % p as u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    b = acc as u32;
    b
}

fn fp_is_irreducible(m: &[u32], p: u32) -> bool {
    let deg = m.len() - 1;
    for d in 1..=deg / 2 {
        // every monic polynomial of degree d
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let mut div = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                div.push((c % p as u64) as u32);
                c /= p as u64;
            }
            div.push(1);
            if fp_rem(m, &div, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl Fq {
    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Fq> {
        Fq::with_modulus(p, &[0, 1], "g")
    }

    /// `F_q` with the built-in defining polynomial (prime `q`, or a
    /// Conway polynomial for `q <= 64`).
    pub fn new(q: u32) -> Result<Fq> {
        let (p, r) = prime_power(q).ok_or_else(|| Error::domain(format!("{q} is not a prime power")))?;
        if r == 1 {
            return Fq::prime(p);
        }
        let (_, _, m) = CONWAY
            .iter()
            .find(|(cp, cr, _)| *cp == p && *cr == r)
            .ok_or_else(|| Error::domain(format!("no built-in modulus for q = {q}; supply one")))?;
        Fq::with_modulus(p, m, "g")
    }

    /// `F_p[g]/(modulus)`; `modulus` is monic over `F_p`, lowest degree first.
    pub fn with_modulus(p: u32, modulus: &[u32], symbol: &str) -> Result<Fq> {
        if !is_prime(p) {
            return Err(Error::domain(format!("characteristic {p} is not prime")));
        }
        let modulus = fp_trim(modulus.iter().map(|c| c % p).collect());
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 {
            return Err(Error::domain("field modulus must be monic of degree >= 1"));
        }
        let r = (modulus.len() - 1) as u32;
        let q = (p as u64).checked_pow(r).filter(|&q| q <= MAX_FIELD_SIZE as u64).ok_or_else(|| {
            Error::guard(format!("field size {p}^{r} exceeds {MAX_FIELD_SIZE}"))
        })? as u32;
        if !fp_is_irreducible(&modulus, p) {
            return Err(Error::domain("field modulus is reducible over F_p"));
        }
        let mut inner = FqInner { p, r, q, modulus, symbol: symbol.to_string(), exp: Vec::new(), log: Vec::new() };
        inner.build_tables();
        Ok(Fq(Arc::new(inner)))
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.0.p
    }

    #[inline]
    pub fn r(&self) -> u32 {
        self.0.r
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.0.q
    }

    /// Defining polynomial over `F_p`, lowest degree first.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn symbol(&self) -> &str {
        &self.0.symbol
    }

    /// The class of `g`, or `None` for a prime field.
    pub fn generator(&self) -> Option<FqElem> {
        (self.r() > 1).then_some(FqElem(self.p()))
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FqElem {
        FqElem(n.rem_euclid(self.p() as i64) as u32)
    }

    /// Element with the given power-basis coordinates.
    pub fn from_coords(&self, coords: &[u32]) -> Result<FqElem> {
        if coords.len() > self.r() as usize {
            return Err(Error::domain("too many coordinates for this field"));
        }
        let mut code = 0u32;
        for &c in coords.iter().rev() {
            if c >= self.p() {
                return Err(Error::domain(format!("coordinate {c} not reduced mod {}", self.p())));
            }
            code = code * self.p() + c;
        }
        Ok(FqElem(code))
    }

    pub fn coords(&self, a: FqElem) -> Vec<u32> {
        let p = self.p();
        let mut c = a.0;
        (0..self.r())
            .map(|_| {
                let d = c % p;
                c /= p;
                d
            })
            .collect()
    }

    /// Element from a raw code in `0..q`.
    pub fn from_code(&self, code: u32) -> Result<FqElem> {
        if code >= self.q() {
            return Err(Error::domain(format!("element code {code} out of range for q = {}", self.q())));
        }
        Ok(FqElem(code))
    }

    /// All field elements in code order (`0, 1, ..`).
    pub fn elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.q()).map(FqElem)
    }

    /// The nonzero elements in code order.
    pub fn units(&self) -> impl Iterator<Item = FqElem> {
        (1..self.q()).map(FqElem)
    }

    #[inline]
    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        let p = self.0.p;
        if self.0.r == 1 {
            let s = a.0 + b.0;
            return FqElem(if s >= p { s - p } else { s });
        }
        if p == 2 {
            return FqElem(a.0 ^ b.0);
        }
        let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0u32, 1u32);
        while x > 0 || y > 0 {
            out += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        FqElem(out)
    }

    #[inline]
    pub fn neg(&self, a: FqElem) -> FqElem {
        let p = self.0.p;
        if self.0.r == 1 {
            return FqElem(if a.0 == 0 { 0 } else { p - a.0 });
        }
        if p == 2 {
            return a;
        }
        let (mut x, mut out, mut place) = (a.0, 0u32, 1u32);
        while x > 0 {
            out += ((p - x % p) % p) * place;
            x /= p;
            place *= p;
        }
        FqElem(out)
    }

    #[inline]
    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        if a.0 == 0 || b.0 == 0 {
            return FqElem::ZERO;
        }
        if self.0.r == 1 {
            return FqElem(((a.0 as u64 * b.0 as u64) % self.0.p as u64) as u32);
        }
        let inner = &self.0;
        FqElem(inner.exp[(inner.log[a.0 as usize] + inner.log[b.0 as usize]) as usize])
    }

    pub fn inv(&self, a: FqElem) -> Result<FqElem> {
        if a.0 == 0 {
            return Err(Error::domain("inverse of zero in F_q"));
        }
        let inner = &self.0;
        let l = inner.log[a.0 as usize];
        Ok(FqElem(inner.exp[((inner.q - 1 - l) % (inner.q - 1)) as usize]))
    }

    pub fn div(&self, a: FqElem, b: FqElem) -> Result<FqElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FqElem, e: u64) -> FqElem {
        if e == 0 {
            return FqElem::ONE;
        }
        if a.0 == 0 {
            return FqElem::ZERO;
        }
        let inner = &self.0;
        let order = (inner.q - 1) as u64;
        let l = (inner.log[a.0 as usize] as u64 * (e % order)) % order;
        FqElem(inner.exp[l as usize])
    }

    /// `a^{p^k}`.
    pub fn frobenius(&self, a: FqElem, k: u32) -> FqElem {
        let k = k % self.r();
        if k == 0 {
            return a;
        }
        self.pow(a, (self.p() as u64).pow(k))
    }

    /// Canonical text for an element: an integer in a prime field, otherwise a
    /// polynomial in the generator symbol, highest power first.
    pub fn format_elem(&self, a: FqElem) -> String {
        if self.r() == 1 {
            return a.0.to_string();
        }
        let coords = self.coords(a);
        let mut terms = Vec::new();
        for (k, &c) in coords.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => self.symbol().to_string(),
                _ => format!("{}^{}", self.symbol(), k),
            };
            terms.push(match (c, k) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}*{mono}"),
            });
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }

    /// The defining polynomial printed in the generator symbol.
    pub fn format_modulus(&self) -> String {
        let mut terms = Vec::new();
        for (k, &c) in self.modulus().iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => self.symbol().to_string(),
                _ => format!("{}^{}", self.symbol(), k),
            };
            terms.push(match (c, k) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}*{mono}"),
            });
        }
        terms.join("+")
    }
}

impl FqInner {
    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let (p, r) = (self.p, self.r as usize);
        let digits = |mut x: u32| {
            (0..r)
                .map(|_| {
                    let d = x % p;
                    x /= p;
                    d
                })
                .collect::<Vec<_>>()
        };
        let (da, db) = (digits(a), digits(b));
        let mut prod = vec![0u32; 2 * r - 1];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        let rem = fp_rem(&prod, &self.modulus, p);
        rem.iter().rev().fold(0, |acc, &d| acc * p + d)
    }

    fn slow_pow(&self, a: u32, mut e: u64) -> u32 {
        let (mut acc, mut base) = (1u32, a);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.slow_mul(acc, base);
            }
            base = self.slow_mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn build_tables(&mut self) {
        let order = self.q - 1;
        let mut primes = Vec::new();
        let mut n = order;
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                primes.push(d);
                while n % d == 0 {
                    n /= d;
                }
            }
            d += 1;
        }
        if n > 1 {
            primes.push(n);
        }
        let gen = (1..self.q)
            .find(|&x| primes.iter().all(|&l| self.slow_pow(x, (order / l) as u64) != 1))
            .expect("multiplicative group of a finite field is cyclic");
        let mut exp = vec![0u32; 2 * order as usize];
        let mut log = vec![0u32; self.q as usize];
        let mut x = 1u32;
        for i in 0..order {
            exp[i as usize] = x;
            exp[(i + order) as usize] = x;
            log[x as usize] = i;
            x = self.slow_mul(x, gen);
        }
        self.exp = exp;
        self.log = log;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axioms_exhaustive(f: &Fq) {
        let elems: Vec<_> = f.elements().collect();
        for &a in &elems {
            assert_eq!(f.add(a, f.neg(a)), FqElem::ZERO);
            if !a.is_zero() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), FqElem::ONE);
            }
            for &b in &elems {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for &c in &elems {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                }
            }
        }
    }

    #[test]
    fn field_axioms_small_fields() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            axioms_exhaustive(&Fq::new(q).unwrap());
        }
    }

    #[test]
    fn field_axioms_sampled_up_to_64() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for q in [11, 13, 16, 25, 27, 32, 49, 64] {
            let f = Fq::new(q).unwrap();
            for _ in 0..2000 {
                let a = FqElem(rng.gen_range(0..q));
                let b = FqElem(rng.gen_range(0..q));
                let c = FqElem(rng.gen_range(0..q));
                assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                assert_eq!(f.sub(f.add(a, b), b), a);
                if !a.is_zero() {
                    assert_eq!(f.div(f.mul(a, b), a).unwrap(), b);
                }
            }
        }
    }

    #[test]
    fn small_examples() {
        let f3 = Fq::new(3).unwrap();
        assert_eq!(f3.inv(f3.from_int(2)).unwrap(), f3.from_int(2));
        let f4 = Fq::new(4).unwrap();
        let g = f4.generator().unwrap();
        assert_eq!(f4.format_elem(f4.mul(g, g)), "g+1");
        let f5 = Fq::new(5).unwrap();
        assert_eq!(f5.pow(f5.from_int(2), 4), FqElem::ONE);
    }

    #[test]
    fn inverse_of_zero_is_domain_error() {
        let f = Fq::new(9).unwrap();
        assert!(matches!(f.inv(FqElem::ZERO), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_bad_moduli() {
        assert!(Fq::with_modulus(2, &[1, 0, 1], "g").is_err()); // (g+1)^2
        assert!(Fq::with_modulus(4, &[1, 1], "g").is_err());
        assert!(Fq::new(6).is_err());
        let mut big = vec![0u32; 18];
        big[0] = 1;
        big[3] = 1;
        big[17] = 1;
        assert!(matches!(Fq::with_modulus(2, &big, "g"), Err(Error::ResourceGuard(_))));
        assert!(matches!(Fq::new(81), Err(Error::Domain(_))));
    }

    #[test]
    fn frobenius_is_p_power() {
        let f = Fq::new(27).unwrap();
        for a in f.elements() {
            assert_eq!(f.frobenius(a, 1), f.pow(a, 3));
            assert_eq!(f.frobenius(a, 3), a);
        }
    }

    #[test]
    fn prime_power_split() {
        assert_eq!(prime_power(64), Some((2, 6)));
        assert_eq!(prime_power(49), Some((7, 2)));
        assert_eq!(prime_power(12), None);
    }
}
