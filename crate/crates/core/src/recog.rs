//! Recognizing truncated Laurent series as rational functions, and using that
//! to certify Gamma-value relations.
//!
//! A series `w^v u(w)` with `u(0) != 0` is handed to the extended Euclidean
//! algorithm on `(w^n, u mod w^n)`; the first remainder of degree at most
//! `dmax` gives `u ≡ P/Q mod w^n`. Substituting `w = 1/x` turns `P/Q` into a
//! rational function of `x` (`theta` or `eta`).

use std::fmt;

use serde::Serialize;

use crate::bracket::{is_bracket_relation, sigma_plus, ExponentVector};
use crate::error::{Error, Result};
use crate::ffpoly::{Fq, FqElem, Poly};
use crate::laurent::{LaurentSeries, Var};
use crate::special_values::{carlitz_period, gamma_eta, RationalArg};

/// Default degree bound for certification.
pub const DEFAULT_DMAX: usize = 8;

/// `x^shift N(x) / D(x)` with `N(0) != 0`, `D(0) != 0`, `D` monic,
/// `gcd(N, D) = 1`, where `x` is the inverse of the series uniformizer.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalCandidate {
    pub var: Var,
    pub num: Poly,
    pub den: Poly,
    pub shift: i64,
}

#[derive(Serialize)]
struct CandidateJson {
    num: String,
    den: String,
    var: &'static str,
}

impl RationalCandidate {
    /// Numerator with the positive part of the shift folded in.
    pub fn numerator(&self) -> Poly {
        self.num.shift(self.shift.max(0) as usize)
    }

    /// Denominator with the negative part of the shift folded in.
    pub fn denominator(&self) -> Poly {
        self.den.shift((-self.shift).max(0) as usize)
    }

    /// The candidate re-expanded as a series to absolute precision `prec`.
    pub fn expand(&self, prec: i64) -> Result<LaurentSeries> {
        LaurentSeries::from_rational(&self.numerator(), &self.denominator(), self.var, prec)
    }

    pub fn is_one(&self) -> bool {
        self.shift == 0 && self.num.is_one() && self.den.is_one()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let x = self.var.base_name();
        serde_json::to_value(CandidateJson {
            num: self.numerator().format_in(x),
            den: self.denominator().format_in(x),
            var: x,
        })
        .expect("serializable")
    }
}

impl fmt::Display for RationalCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let x = self.var.base_name();
        write!(f, "({})/({})", self.numerator().format_in(x), self.denominator().format_in(x))
    }
}

impl fmt::Debug for RationalCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalCandidate[{self}]")
    }
}

fn reverse(p: &Poly) -> Poly {
    let mut c = p.coeffs().to_vec();
    c.reverse();
    Poly::new(p.field(), c)
}

/// Rational reconstruction with numerator and denominator degree at most
/// `dmax`. Needs at least `2 dmax + 2` known coefficients past the valuation.
/// `None` means no such rational function matches every known coefficient.
pub fn pade_reconstruct(s: &LaurentSeries, dmax: usize) -> Result<Option<RationalCandidate>> {
    let field = s.field();
    let v = s.valuation()?;
    let n = s.rel_precision();
    let needed = 2 * dmax + 2;
    if n < needed {
        return Err(Error::InsufficientPrecision { needed: v + needed as i64, available: s.precision() });
    }
    let u = Poly::new(field, (0..n as i64).map(|k| s.coeff(v + k)).collect::<Result<Vec<_>>>()?);
    let (p, q) = match half_gcd_stop(field, n, &u, dmax) {
        Some(pq) => pq,
        None => return Ok(None),
    };
    if q.coeff(0).is_zero() || p.deg() > dmax as i64 || q.deg() > dmax as i64 {
        return Ok(None);
    }
    let g = p.gcd(&q);
    let (p, q) = (p.div_exact(&g)?, q.div_exact(&g)?);
    // P/Q must reproduce every known coefficient
    let n = n as i64;
    let check = w_series(&p, n).mul(&w_series(&q, n).inv()?)?;
    if !check.eq_to_precision(&w_series(&u, n), n)? {
        return Ok(None);
    }
    // w = 1/x: P(1/x)/Q(1/x) = x^{dQ - dP} P*(x)/Q*(x)
    let (num, den) = (reverse(&p), reverse(&q));
    let lead = den.leading().expect("nonzero");
    let inv = field.inv(lead)?;
    Ok(Some(RationalCandidate {
        var: s.var(),
        num: num.scale(inv),
        den: den.scale(inv),
        shift: q.deg() - p.deg() - v,
    }))
}

/// A polynomial in `w` as a power series known below `w^n`.
fn w_series(p: &Poly, n: i64) -> LaurentSeries {
    let terms: Vec<_> = p.coeffs().iter().enumerate().map(|(k, &c)| (k as i64, c)).collect();
    LaurentSeries::from_terms(p.field(), Var::ThetaInv, &terms, n)
}

/// Runs Euclid on `(w^n, u)` until the remainder has degree `<= dmax`;
/// returns `(remainder, cofactor of u)`.
fn half_gcd_stop(field: &Fq, n: usize, u: &Poly, dmax: usize) -> Option<(Poly, Poly)> {
    let mut r0 = Poly::monomial(field, FqElem::ONE, n);
    let mut r1 = u.clone();
    let mut t0 = Poly::zero(field);
    let mut t1 = Poly::one(field);
    while r1.deg() > dmax as i64 {
        let (quo, rem) = r0.divmod(&r1).ok()?;
        let t2 = &t0 - &(&quo * &t1);
        r0 = std::mem::replace(&mut r1, rem);
        t0 = std::mem::replace(&mut t1, t2);
    }
    (!r1.is_zero()).then_some((r1, t1))
}

/// The ratio `prod Gamma(a/f)^{m_a} / pi^{Sigma_+(m)}` in `1/eta`, known to
/// `rel_prec` coefficients past its valuation.
pub fn relation_ratio(m: &ExponentVector, rel_prec: usize) -> Result<LaurentSeries> {
    let field = m.field().clone();
    let f = m.modulus();
    let sigma = sigma_plus(m);
    let mut work = rel_prec as i64 + 2 * field.q() as i64 + 8;
    for _ in 0..12 {
        let mut acc = carlitz_period(&field, work).pow(-sigma)?;
        for (a, e) in m.entries() {
            let z = RationalArg::new(a.rep(), f)?;
            acc = acc.mul(&gamma_eta(&z, work)?.pow(e)?)?;
        }
        if acc.rel_precision() >= rel_prec {
            let v = acc.valuation()?;
            return Ok(acc.truncate(v + rel_prec as i64));
        }
        work += (rel_prec - acc.rel_precision()) as i64 + 8;
    }
    Err(Error::NonConvergence(format!("relation ratio for {m} stuck below {rel_prec} coefficients")))
}

/// Outcome of certifying a bracket relation numerically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertReport {
    /// A candidate was found at the lower precision.
    pub recognized: bool,
    /// The same candidate reproduces the ratio at twice the precision.
    pub stable: bool,
    /// Present only when stable.
    pub candidate: Option<RationalCandidate>,
    pub prec_used: (usize, usize),
    /// The degree bound that produced the candidate.
    pub dmax_used: Option<usize>,
}

#[derive(Serialize)]
struct CertJson {
    recognized: bool,
    stable: bool,
    candidate: Option<serde_json::Value>,
    prec_used: [usize; 2],
}

impl CertReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(CertJson {
            recognized: self.recognized,
            stable: self.stable,
            candidate: self.candidate.as_ref().map(RationalCandidate::to_json),
            prec_used: [self.prec_used.0, self.prec_used.1],
        })
        .expect("serializable")
    }
}

/// Computes the relation ratio with `prec` and `2 prec` known coefficients and
/// tries to recognize it in `F_q(eta)`, first with degree bound `dmax`, then
/// (if precision allows) `2 dmax`. Non-relations are rejected.
pub fn certify_relation(m: &ExponentVector, prec: usize, dmax: usize) -> Result<CertReport> {
    let report = is_bracket_relation(m)?;
    if !report.is_relation {
        let w = report.witness.map(|w| w.to_string()).unwrap_or_default();
        return Err(Error::domain(format!("{m} is not a bracket relation (witness u = {w})")));
    }
    if prec < 2 * dmax + 2 {
        return Err(Error::InsufficientPrecision { needed: 2 * dmax as i64 + 2, available: prec as i64 });
    }
    let lo = relation_ratio(m, prec)?;
    let mut found = None;
    for d in [dmax, 2 * dmax] {
        if prec < 2 * d + 2 {
            break;
        }
        if let Some(c) = pade_reconstruct(&lo, d)? {
            found = Some((c, d));
            break;
        }
    }
    let Some((cand, d)) = found else {
        return Ok(CertReport { recognized: false, stable: false, candidate: None, prec_used: (prec, 2 * prec), dmax_used: None });
    };
    let hi = relation_ratio(m, 2 * prec)?;
    let stable = pade_reconstruct(&hi, d)?.as_ref() == Some(&cand);
    Ok(CertReport {
        recognized: true,
        stable,
        candidate: stable.then_some(cand),
        prec_used: (prec, 2 * prec),
        dmax_used: Some(d),
    })
}
