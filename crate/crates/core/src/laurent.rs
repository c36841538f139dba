//! Truncated Laurent series over `F_q` in one of two uniformizers: `w = 1/theta`
//! (the completion of `F_q(theta)` at infinity) or `w = 1/eta` with
//! `eta^{q-1} = -theta`, the totally ramified extension containing the
//! Carlitz period.
//!
//! Precision is absolute: a series knows its coefficients at every exponent
//! below a cutoff `P`, written `O(w^P)`. Arithmetic propagates the cutoff
//! exactly, e.g. a product of `a + O(w^{Pa})` and `b + O(w^{Pb})` is known
//! below `min(Pa + val b, Pb + val a)`. A series with no nonzero known
//! coefficient is *zero to precision*, which is not the same as zero: its
//! valuation is unknown and asking for it is an error.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffpoly::{parse_elem, Fq, FqElem, Poly};

/// Precision cutoffs are clamped to this magnitude so that Frobenius powers of
/// huge-valuation series cannot overflow.
const PREC_LIMIT: i64 = 1 << 48;

/// Which uniformizer a series is expanded in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    /// `w = 1/theta`.
    #[serde(rename = "1/theta")]
    ThetaInv,
    /// `w = 1/eta`, `eta^{q-1} = -theta`.
    #[serde(rename = "1/eta")]
    EtaInv,
}

impl Var {
    /// Name of the inverse of the uniformizer (`theta` or `eta`).
    pub fn base_name(self) -> &'static str {
        match self {
            Var::ThetaInv => "theta",
            Var::EtaInv => "eta",
        }
    }

    pub fn json_name(self) -> &'static str {
        match self {
            Var::ThetaInv => "1/theta",
            Var::EtaInv => "1/eta",
        }
    }
}

/// `sum_k coeffs[k] w^{start + k} + O(w^{start + coeffs.len()})`.
///
/// Invariant: `coeffs` is empty (zero to precision `O(w^start)`) or
/// `coeffs[0] != 0`.
#[derive(Clone)]
pub struct LaurentSeries {
    field: Fq,
    var: Var,
    start: i64,
    coeffs: Vec<FqElem>,
}

/// Wire form: `{"var":..,"q":..,"terms":[[exp,"coeff"],..],"prec":..}`,
/// nonzero terms only, exponents ascending, `prec` the absolute cutoff.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub var: Var,
    pub q: u32,
    pub terms: Vec<(i64, String)>,
    pub prec: i64,
}

fn clamp(p: i64) -> i64 {
    p.clamp(-PREC_LIMIT, PREC_LIMIT)
}

impl LaurentSeries {
    /// Normalizing constructor: leading zeros are absorbed into `start`.
    pub fn new(field: &Fq, var: Var, start: i64, coeffs: Vec<FqElem>) -> LaurentSeries {
        let lead = coeffs.iter().position(|c| !c.is_zero()).unwrap_or(coeffs.len());
        let start = start + lead as i64;
        let coeffs = if lead == 0 { coeffs } else { coeffs[lead..].to_vec() };
        LaurentSeries { field: field.clone(), var, start, coeffs }
    }

    /// `O(w^prec)`.
    pub fn zero(field: &Fq, var: Var, prec: i64) -> LaurentSeries {
        LaurentSeries { field: field.clone(), var, start: clamp(prec), coeffs: Vec::new() }
    }

    pub fn one(field: &Fq, var: Var, prec: i64) -> LaurentSeries {
        LaurentSeries::monomial(field, var, FqElem::ONE, 0, prec)
    }

    /// `c w^k + O(w^prec)`.
    pub fn monomial(field: &Fq, var: Var, c: FqElem, k: i64, prec: i64) -> LaurentSeries {
        LaurentSeries::from_terms(field, var, &[(k, c)], prec)
    }

    /// Sum of the given terms, truncated at `prec`.
    pub fn from_terms(field: &Fq, var: Var, terms: &[(i64, FqElem)], prec: i64) -> LaurentSeries {
        let start = terms.iter().filter(|(_, c)| !c.is_zero()).map(|(k, _)| *k).min().unwrap_or(prec).min(prec);
        let mut coeffs = vec![FqElem::ZERO; (prec - start).max(0) as usize];
        for &(k, c) in terms {
            if k < prec && !c.is_zero() {
                let slot = &mut coeffs[(k - start) as usize];
                *slot = field.add(*slot, c);
            }
        }
        LaurentSeries::new(field, var, start, coeffs)
    }

    /// A polynomial in the inverse variable (`theta` for [`Var::ThetaInv`],
    /// `eta` for [`Var::EtaInv`]): `x^j` becomes `w^{-j}`.
    pub fn from_poly(poly: &Poly, var: Var, prec: i64) -> LaurentSeries {
        let terms: Vec<_> = poly.coeffs().iter().enumerate().map(|(j, &c)| (-(j as i64), c)).collect();
        LaurentSeries::from_terms(poly.field(), var, &terms, prec)
    }

    /// `num / den` expanded to absolute precision `prec`.
    pub fn from_rational(num: &Poly, den: &Poly, var: Var, prec: i64) -> Result<LaurentSeries> {
        if den.is_zero() {
            return Err(Error::domain("rational function with zero denominator"));
        }
        if num.is_zero() {
            return Ok(LaurentSeries::zero(num.field(), var, prec));
        }
        // val(num/den) = deg den - deg num; each side needs enough relative precision
        let v = den.deg() - num.deg();
        let d = LaurentSeries::from_poly(den, var, prec + 2 * den.deg() + 1);
        let n = LaurentSeries::from_poly(num, var, prec - v + num.deg() + 1);
        Ok(n.mul(&d.inv()?)?.truncate(prec))
    }

    pub fn field(&self) -> &Fq {
        &self.field
    }

    pub fn var(&self) -> Var {
        self.var
    }

    /// Absolute precision: coefficients are known at all exponents below this.
    pub fn precision(&self) -> i64 {
        self.start + self.coeffs.len() as i64
    }

    /// Number of known coefficients counted from the leading term.
    pub fn rel_precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero_to_precision(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exponent of the lowest nonzero term.
    pub fn valuation(&self) -> Result<i64> {
        if self.coeffs.is_empty() {
            return Err(Error::ZeroToPrecision { prec: self.start });
        }
        Ok(self.start)
    }

    pub fn leading_coeff(&self) -> Result<FqElem> {
        self.coeffs.first().copied().ok_or(Error::ZeroToPrecision { prec: self.start })
    }

    /// Coefficient of `w^k`; fails if `k` is at or beyond the precision.
    pub fn coeff(&self, k: i64) -> Result<FqElem> {
        if k >= self.precision() {
            return Err(Error::InsufficientPrecision { needed: k + 1, available: self.precision() });
        }
        Ok(self.coeff_unchecked(k))
    }

    fn coeff_unchecked(&self, k: i64) -> FqElem {
        if k < self.start {
            FqElem::ZERO
        } else {
            self.coeffs.get((k - self.start) as usize).copied().unwrap_or(FqElem::ZERO)
        }
    }

    /// Nonzero known terms `(exponent, coefficient)`, ascending.
    pub fn terms(&self) -> impl Iterator<Item = (i64, FqElem)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(k, &c)| (self.start + k as i64, c))
    }

    /// Lowers the precision to `min(self.precision(), prec)`.
    pub fn truncate(&self, prec: i64) -> LaurentSeries {
        if prec >= self.precision() {
            return self.clone();
        }
        let keep = (prec - self.start).max(0) as usize;
        LaurentSeries::new(&self.field, self.var, self.start.min(prec), self.coeffs[..keep].to_vec())
    }

    fn check_compatible(&self, other: &LaurentSeries) -> Result<()> {
        if self.var != other.var {
            return Err(Error::domain(format!(
                "series in different uniformizers ({} vs {})",
                self.var.json_name(),
                other.var.json_name()
            )));
        }
        if self.field != other.field {
            return Err(Error::domain("series over different fields"));
        }
        Ok(())
    }

    fn combine(&self, other: &LaurentSeries, negate_other: bool) -> Result<LaurentSeries> {
        self.check_compatible(other)?;
        let f = &self.field;
        let prec = self.precision().min(other.precision());
        let start = self.start.min(other.start).min(prec);
        let mut out = vec![FqElem::ZERO; (prec - start) as usize];
        for (k, slot) in out.iter_mut().enumerate() {
            let e = start + k as i64;
            let b = other.coeff_unchecked(e);
            let b = if negate_other { f.neg(b) } else { b };
            *slot = f.add(self.coeff_unchecked(e), b);
        }
        Ok(LaurentSeries::new(f, self.var, start, out))
    }

    pub fn add(&self, other: &LaurentSeries) -> Result<LaurentSeries> {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &LaurentSeries) -> Result<LaurentSeries> {
        self.combine(other, true)
    }

    pub fn neg(&self) -> LaurentSeries {
        self.scale(self.field.neg(FqElem::ONE))
    }

    pub fn scale(&self, c: FqElem) -> LaurentSeries {
        if c.is_zero() {
            return LaurentSeries::zero(&self.field, self.var, self.precision());
        }
        let f = &self.field;
        LaurentSeries { coeffs: self.coeffs.iter().map(|&a| f.mul(a, c)).collect(), ..self.clone() }
    }

    /// Multiplies by `w^k`.
    pub fn shift(&self, k: i64) -> LaurentSeries {
        LaurentSeries { start: clamp(self.start + k), ..self.clone() }
    }

    pub fn mul(&self, other: &LaurentSeries) -> Result<LaurentSeries> {
        self.mul_trunc(other, PREC_LIMIT)
    }

    /// Product truncated at `cap` (cheaper than multiplying then truncating).
    pub fn mul_trunc(&self, other: &LaurentSeries, cap: i64) -> Result<LaurentSeries> {
        self.check_compatible(other)?;
        let f = &self.field;
        // for a series zero to precision, its start plays the role of the valuation
        let prec = clamp((self.precision() + other.start).min(other.precision() + self.start).min(cap));
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Ok(LaurentSeries::zero(f, self.var, prec));
        }
        let start = self.start + other.start;
        if start >= prec {
            return Ok(LaurentSeries::zero(f, self.var, prec));
        }
        let n = (prec - start) as usize;
        let mut out = vec![FqElem::ZERO; n];
        for (i, &a) in self.coeffs.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(n - i) {
                if !b.is_zero() {
                    out[i + j] = f.add(out[i + j], f.mul(a, b));
                }
            }
        }
        Ok(LaurentSeries::new(f, self.var, start, out))
    }

    /// Multiplicative inverse; keeps the relative precision.
    pub fn inv(&self) -> Result<LaurentSeries> {
        let f = &self.field;
        let lead = self.leading_coeff()?;
        let lead_inv = f.inv(lead)?;
        let n = self.coeffs.len();
        let mut out = vec![FqElem::ZERO; n];
        for k in 0..n {
            let mut s = if k == 0 { FqElem::ONE } else { FqElem::ZERO };
            for j in 1..=k {
                let a = self.coeffs[j];
                if !a.is_zero() {
                    s = f.sub(s, f.mul(a, out[k - j]));
                }
            }
            out[k] = f.mul(s, lead_inv);
        }
        Ok(LaurentSeries::new(f, self.var, -self.start, out))
    }

    pub fn div(&self, other: &LaurentSeries) -> Result<LaurentSeries> {
        self.mul(&other.inv()?)
    }

    /// `self^{p^k}`: coefficients go through Frobenius and exponents scale, so
    /// the precision scales by `p^k` as well. Truncated at `cap`.
    pub fn frobenius_trunc(&self, k: u32, cap: i64) -> LaurentSeries {
        let f = &self.field;
        let factor = (f.p() as i64).checked_pow(k).unwrap_or(PREC_LIMIT);
        let prec = clamp(self.precision().saturating_mul(factor)).min(cap);
        let start = clamp(self.start.saturating_mul(factor));
        if self.coeffs.is_empty() || start >= prec {
            return LaurentSeries::zero(f, self.var, prec);
        }
        let mut out = vec![FqElem::ZERO; (prec - start) as usize];
        for (i, &c) in self.coeffs.iter().enumerate() {
            let idx = i as i64 * factor;
            if idx >= out.len() as i64 {
                break;
            }
            out[idx as usize] = f.frobenius(c, k);
        }
        LaurentSeries::new(f, self.var, start, out)
    }

    pub fn frobenius(&self, k: u32) -> LaurentSeries {
        self.frobenius_trunc(k, PREC_LIMIT)
    }

    /// Integer power; negative exponents invert first. Powers of `p` go
    /// through Frobenius, which loses no precision.
    pub fn pow(&self, e: i64) -> Result<LaurentSeries> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        if e == 0 {
            let rel = self.coeffs.len().max(1) as i64;
            return Ok(LaurentSeries::one(&self.field, self.var, rel));
        }
        let p = self.field.p() as i64;
        let (mut m, mut k) = (e, 0u32);
        while m % p == 0 {
            m /= p;
            k += 1;
        }
        let mut acc: Option<LaurentSeries> = None;
        let mut base = self.clone();
        while m > 0 {
            if m & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base)?,
                });
            }
            m >>= 1;
            if m > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc.expect("e > 0").frobenius(k))
    }

    /// Whether the coefficients at all exponents below `n` agree. Both series
    /// must be known that far.
    pub fn eq_to_precision(&self, other: &LaurentSeries, n: i64) -> Result<bool> {
        self.check_compatible(other)?;
        let available = self.precision().min(other.precision());
        if available < n {
            return Err(Error::InsufficientPrecision { needed: n, available });
        }
        let lo = self.start.min(other.start);
        Ok((lo..n).all(|e| self.coeff_unchecked(e) == other.coeff_unchecked(e)))
    }

    /// Substitutes `1/theta = -(1/eta)^{q-1}` into a `1/theta` series.
    pub fn embed_theta_to_eta(&self) -> Result<LaurentSeries> {
        if self.var != Var::ThetaInv {
            return Err(Error::domain("embedding expects a series in 1/theta"));
        }
        let f = &self.field;
        let e = f.q() as i64 - 1;
        let prec = clamp(self.precision().saturating_mul(e));
        let start = clamp(self.start.saturating_mul(e));
        if self.coeffs.is_empty() {
            return Ok(LaurentSeries::zero(f, Var::EtaInv, prec));
        }
        let mut out = vec![FqElem::ZERO; (prec - start) as usize];
        for (i, &c) in self.coeffs.iter().enumerate() {
            let k = self.start + i as i64;
            out[i * e as usize] = if k.rem_euclid(2) == 1 { f.neg(c) } else { c };
        }
        Ok(LaurentSeries::new(f, Var::EtaInv, start, out))
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            var: self.var,
            q: self.field.q(),
            terms: self.terms().map(|(k, c)| (k, self.field.format_elem(c))).collect(),
            prec: self.precision(),
        }
    }

    pub fn from_json(field: &Fq, json: &SeriesJson) -> Result<LaurentSeries> {
        if json.q != field.q() {
            return Err(Error::domain(format!("series over F_{} read into F_{}", json.q, field.q())));
        }
        let terms = json
            .terms
            .iter()
            .map(|(k, c)| Ok((*k, parse_elem(field, c)?)))
            .collect::<Result<Vec<_>>>()?;
        if terms.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::parse("series terms must be strictly ascending"));
        }
        Ok(LaurentSeries::from_terms(field, json.var, &terms, json.prec))
    }
}

impl PartialEq for LaurentSeries {
    /// Same uniformizer, same precision, same known coefficients.
    fn eq(&self, other: &Self) -> bool {
        self.var == other.var
            && self.field == other.field
            && self.start == other.start
            && self.coeffs == other.coeffs
    }
}

impl Eq for LaurentSeries {}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.terms() {
            let cs = self.field.format_elem(c);
            let cs = if cs.contains('+') { format!("({cs})") } else { cs };
            write!(f, "{cs}*w^{k} + ")?;
        }
        write!(f, "O(w^{}) [w = 1/{}]", self.precision(), self.var.base_name())
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const T: Var = Var::ThetaInv;

    fn series(f: &Fq, start: i64, coeffs: &[u32]) -> LaurentSeries {
        LaurentSeries::new(f, T, start, coeffs.iter().map(|&c| f.from_code(c % f.q()).unwrap()).collect())
    }

    #[test]
    fn from_terms_ignores_explicit_zeros() {
        let f = Fq::new(3).unwrap();
        let s = LaurentSeries::from_terms(&f, T, &[(-2, FqElem::ZERO), (1, FqElem::ONE), (1, FqElem::ONE)], 4);
        assert_eq!(s.valuation().unwrap(), 1);
        assert_eq!(s.coeff(1).unwrap(), f.from_int(2));
        assert!(LaurentSeries::from_terms(&f, T, &[(0, FqElem::ZERO)], 3).is_zero_to_precision());
    }

    #[test]
    fn geometric_series() {
        let f = Fq::new(3).unwrap();
        let one_minus_w = LaurentSeries::from_terms(&f, T, &[(0, FqElem::ONE), (1, f.from_int(-1))], 40);
        let geo = series(&f, 0, &[1; 20]);
        let prod = one_minus_w.mul(&geo).unwrap();
        assert_eq!(prod.precision(), 20);
        assert!(prod.eq_to_precision(&LaurentSeries::one(&f, T, 20), 20).unwrap());
        assert!(one_minus_w.inv().unwrap().eq_to_precision(&geo, 20).unwrap());
    }

    #[test]
    fn inverse_shifts_valuation() {
        let f = Fq::new(5).unwrap();
        let u = series(&f, 0, &[2, 1, 3, 4, 0, 1]);
        let w2u = u.shift(2);
        let lhs = w2u.inv().unwrap();
        let rhs = u.inv().unwrap().shift(-2);
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.valuation().unwrap(), -2);
    }

    #[test]
    fn frobenius_power_in_char_three() {
        let f = Fq::new(3).unwrap();
        let x = series(&f, 0, &[1, 1, 0, 0, 0, 0, 0, 0, 0, 0]);
        let cube = x.pow(3).unwrap();
        assert_eq!(cube.precision(), 30);
        let expected = LaurentSeries::from_terms(&f, T, &[(0, FqElem::ONE), (3, FqElem::ONE)], 30);
        assert_eq!(cube, expected);
        // generic multiplication agrees where both are known
        let slow = x.mul(&x).unwrap().mul(&x).unwrap();
        assert!(slow.eq_to_precision(&cube, slow.precision()).unwrap());
    }

    #[test]
    fn valuation_and_leading_coefficient() {
        let f = Fq::new(3).unwrap();
        let s = LaurentSeries::from_terms(&f, T, &[(3, FqElem::ONE), (5, FqElem::ONE)], 10);
        assert_eq!(s.valuation().unwrap(), 3);
        assert_eq!(s.leading_coeff().unwrap(), FqElem::ONE);
        let theta = LaurentSeries::from_poly(&Poly::t(&f), T, 10);
        assert_eq!(theta.valuation().unwrap(), -1);
        let z = LaurentSeries::zero(&f, T, 7);
        assert_eq!(z.valuation(), Err(Error::ZeroToPrecision { prec: 7 }));
        assert!(z.inv().is_err());
    }

    #[test]
    fn precision_errors_are_distinct() {
        let f = Fq::new(2).unwrap();
        let one = LaurentSeries::one(&f, T, 10);
        let bumped = one.add(&LaurentSeries::monomial(&f, T, FqElem::ONE, 6, 10)).unwrap();
        assert!(one.eq_to_precision(&bumped, 6).unwrap());
        assert!(!one.eq_to_precision(&bumped, 7).unwrap());
        assert!(matches!(one.eq_to_precision(&bumped, 11), Err(Error::InsufficientPrecision { .. })));
        assert!(one.coeff(10).is_err());
    }

    #[test]
    fn mixed_uniformizers_rejected() {
        let f = Fq::new(3).unwrap();
        let a = LaurentSeries::one(&f, Var::ThetaInv, 5);
        let b = LaurentSeries::one(&f, Var::EtaInv, 5);
        assert!(matches!(a.mul(&b), Err(Error::Domain(_))));
        assert!(matches!(a.add(&b), Err(Error::Domain(_))));
        assert!(b.embed_theta_to_eta().is_err());
    }

    #[test]
    fn embedding_examples() {
        for q in [2u32, 3, 4, 5] {
            let f = Fq::new(q).unwrap();
            let inv_theta = LaurentSeries::monomial(&f, T, FqElem::ONE, 1, 20);
            let e = inv_theta.embed_theta_to_eta().unwrap();
            let expected = LaurentSeries::monomial(&f, Var::EtaInv, f.neg(FqElem::ONE), q as i64 - 1, 20 * (q as i64 - 1));
            assert_eq!(e, expected);
            let theta = LaurentSeries::monomial(&f, T, FqElem::ONE, -1, 20);
            assert_eq!(theta.embed_theta_to_eta().unwrap().valuation().unwrap(), -(q as i64 - 1));
        }
        // characteristic two: exponent-preserving with sign +1
        let f2 = Fq::new(2).unwrap();
        let s = series(&f2, -2, &[1, 0, 1, 1, 0, 1]);
        let e = s.embed_theta_to_eta().unwrap();
        assert_eq!(e.to_json().terms, s.to_json().terms);
    }

    #[test]
    fn json_round_trip_and_shape() {
        let f = Fq::new(4).unwrap();
        let s = series(&f, -2, &[1, 0, 2, 3]);
        let json = serde_json::to_string(&s.to_json()).unwrap();
        assert_eq!(json, r#"{"var":"1/theta","q":4,"terms":[[-2,"1"],[0,"g"],[1,"g+1"]],"prec":2}"#);
        let back: SeriesJson = serde_json::from_str(&json).unwrap();
        assert_eq!(LaurentSeries::from_json(&f, &back).unwrap(), s);
    }

    fn arb_series(q: u32) -> impl Strategy<Value = (i64, Vec<u32>)> {
        (-4i64..4, prop::collection::vec(0..q, 1..24))
    }

    proptest! {
        #[test]
        fn ring_axioms_to_precision(a in arb_series(5), b in arb_series(5), c in arb_series(5)) {
            let f = Fq::new(5).unwrap();
            let (a, b, c) = (series(&f, a.0, &a.1), series(&f, b.0, &b.1), series(&f, c.0, &c.1));
            let lhs = a.mul(&b).unwrap().mul(&c).unwrap();
            let rhs = a.mul(&b.mul(&c).unwrap()).unwrap();
            let n = lhs.precision().min(rhs.precision());
            prop_assert!(lhs.eq_to_precision(&rhs, n).unwrap());
            let dist_l = a.mul(&b.add(&c).unwrap()).unwrap();
            let dist_r = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
            let n = dist_l.precision().min(dist_r.precision());
            prop_assert!(dist_l.eq_to_precision(&dist_r, n).unwrap());
            prop_assert!(a.mul(&b).unwrap().eq_to_precision(&b.mul(&a).unwrap(), a.mul(&b).unwrap().precision()).unwrap());
        }

        #[test]
        fn truncation_commutes_with_products(a in arb_series(3), b in arb_series(3), cut in 1i64..12) {
            let f = Fq::new(3).unwrap();
            let (a, b) = (series(&f, a.0, &a.1), series(&f, b.0, &b.1));
            let full = a.mul(&b).unwrap();
            let n = full.precision() - cut;
            let ta = a.truncate(a.precision() - cut);
            let tb = b.truncate(b.precision() - cut);
            let small = ta.mul(&tb).unwrap();
            if small.precision() >= n.min(small.precision()) {
                let m = n.min(small.precision());
                prop_assert!(full.truncate(m).eq_to_precision(&small.truncate(m), m).unwrap());
            }
        }

        #[test]
        fn inverse_is_involutive(a in arb_series(7)) {
            let f = Fq::new(7).unwrap();
            let a = series(&f, a.0, &a.1);
            prop_assume!(!a.is_zero_to_precision());
            let back = a.inv().unwrap().inv().unwrap();
            prop_assert_eq!(&back, &a);
            let prod = a.mul(&a.inv().unwrap()).unwrap();
            prop_assert!(prod.eq_to_precision(&LaurentSeries::one(&f, T, prod.precision()), prod.precision()).unwrap());
        }

        #[test]
        fn embedding_is_multiplicative(a in arb_series(3), b in arb_series(3)) {
            let f = Fq::new(3).unwrap();
            let (a, b) = (series(&f, a.0, &a.1), series(&f, b.0, &b.1));
            let lhs = a.mul(&b).unwrap().embed_theta_to_eta().unwrap();
            let rhs = a.embed_theta_to_eta().unwrap().mul(&b.embed_theta_to_eta().unwrap()).unwrap();
            let n = lhs.precision().min(rhs.precision());
            prop_assert!(lhs.eq_to_precision(&rhs, n).unwrap());
        }
    }
}
