//! Truncated-series values of the Gamma function
//! `Gamma(z) = 1/z prod_{n monic} (1 + z/n)^{-1}` at rational arguments, the
//! Carlitz period, and the Carlitz exponential.
//!
//! The product over monic `n` is taken one degree at a time. For fixed `d`
//! the `q^d` factors collapse:
//!
//! ```text
//! prod_{n monic, deg n = d} (1 + z/n) = 1 + e_d(z) / D_d
//!                                     = 1 + sum_{i=0}^{d} (-1)^{d-i} z^{q^i} / (D_i L_{d-i}^{q^i})
//! ```
//!
//! where `e_d(x) = prod_{deg a < d} (x - a)` is F_q-linear,
//! `D_i = prod_{j<i} (theta^{q^i} - theta^{q^j})` and
//! `L_j = prod_{k=1}^{j} (theta^{q^k} - theta)`. Since `1/D_i` is the `i`-th
//! Carlitz exponential coefficient, each degree slice costs `d + 1` Frobenius
//! powers instead of `q^d` series divisions.
//!
//! Series in `1/theta` are for Gamma values; the period lives in `1/eta`
//! with the fixed root `eta^{q-1} = -theta`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffpoly::{enumerate_monics, parse_fraction, Fq, FqElem, Poly};
use crate::laurent::{LaurentSeries, SeriesJson, Var};

/// Default ceiling on the degree cutoff of the adaptive Gamma product.
pub const MAX_CUTOFF_DEGREE: usize = 40;

/// `q^i`, saturating.
fn qpow(q: u32, i: usize) -> i64 {
    (q as i64).checked_pow(i as u32).unwrap_or(i64::MAX)
}

/// A rational argument `a/f` with `f` monic and nonconstant.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalArg {
    num: Poly,
    den: Poly,
}

impl RationalArg {
    /// `num/den`; the fraction is reduced for display and evaluation.
    pub fn new(num: &Poly, den: &Poly) -> Result<RationalArg> {
        if !den.is_monic() || den.is_constant() {
            return Err(Error::domain(format!("denominator {den} must be monic of degree >= 1")));
        }
        let g = num.gcd(den);
        if g.is_zero() || g.is_one() {
            return Ok(RationalArg { num: num.clone(), den: den.clone() });
        }
        Ok(RationalArg { num: num.div_exact(&g)?, den: den.div_exact(&g)? })
    }

    /// Parses `"a/f"`.
    pub fn parse(field: &Fq, s: &str) -> Result<RationalArg> {
        let (a, f) = parse_fraction(field, s)?;
        RationalArg::new(&a, &f)
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    /// Reduced denominator (monic; may be `1` when the argument lies in `A`).
    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn field(&self) -> &Fq {
        self.num.field()
    }

    /// Whether the argument lies in `A`.
    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    /// For a pole `z = -n` (`n` monic) or `z = 0`, the offending `n`.
    pub fn pole(&self) -> Option<Poly> {
        if !self.is_integral() {
            return None;
        }
        let n = -&self.num;
        (n.is_zero() || n.is_monic()).then_some(n)
    }

    /// `c * z`.
    pub fn scale(&self, c: FqElem) -> RationalArg {
        RationalArg { num: self.num.scale(c), den: self.den.clone() }
    }

    /// Valuation in `1/theta`: `deg f - deg a`.
    pub fn valuation(&self) -> i64 {
        self.den.deg() - self.num.deg()
    }

    pub fn series(&self, prec: i64) -> Result<LaurentSeries> {
        LaurentSeries::from_rational(&self.num, &self.den, Var::ThetaInv, prec)
    }

    fn check_not_pole(&self) -> Result<()> {
        if self.num.is_zero() {
            return Err(Error::domain("Gamma has a pole at 0"));
        }
        if let Some(n) = self.pole() {
            return Err(Error::domain(format!("Gamma has a pole at -({n}): factor n = {n} vanishes")));
        }
        Ok(())
    }
}

impl fmt::Display for RationalArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for RationalArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalArg({self})")
    }
}

/// `1/(theta^a - theta^b)` for `a > b >= 0`, a geometric series in `1/theta`.
fn inv_binomial(field: &Fq, a: i64, b: i64, prec: i64) -> LaurentSeries {
    debug_assert!(a > b);
    let step = a - b;
    let terms: Vec<_> = (0..)
        .map(|m| a + m * step)
        .take_while(|&k| k < prec)
        .map(|k| (k, FqElem::ONE))
        .collect();
    LaurentSeries::from_terms(field, Var::ThetaInv, &terms, prec)
}

/// `1/L_j` to precision `prec` (`L_0 = 1`).
fn inv_carlitz_l(field: &Fq, j: usize, prec: i64) -> LaurentSeries {
    let q = field.q();
    let mut acc = LaurentSeries::one(field, Var::ThetaInv, prec);
    let mut val = 0i64;
    for k in 1..=j {
        let qk = qpow(q, k);
        val = val.saturating_add(qk);
        if val >= prec {
            return LaurentSeries::zero(field, Var::ThetaInv, prec);
        }
        let factor = inv_binomial(field, qk, 1, prec - (val - qk));
        acc = acc.mul_trunc(&factor, prec).expect("same uniformizer");
    }
    acc
}

/// Valuation of `1/L_j` in `1/theta`: `q + q^2 + ... + q^j`.
fn inv_carlitz_l_valuation(q: u32, j: usize) -> i64 {
    (1..=j).fold(0i64, |acc, k| acc.saturating_add(qpow(q, k)))
}

/// The Carlitz exponential coefficients `c_0, ..., c_{n-1}` of
/// `e_C(z) = sum c_i z^{q^i}`, each known below `prec` in `1/theta`.
///
/// They satisfy `c_0 = 1` and `c_i (theta^{q^i} - theta) = c_{i-1}^q`, i.e.
/// `c_i = 1/D_i`.
pub fn carlitz_exp_coeffs(field: &Fq, n: usize, prec: i64) -> Vec<LaurentSeries> {
    let q = field.q();
    let r = field.r();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        if i == 0 {
            out.push(LaurentSeries::one(field, Var::ThetaInv, prec));
            continue;
        }
        let qi = qpow(q, i);
        let val = (i as i64).saturating_mul(qi);
        if val >= prec {
            out.push(LaurentSeries::zero(field, Var::ThetaInv, prec));
            continue;
        }
        let prev_val = (i as i64 - 1).saturating_mul(qpow(q, i - 1)).saturating_mul(q as i64);
        let prev = out[i - 1].frobenius_trunc(r, prec - qi);
        let factor = inv_binomial(field, qi, 1, prec - prev_val);
        out.push(prev.mul_trunc(&factor, prec).expect("same uniformizer"));
    }
    out
}

/// `D_i = prod_{j<i} (theta^{q^i} - theta^{q^j})` as an exact polynomial.
pub fn carlitz_factorial_denominator(field: &Fq, i: usize) -> Poly {
    let q = field.q() as usize;
    let top = Poly::monomial(field, FqElem::ONE, q.pow(i as u32));
    (0..i).fold(Poly::one(field), |acc, j| &acc * &(&top - &Poly::monomial(field, FqElem::ONE, q.pow(j as u32))))
}

/// Product of the `q^d` factors `1 + z/n` over monic `n` of degree `d`,
/// known below `prec`.
fn degree_slice(z: &RationalArg, d: usize, prec: i64) -> Result<LaurentSeries> {
    let field = z.field();
    let q = field.q();
    let r = field.r();
    let vz = z.valuation();
    // (i, q^i, val of z/L_{d-i}) for the terms that matter below prec
    let live: Vec<(usize, i64, i64)> = (0..=d)
        .map(|i| (i, qpow(q, i), vz.saturating_add(inv_carlitz_l_valuation(q, d - i))))
        .filter(|&(i, qi, val_y)| qi.saturating_mul(val_y).saturating_add((i as i64).saturating_mul(qi)) < prec)
        .collect();
    let coeff_prec = live.iter().map(|&(_, qi, val_y)| prec - qi.saturating_mul(val_y)).max().unwrap_or(0);
    let coeffs = carlitz_exp_coeffs(field, d + 1, coeff_prec);
    let minus_one = field.neg(FqElem::ONE);
    let mut acc = LaurentSeries::one(field, Var::ThetaInv, prec);
    for (i, qi, val_y) in live {
        let c_val = (i as i64) * qi;
        let val_l = val_y - vz;
        // y = z / L_{d-i}; y^{q^i} must be known below prec - c_val
        let py = (prec - c_val + qi - 1).div_euclid(qi);
        let y = z.series(py - val_l)?.mul_trunc(&inv_carlitz_l(field, d - i, py - vz), py)?;
        let y_pow = y.frobenius_trunc(r * i as u32, prec - c_val);
        let mut term = coeffs[i].mul_trunc(&y_pow, prec)?;
        if (d - i) % 2 == 1 {
            term = term.scale(minus_one);
        }
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// Evaluates `f(p)` at increasing working precision until the result is
/// known below `target`.
fn to_precision(target: i64, mut f: impl FnMut(i64) -> Result<LaurentSeries>) -> Result<LaurentSeries> {
    let mut work = target;
    for _ in 0..12 {
        let s = f(work)?;
        if s.precision() >= target {
            return Ok(s.truncate(target));
        }
        work += (target - s.precision()).max(4) + 4;
    }
    Err(Error::NonConvergence(format!("could not reach precision {target}")))
}

/// Partial products `(1/z) prod_{deg n <= D}(1 + z/n)^{-1}` for
/// `D = 0..=max_d`, all at working precision `work`.
fn partial_products(z: &RationalArg, max_d: usize, work: i64) -> Result<Vec<LaurentSeries>> {
    let zs = z.series(work + 2 * z.valuation().abs() + 2)?;
    let mut acc = zs.inv()?;
    let mut out = Vec::with_capacity(max_d + 1);
    for d in 0..=max_d {
        let slice = degree_slice(z, d, work)?;
        acc = acc.mul(&slice.inv()?)?;
        out.push(acc.clone());
    }
    Ok(out)
}

/// `(1/z) prod_{n monic, deg n <= cutoff} (1 + z/n)^{-1}`, known below `prec`
/// in `1/theta`.
pub fn gamma_partial(z: &RationalArg, cutoff: usize, prec: i64) -> Result<LaurentSeries> {
    z.check_not_pole()?;
    to_precision(prec, |work| Ok(partial_products(z, cutoff, work)?.pop().expect("nonempty")))
}

/// A Gamma value together with the cutoff that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaValue {
    pub arg: RationalArg,
    pub series: LaurentSeries,
    /// Degree cutoff of the product actually returned.
    pub cutoff_degree: usize,
    /// First cutoff `D` whose partial product agreed with those at `D + 1`
    /// and `D + 2`.
    pub stabilized_at: usize,
}

#[derive(Serialize)]
struct GammaJson<'a> {
    arg: String,
    #[serde(flatten)]
    series: &'a SeriesJson,
    cutoff: usize,
    stabilized_at: usize,
}

impl GammaValue {
    /// Series encoding plus `cutoff` and `stabilized_at`.
    pub fn to_json(&self) -> serde_json::Value {
        let series = self.series.to_json();
        serde_json::to_value(GammaJson {
            arg: self.arg.to_string(),
            series: &series,
            cutoff: self.cutoff_degree,
            stabilized_at: self.stabilized_at,
        })
        .expect("serializable")
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct GammaKey {
    p: u32,
    field_modulus: Vec<u32>,
    num: Vec<u32>,
    den: Vec<u32>,
    prec: i64,
}

fn gamma_cache() -> &'static RwLock<HashMap<GammaKey, GammaValue>> {
    static CACHE: OnceLock<RwLock<HashMap<GammaKey, GammaValue>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// `Gamma(z)` known below `prec` in `1/theta`, with the degree cutoff chosen
/// adaptively: the partial products at `D`, `D + 1`, `D + 2` must agree below
/// `prec`. Results are memoized per field, argument and precision.
pub fn gamma(z: &RationalArg, prec: i64) -> Result<GammaValue> {
    gamma_with_ceiling(z, prec, MAX_CUTOFF_DEGREE)
}

pub fn gamma_with_ceiling(z: &RationalArg, prec: i64, ceiling: usize) -> Result<GammaValue> {
    z.check_not_pole()?;
    let field = z.field();
    let key = GammaKey {
        p: field.p(),
        field_modulus: field.modulus().to_vec(),
        num: z.num().coeffs().iter().map(|c| c.code()).collect(),
        den: z.den().coeffs().iter().map(|c| c.code()).collect(),
        prec,
    };
    if let Some(v) = gamma_cache().read().expect("cache lock").get(&key) {
        return Ok(v.clone());
    }
    let mut work = prec;
    let value = 'outer: loop {
        let mut partials: Vec<LaurentSeries> = Vec::new();
        let zs = z.series(work + 2 * z.valuation().abs() + 2)?;
        let mut acc = zs.inv()?;
        for d in 0..=ceiling {
            acc = acc.mul(&degree_slice(z, d, work)?.inv()?)?;
            if acc.precision() < prec {
                work += (prec - acc.precision()).max(4) + 4;
                if work > prec.saturating_mul(64).max(4096) {
                    return Err(Error::NonConvergence(format!("Gamma({z}) lost too much precision")));
                }
                continue 'outer;
            }
            partials.push(acc.clone());
            if d >= 2 {
                let [a, b, c] = [&partials[d - 2], &partials[d - 1], &partials[d]];
                if a.eq_to_precision(b, prec)? && b.eq_to_precision(c, prec)? {
                    break 'outer GammaValue {
                        arg: z.clone(),
                        series: c.truncate(prec),
                        cutoff_degree: d,
                        stabilized_at: d - 2,
                    };
                }
            }
        }
        return Err(Error::NonConvergence(format!("Gamma({z}) did not stabilize by degree {ceiling}")));
    };
    gamma_cache().write().expect("cache lock").insert(key, value.clone());
    Ok(value)
}

/// `Gamma(z)` in `1/eta`, known below `prec`.
pub fn gamma_eta(z: &RationalArg, prec: i64) -> Result<LaurentSeries> {
    let e = z.field().q() as i64 - 1;
    let theta_prec = (prec + e - 1).div_euclid(e);
    Ok(gamma(z, theta_prec)?.series.embed_theta_to_eta()?.truncate(prec))
}

/// The Carlitz period `theta * eta * prod_{i>=1} (1 - theta^{1-q^i})^{-1}` in
/// `1/eta`, known below `prec`.
pub fn carlitz_period(field: &Fq, prec: i64) -> LaurentSeries {
    let q = field.q() as i64;
    let e = q - 1;
    // theta * eta = -eta^q lowers the precision by q after embedding
    let theta_prec = (prec + q + e - 1).div_euclid(e).max(1);
    let mut prod = LaurentSeries::one(field, Var::ThetaInv, theta_prec);
    for i in 1.. {
        let step = qpow(field.q(), i) - 1;
        if step >= theta_prec {
            break;
        }
        let terms: Vec<_> = (0..).map(|m| m * step).take_while(|&k| k < theta_prec).map(|k| (k, FqElem::ONE)).collect();
        let factor = LaurentSeries::from_terms(field, Var::ThetaInv, &terms, theta_prec);
        prod = prod.mul(&factor).expect("same uniformizer");
    }
    prod.embed_theta_to_eta().expect("theta series").shift(-q).neg().truncate(prec)
}

/// The Carlitz exponential `sum_i c_i z^{q^i}` of a series in either
/// uniformizer, known below `prec` (or less, if `z` itself is less precise).
pub fn carlitz_exp(z: &LaurentSeries, prec: i64) -> Result<LaurentSeries> {
    const MAX_TERMS: usize = 64;
    let field = z.field();
    let q = field.q();
    let r = field.r();
    let scale = match z.var() {
        Var::ThetaInv => 1,
        Var::EtaInv => q as i64 - 1,
    };
    let v = match z.valuation() {
        Ok(v) => v,
        Err(Error::ZeroToPrecision { prec: p }) => p,
        Err(e) => return Err(e),
    };
    let mut acc = LaurentSeries::zero(field, z.var(), prec);
    for i in 0..MAX_TERMS {
        let qi = qpow(q, i);
        let lead = v.saturating_add(scale.saturating_mul(i as i64));
        let term_val = qi.saturating_mul(lead);
        if lead > 0 && term_val >= prec {
            return Ok(acc);
        }
        let c_val = scale.saturating_mul(i as i64).saturating_mul(qi);
        let need_c = prec.saturating_sub(qi.saturating_mul(v));
        let theta_need = (need_c + scale - 1).div_euclid(scale);
        let c = carlitz_exp_coeffs(field, i + 1, theta_need).pop().expect("i + 1 > 0");
        let c = match z.var() {
            Var::ThetaInv => c,
            Var::EtaInv => c.embed_theta_to_eta()?,
        };
        let zq = z.frobenius_trunc(r * i as u32, prec.saturating_sub(c_val));
        acc = acc.add(&c.mul_trunc(&zq, prec)?)?;
    }
    Err(Error::domain(format!("Carlitz exponential terms not decreasing within {MAX_TERMS} terms")))
}

/// `prod_{c in F_q^x} Gamma(c z)` in `1/theta`, known below `prec`.
pub fn reflection_product(z: &RationalArg, prec: i64) -> Result<LaurentSeries> {
    let field = z.field().clone();
    to_precision(prec, |work| {
        let mut acc = LaurentSeries::one(&field, Var::ThetaInv, work);
        for c in field.units() {
            acc = acc.mul(&gamma(&z.scale(c), work)?.series)?;
        }
        Ok(acc)
    })
}

/// The arguments `(z + alpha)/g` for all `alpha` with `deg alpha < deg g`.
pub fn gauss_arguments(z: &RationalArg, g: &Poly) -> Result<Vec<RationalArg>> {
    if !g.is_monic() || g.is_constant() {
        return Err(Error::domain(format!("{g} must be monic of degree >= 1")));
    }
    let field = z.field();
    let d = g.deg() as usize;
    let den = z.den() * g;
    let alphas = (0..(field.q() as u64).pow(d as u32)).map(|code| Poly::from_code(field, code));
    alphas.map(|alpha| RationalArg::new(&(z.num() + &(&alpha * z.den())), &den)).collect()
}

/// `prod_{alpha in A/(g)} Gamma((z + alpha)/g)` in `1/theta`, known below
/// `prec`.
pub fn gauss_product(z: &RationalArg, g: &Poly, prec: i64) -> Result<LaurentSeries> {
    let args = gauss_arguments(z, g)?;
    let field = z.field().clone();
    to_precision(prec, |work| {
        let mut acc = LaurentSeries::one(&field, Var::ThetaInv, work);
        for a in &args {
            acc = acc.mul(&gamma(a, work)?.series)?;
        }
        Ok(acc)
    })
}

/// Direct evaluation of a partial product by enumerating every monic `n`;
/// exponential in the cutoff and only meant as a cross-check.
pub fn gamma_partial_by_enumeration(z: &RationalArg, cutoff: usize, prec: i64) -> Result<LaurentSeries> {
    z.check_not_pole()?;
    let field = z.field().clone();
    to_precision(prec, |work| {
        let zs = z.series(work + 2 * z.valuation().abs() + 2)?;
        let mut acc = zs.inv()?;
        for d in 0..=cutoff {
            for n in enumerate_monics(&field, d) {
                let factor = LaurentSeries::one(&field, Var::ThetaInv, work)
                    .add(&zs.mul(&LaurentSeries::from_poly(&n, Var::ThetaInv, work + 2 * d as i64 + 2).inv()?)?)?;
                acc = acc.mul(&factor.inv()?)?;
            }
        }
        Ok(acc)
    })
}
