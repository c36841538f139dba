//! Bracket relations: integer exponent vectors indexed by nonzero residues
//! mod `f`, the unit action `u * m`, and the monic sum `Sigma_+`.
//!
//! A vector `m` is a bracket relation when `Sigma_+(u * m) = Sigma_+(m)` for
//! every unit `u`. Such vectors predict `prod Gamma(a/f)^{m_a} ~ pi^{Sigma_+(m)}`.
//! Entries are keyed by the code of the canonical representative, so
//! iteration order is the residue enumeration order.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffpoly::{check_modulus, enumerate_monics, parse_poly, residue_count, unit_group, Fq, FqElem, Poly, Residue};

/// Finitely supported map from nonzero residues mod `f` to nonzero integers.
#[derive(Clone, PartialEq, Eq)]
pub struct ExponentVector {
    modulus: Poly,
    entries: BTreeMap<u64, i64>,
}

impl ExponentVector {
    /// The zero vector over `f`.
    pub fn zero(f: &Poly) -> Result<ExponentVector> {
        check_modulus(f)?;
        Ok(ExponentVector { modulus: f.clone(), entries: BTreeMap::new() })
    }

    /// `sum m_a e_a`; representatives are reduced mod `f` and repeated
    /// residues accumulate.
    pub fn from_entries(f: &Poly, entries: &[(Poly, i64)]) -> Result<ExponentVector> {
        let mut v = ExponentVector::zero(f)?;
        for (a, m) in entries {
            v.add_entry(a, *m)?;
        }
        Ok(v)
    }

    /// Parses `"rep:exp,rep:exp,..."`; the empty string is the zero vector.
    pub fn parse(f: &Poly, s: &str) -> Result<ExponentVector> {
        let mut v = ExponentVector::zero(f)?;
        for item in s.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (rep, exp) = item
                .rsplit_once(':')
                .ok_or_else(|| Error::parse(format!("expected rep:exponent, got {item:?}")))?;
            let exp: i64 = exp.trim().parse().map_err(|e| Error::parse(format!("bad exponent in {item:?}: {e}")))?;
            v.add_entry(&parse_poly(f.field(), rep)?, exp)?;
        }
        Ok(v)
    }

    fn add_entry(&mut self, a: &Poly, m: i64) -> Result<()> {
        let r = a.rem(&self.modulus)?;
        if r.is_zero() {
            return Err(Error::domain(format!("{a} is zero mod {}", self.modulus)));
        }
        self.bump(r.code(), m);
        Ok(())
    }

    fn bump(&mut self, code: u64, m: i64) {
        let slot = self.entries.entry(code).or_insert(0);
        *slot += m;
        if *slot == 0 {
            self.entries.remove(&code);
        }
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn field(&self) -> &Fq {
        self.modulus.field()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry at the residue of `a` (zero if absent).
    pub fn get(&self, a: &Poly) -> i64 {
        a.rem(&self.modulus).ok().and_then(|r| self.entries.get(&r.code()).copied()).unwrap_or(0)
    }

    /// `(residue, exponent)` pairs in residue enumeration order.
    pub fn entries(&self) -> impl Iterator<Item = (Residue, i64)> + '_ {
        self.entries.iter().map(|(&code, &m)| {
            (Residue::new(&Poly::from_code(self.field(), code), &self.modulus).expect("checked modulus"), m)
        })
    }

    fn same_modulus(&self, other: &ExponentVector) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::domain(format!("vectors over {} and {}", self.modulus, other.modulus)));
        }
        Ok(())
    }

    pub fn add(&self, other: &ExponentVector) -> Result<ExponentVector> {
        self.same_modulus(other)?;
        let mut out = self.clone();
        for (&code, &m) in &other.entries {
            out.bump(code, m);
        }
        Ok(out)
    }

    pub fn neg(&self) -> ExponentVector {
        ExponentVector { modulus: self.modulus.clone(), entries: self.entries.iter().map(|(&c, &m)| (c, -m)).collect() }
    }

    pub fn sub(&self, other: &ExponentVector) -> Result<ExponentVector> {
        self.add(&other.neg())
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries().map(|(r, m)| format!("{r}:{m}")).collect();
        f.write_str(&parts.join(","))
    }
}

impl fmt::Debug for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}] mod {}", self.modulus)
    }
}

/// `Sigma_+(m)`: the sum of entries at residues with monic canonical rep.
pub fn sigma_plus(m: &ExponentVector) -> i64 {
    let field = m.field();
    m.entries.iter().filter(|(&code, _)| Poly::from_code(field, code).is_monic()).map(|(_, &e)| e).sum()
}

/// `u * m`, moving the entry at `a` to `ua mod f`.
pub fn act(u: &Poly, m: &ExponentVector) -> Result<ExponentVector> {
    let u = Residue::new(u, &m.modulus)?;
    if u.is_zero() || !u.is_unit() {
        return Err(Error::domain(format!("{u} is not a unit mod {}", m.modulus)));
    }
    let mut out = ExponentVector::zero(&m.modulus)?;
    for (a, e) in m.entries() {
        out.bump(u.mul(&a).code(), e);
    }
    Ok(out)
}

/// Outcome of the bracket test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketReport {
    pub is_relation: bool,
    /// `Sigma_+(m)` when `m` is a relation.
    pub sigma_plus: Option<i64>,
    /// The first unit (in enumeration order) with `Sigma_+(u*m) != Sigma_+(m)`.
    pub witness: Option<Residue>,
}

#[derive(Serialize)]
struct BracketJson {
    is_relation: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma_plus: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
}

impl BracketReport {
    /// `{"is_relation":true,"sigma_plus":1}` or
    /// `{"is_relation":false,"witness":"2"}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(BracketJson {
            is_relation: self.is_relation,
            sigma_plus: self.sigma_plus,
            witness: self.witness.as_ref().map(|w| w.to_string()),
        })
        .expect("serializable")
    }
}

/// Multiplication by `a` on `A/f` as a matrix: row `k` holds the `t^k`
/// coefficients of `a, ta, ..., t^{n-1}a mod f`.
fn mul_map(a: &Poly, f: &Poly) -> Vec<Vec<FqElem>> {
    let n = f.deg() as usize;
    let mut col = a.rem(f).expect("monic modulus");
    let cols: Vec<Vec<FqElem>> = (0..n)
        .map(|_| {
            let mut c = col.coeffs().to_vec();
            c.resize(n, FqElem::ZERO);
            col = col.shift(1).rem(f).expect("monic modulus");
            c
        })
        .collect();
    (0..n).map(|k| cols.iter().map(|c| c[k]).collect()).collect()
}

/// Whether `ua mod f` has leading coefficient 1, given the matrix of `a`.
/// Coordinates are computed from the top, so this usually stops after one row.
fn image_is_monic(field: &Fq, rows: &[Vec<FqElem>], u: &[FqElem]) -> bool {
    for row in rows.iter().rev() {
        let c = row.iter().zip(u).fold(FqElem::ZERO, |acc, (&r, &x)| field.add(acc, field.mul(r, x)));
        if !c.is_zero() {
            return c == FqElem::ONE;
        }
    }
    false
}

/// Decides whether `m` is a bracket relation by running over all units.
pub fn is_bracket_relation(m: &ExponentVector) -> Result<BracketReport> {
    let target = sigma_plus(m);
    if m.is_zero() {
        return Ok(BracketReport { is_relation: true, sigma_plus: Some(0), witness: None });
    }
    let group = unit_group(&m.modulus)?;
    let field = m.field();
    let n = m.modulus.deg() as usize;
    let support: Vec<(Vec<Vec<FqElem>>, i64)> =
        m.entries().map(|(a, e)| (mul_map(a.rep(), &m.modulus), e)).collect();
    let mut u = vec![FqElem::ZERO; n];
    for unit in group.elements() {
        u.fill(FqElem::ZERO);
        u[..unit.rep().coeffs().len()].copy_from_slice(unit.rep().coeffs());
        let s: i64 = support.iter().filter(|(rows, _)| image_is_monic(field, rows, &u)).map(|(_, e)| e).sum();
        if s != target {
            return Ok(BracketReport { is_relation: false, sigma_plus: None, witness: Some(unit.clone()) });
        }
    }
    Ok(BracketReport { is_relation: true, sigma_plus: Some(target), witness: None })
}

/// `e_a - e_b` over `f`, the vector whose bracket status decides
/// `Gamma(a/f) ≈ Gamma(b/f)`. For `a ≡ b` this is the zero vector and the
/// flag is set.
pub fn pair_vector(a: &Poly, b: &Poly, f: &Poly) -> Result<(ExponentVector, bool)> {
    let ra = Residue::new(a, f)?;
    let rb = Residue::new(b, f)?;
    if ra == rb {
        if ra.is_zero() {
            return Err(Error::domain(format!("{a} is zero mod {f}")));
        }
        return Ok((ExponentVector::zero(f)?, true));
    }
    Ok((ExponentVector::from_entries(f, &[(a.clone(), 1), (b.clone(), -1)])?, false))
}

/// Rewrites a vector over `f` as one over a multiple `F`, sending `a/f` to
/// `(a F/f)/F`.
pub fn lift_modulus(m: &ExponentVector, big: &Poly) -> Result<ExponentVector> {
    check_modulus(big)?;
    let (cofactor, rem) = big.divmod(&m.modulus)?;
    if !rem.is_zero() {
        return Err(Error::domain(format!("{} does not divide {big}", m.modulus)));
    }
    let mut out = ExponentVector::zero(big)?;
    for (a, e) in m.entries() {
        out.add_entry(&(a.rep() * &cofactor), e)?;
    }
    Ok(out)
}

fn require_unit(a: &Poly, f: &Poly) -> Result<Residue> {
    let r = Residue::new(a, f)?;
    if r.is_zero() || !r.is_unit() {
        return Err(Error::domain(format!("{a} is not coprime to {f}")));
    }
    Ok(r)
}

/// `sum_{c in F_q^x} e_{ca}`: the reflection formula as a vector.
pub fn reflection_vector(a: &Poly, f: &Poly) -> Result<ExponentVector> {
    let a = require_unit(a, f)?;
    let entries: Vec<(Poly, i64)> = f.field().units().map(|c| (a.rep().scale(c), 1)).collect();
    ExponentVector::from_entries(f, &entries)
}

/// `sum_{deg alpha < d} e_{(a + alpha f) mod fg} - e_{ag mod fg}` over `fg`:
/// the multiplication formula for `g` of degree `d`.
pub fn gauss_vector(a: &Poly, f: &Poly, g: &Poly) -> Result<ExponentVector> {
    let a = require_unit(a, f)?;
    check_modulus(g)?;
    let fg = f * g;
    residue_count(&fg)?;
    let field = f.field();
    let d = g.deg() as u32;
    let mut entries: Vec<(Poly, i64)> = (0..(field.q() as u64).pow(d))
        .map(|code| (a.rep() + &(&Poly::from_code(field, code) * f), 1))
        .collect();
    entries.push((a.rep() * g, -1));
    ExponentVector::from_entries(&fg, &entries)
}

/// `e_{(a + b f) mod f} - e_a`, which is always zero: translating the argument
/// by an element of `A` does not change its residue.
pub fn translation_vector(a: &Poly, b: &Poly, f: &Poly) -> Result<ExponentVector> {
    require_unit(a, f)?;
    ExponentVector::from_entries(f, &[(a + &(b * f), 1), (a.clone(), -1)])
}

/// All monic moduli of degree `1..=max_deg`, in enumeration order.
pub fn small_moduli(field: &Fq, max_deg: usize) -> Vec<Poly> {
    (1..=max_deg).flat_map(|d| enumerate_monics(field, d).collect::<Vec<_>>()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffpoly::UnitGroup;
    use proptest::prelude::*;

    fn fq(q: u32) -> Fq {
        Fq::new(q).unwrap()
    }

    fn poly(field: &Fq, s: &str) -> Poly {
        parse_poly(field, s).unwrap()
    }

    #[test]
    fn sigma_plus_examples() {
        let f3 = fq(3);
        let t = Poly::t(&f3);
        assert_eq!(sigma_plus(&ExponentVector::zero(&t).unwrap()), 0);
        assert_eq!(sigma_plus(&ExponentVector::parse(&t, "1:1,2:1").unwrap()), 1);
        assert_eq!(sigma_plus(&ExponentVector::parse(&t, "1:1,2:-1").unwrap()), 1);
    }

    #[test]
    fn action_examples() {
        let f3 = fq(3);
        let t = Poly::t(&f3);
        let m = ExponentVector::parse(&t, "1:1").unwrap();
        assert_eq!(act(&Poly::one(&f3), &m).unwrap(), m);
        assert_eq!(act(&poly(&f3, "2"), &m).unwrap().to_string(), "2:1");
        assert!(act(&t, &m).is_err());
    }

    #[test]
    fn bracket_examples() {
        let f3 = fq(3);
        let t = Poly::t(&f3);
        let rel = is_bracket_relation(&ExponentVector::parse(&t, "1:1,2:1").unwrap()).unwrap();
        assert_eq!(rel.to_json().to_string(), r#"{"is_relation":true,"sigma_plus":1}"#);
        let non = is_bracket_relation(&ExponentVector::parse(&t, "1:1,2:-1").unwrap()).unwrap();
        assert!(!non.is_relation);
        assert_eq!(non.witness.unwrap().to_string(), "2");
        assert!(is_bracket_relation(&ExponentVector::zero(&t).unwrap()).unwrap().is_relation);
    }

    #[test]
    fn pair_vector_examples() {
        let f = |q: u32| {
            let field = fq(q);
            let m = poly(&field, "t^2-t");
            (pair_vector(&Poly::one(&field), &poly(&field, "t+1"), &m).unwrap().0, field)
        };
        assert!(is_bracket_relation(&f(3).0).unwrap().is_relation);
        assert!(!is_bracket_relation(&f(5).0).unwrap().is_relation);
        let f3 = fq(3);
        let (z, flag) = pair_vector(&Poly::one(&f3), &poly(&f3, "t+1"), &Poly::t(&f3)).unwrap();
        assert!(flag && z.is_zero());
    }

    #[test]
    fn lift_examples() {
        let f3 = fq(3);
        let t = Poly::t(&f3);
        let big = poly(&f3, "t^2-t");
        let m = ExponentVector::parse(&t, "1:1").unwrap();
        assert_eq!(lift_modulus(&m, &t).unwrap(), m);
        assert_eq!(lift_modulus(&m, &big).unwrap().to_string(), "t+2:1");
        assert!(lift_modulus(&m, &poly(&f3, "t+1")).is_err());
    }

    #[test]
    fn functional_equation_vectors() {
        let f3 = fq(3);
        let t = Poly::t(&f3);
        let one = Poly::one(&f3);
        let r = reflection_vector(&one, &t).unwrap();
        assert_eq!(r.to_string(), "1:1,2:1");
        let g = poly(&f3, "t+2");
        let gv = gauss_vector(&one, &t, &g).unwrap();
        let rep = is_bracket_relation(&gv).unwrap();
        assert_eq!(rep.sigma_plus, Some(1));
        assert!(translation_vector(&one, &poly(&f3, "t^2+1"), &t).unwrap().is_zero());
        let f2 = fq(2);
        let m = poly(&f2, "t^2+1");
        let a = poly(&f2, "t");
        let rv = reflection_vector(&a, &m).unwrap();
        assert_eq!(rv.to_string(), "t:1");
        assert_eq!(sigma_plus(&rv), 1);
    }

    #[test]
    fn relations_survive_the_action() {
        let field = fq(3);
        for f in small_moduli(&field, 2) {
            let group = UnitGroup::new(&f).unwrap();
            for a in group.elements() {
                let r = reflection_vector(a.rep(), &f).unwrap();
                let base = is_bracket_relation(&r).unwrap();
                for u in group.elements() {
                    let moved = is_bracket_relation(&act(u.rep(), &r).unwrap()).unwrap();
                    assert_eq!(moved, base);
                }
            }
        }
    }

    /// Open question: does a vector keep its bracket status when lifted to a
    /// multiple of its modulus? Checked over every vector with entries in
    /// {-1, 0, 1} on the units of a small modulus.
    #[test]
    fn lift_preserves_bracket_status_on_small_cases() {
        for q in [2, 3] {
            let field = fq(q);
            for f in small_moduli(&field, 2) {
                let units: Vec<Poly> = UnitGroup::new(&f).unwrap().elements().iter().map(|r| r.rep().clone()).collect();
                if units.len() > 8 {
                    continue;
                }
                let bigs: Vec<Poly> = small_moduli(&field, 3).into_iter().filter(|g| f.divides(g) && g.deg() <= 3).collect();
                for index in 0..3u64.pow(units.len() as u32) {
                    let entries: Vec<(Poly, i64)> = units
                        .iter()
                        .enumerate()
                        .map(|(k, u)| (u.clone(), (index / 3u64.pow(k as u32) % 3) as i64 - 1))
                        .filter(|(_, e)| *e != 0)
                        .collect();
                    let m = ExponentVector::from_entries(&f, &entries).unwrap();
                    let here = is_bracket_relation(&m).unwrap();
                    for big in &bigs {
                        let there = is_bracket_relation(&lift_modulus(&m, big).unwrap()).unwrap();
                        assert_eq!(here.is_relation, there.is_relation, "q={q} f={f} F={big} m={m}");
                        assert_eq!(here.sigma_plus, there.sigma_plus);
                    }
                }
            }
        }
    }

    fn arb_vector(f: Poly) -> impl Strategy<Value = ExponentVector> {
        let n = (f.field().q() as u64).pow(f.deg() as u32);
        prop::collection::vec((1..n, -3i64..=3), 0..6).prop_map(move |items| {
            let entries: Vec<_> = items.into_iter().map(|(c, e)| (Poly::from_code(f.field(), c), e)).collect();
            ExponentVector::from_entries(&f, &entries).unwrap()
        })
    }

    /// The definition, one `act` per unit.
    fn bracket_by_definition(m: &ExponentVector) -> bool {
        let group = UnitGroup::new(m.modulus()).unwrap();
        group.elements().iter().all(|u| sigma_plus(&act(u.rep(), m).unwrap()) == sigma_plus(m))
    }

    proptest! {
        #[test]
        fn fast_test_matches_definition(q in prop::sample::select(vec![2u32, 3, 4, 5]), fcode in 0u64..25,
                                        deg in 1usize..=2, items in prop::collection::vec((1u64..625, -2i64..=2), 0..5)) {
            let field = Fq::new(q).unwrap();
            let monics: Vec<Poly> = enumerate_monics(&field, deg).collect();
            let f = monics[fcode as usize % monics.len()].clone();
            let n = (q as u64).pow(deg as u32);
            let entries: Vec<_> = items.into_iter().map(|(c, e)| (Poly::from_code(&field, c % (n - 1) + 1), e)).collect();
            let m = ExponentVector::from_entries(&f, &entries).unwrap();
            prop_assert_eq!(is_bracket_relation(&m).unwrap().is_relation, bracket_by_definition(&m));
        }

        #[test]
        fn sigma_plus_is_additive(m in arb_vector(Poly::from_ints(&Fq::new(3).unwrap(), &[0, 2, 1])),
                                  n in arb_vector(Poly::from_ints(&Fq::new(3).unwrap(), &[0, 2, 1]))) {
            prop_assert_eq!(sigma_plus(&m.add(&n).unwrap()), sigma_plus(&m) + sigma_plus(&n));
        }

        #[test]
        fn action_is_linear(m in arb_vector(Poly::from_ints(&Fq::new(5).unwrap(), &[1, 0, 1])),
                            n in arb_vector(Poly::from_ints(&Fq::new(5).unwrap(), &[1, 0, 1])),
                            ucode in 1u64..25) {
            let f = m.modulus().clone();
            let u = Poly::from_code(f.field(), ucode);
            prop_assume!(u.gcd(&f).is_one());
            prop_assert_eq!(act(&u, &m.add(&n).unwrap()).unwrap(), act(&u, &m).unwrap().add(&act(&u, &n).unwrap()).unwrap());
        }

        #[test]
        fn relations_form_a_group(seed_a in 0usize..100, seed_b in 0usize..100, ucode in 1u64..9) {
            // orbit differences e_{ua} - e_a are not relations in general, but
            // sums of reflection vectors are, and so are their differences
            let field = Fq::new(3).unwrap();
            let f = Poly::from_ints(&field, &[0, 2, 1]);
            let group = UnitGroup::new(&f).unwrap();
            let a = group.get(seed_a % group.len()).rep().clone();
            let b = group.get(seed_b % group.len()).rep().clone();
            let ra = reflection_vector(&a, &f).unwrap();
            let rb = reflection_vector(&b, &f).unwrap();
            let u = Poly::from_code(&field, ucode);
            prop_assume!(u.gcd(&f).is_one());
            let diff = act(&u, &ra).unwrap().sub(&ra).unwrap();
            for v in [ra.add(&rb).unwrap(), ra.sub(&rb).unwrap(), ra.neg(), diff.add(&rb).unwrap()] {
                let rep = is_bracket_relation(&v).unwrap();
                prop_assert!(rep.is_relation);
                prop_assert_eq!(rep.sigma_plus, Some(sigma_plus(&v)));
            }
        }
    }
}
