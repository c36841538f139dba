//! CM-type combinatorics of `(A/f)^x`: the monic set `S_f`, its stabilizer
//! `F(1)`, the resulting partition of Gamma values into equivalence classes,
//! and equivalence across different moduli.

use bitvec::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffpoly::{check_modulus, residue_count, unit_group, Fq, Poly, Residue, UnitGroup};

/// `S_f`: the units mod `f` whose canonical representative is monic.
#[derive(Clone, Debug)]
pub struct MonicSet {
    group: UnitGroup,
    bits: BitVec,
}

impl MonicSet {
    pub fn group(&self) -> &UnitGroup {
        &self.group
    }

    pub fn bits(&self) -> &BitSlice {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.not_any()
    }

    pub fn contains(&self, a: &Poly) -> bool {
        self.group.position(a).is_some_and(|i| self.bits[i])
    }

    /// Members in enumeration order.
    pub fn members(&self) -> Vec<Residue> {
        self.bits.iter_ones().map(|i| self.group.get(i).clone()).collect()
    }

    /// Whether `S_f * s = S_f` for the unit at index `s`.
    fn is_stabilized_by(&self, s: usize) -> bool {
        self.bits.iter_ones().all(|i| self.bits[self.group.mul_index(i, s)])
    }
}

pub fn monic_set(f: &Poly) -> Result<MonicSet> {
    let group = UnitGroup::new(f)?;
    let bits = group.elements().iter().map(Residue::is_monic).collect();
    Ok(MonicSet { group, bits })
}

/// `F(1) = {s : S_f s = S_f}`, a subgroup of `(A/f)^x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stabilizer {
    pub modulus: Poly,
    /// Sorted by code.
    pub members: Vec<Residue>,
}

fn stabilizer_indices(set: &MonicSet) -> Vec<usize> {
    (0..set.group.len()).filter(|&s| set.is_stabilized_by(s)).collect()
}

pub fn stabilizer(f: &Poly) -> Result<Stabilizer> {
    let set = monic_set(f)?;
    let members = stabilizer_indices(&set).into_iter().map(|i| set.group.get(i).clone()).collect();
    Ok(Stabilizer { modulus: f.clone(), members })
}

/// The Gamma-value classes for modulus `f` and the dimension counts of the
/// associated t-module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub modulus: Poly,
    pub is_simple: bool,
    /// `|F(1)|`.
    pub m: usize,
    /// Cosets `a F(1)`, each sorted by code, ordered by their first element.
    pub classes: Vec<Vec<Residue>>,
    pub stabilizer: Vec<Residue>,
    pub dim_e: usize,
    pub rank_e: usize,
    pub dim_h: usize,
    pub rank_h: usize,
    pub n_quasiperiods: usize,
}

#[derive(Serialize)]
struct ClassificationJson {
    q: u32,
    f: String,
    simple: bool,
    m: usize,
    #[serde(rename = "dim_E")]
    dim_e: usize,
    #[serde(rename = "rank_E")]
    rank_e: usize,
    #[serde(rename = "dim_H")]
    dim_h: usize,
    #[serde(rename = "rank_H")]
    rank_h: usize,
    n_quasiperiods: usize,
    classes: Vec<Vec<String>>,
}

impl Classification {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ClassificationJson {
            q: self.modulus.field().q(),
            f: self.modulus.to_string(),
            simple: self.is_simple,
            m: self.m,
            dim_e: self.dim_e,
            rank_e: self.rank_e,
            dim_h: self.dim_h,
            rank_h: self.rank_h,
            n_quasiperiods: self.n_quasiperiods,
            classes: self.classes.iter().map(|c| c.iter().map(|r| r.to_string()).collect()).collect(),
        })
        .expect("serializable")
    }
}

pub fn classify(f: &Poly) -> Result<Classification> {
    let set = monic_set(f)?;
    let group = &set.group;
    let stab = stabilizer_indices(&set);
    let mut seen = bitvec![0; group.len()];
    let mut classes = Vec::new();
    for a in 0..group.len() {
        if seen[a] {
            continue;
        }
        let mut class: Vec<usize> = stab.iter().map(|&s| group.mul_index(a, s)).collect();
        class.sort_unstable();
        for &i in &class {
            seen.set(i, true);
        }
        classes.push(class.into_iter().map(|i| group.get(i).clone()).collect::<Vec<_>>());
    }
    let m = stab.len();
    let dim_e = set.len();
    let rank_e = group.len();
    Ok(Classification {
        modulus: f.clone(),
        is_simple: m == 1,
        m,
        classes,
        stabilizer: stab.iter().map(|&i| group.get(i).clone()).collect(),
        dim_e,
        rank_e,
        dim_h: dim_e / m,
        rank_h: rank_e / m,
        n_quasiperiods: rank_e - dim_e,
    })
}

fn require_coprime(a: &Poly, f: &Poly) -> Result<()> {
    check_modulus(f)?;
    if a.rem(f)?.is_zero() || !a.gcd(f).is_one() {
        return Err(Error::domain(format!("{a} is not coprime to {f}")));
    }
    Ok(())
}

/// `Gamma(a/f) ≈ Gamma(b/g)`: for every unit `u` mod `lcm(f, g)`,
/// `ua mod f` is monic exactly when `ub mod g` is.
pub fn approx_equiv(a: &Poly, f: &Poly, b: &Poly, g: &Poly) -> Result<bool> {
    require_coprime(a, f)?;
    require_coprime(b, g)?;
    let big = f.lcm(g);
    residue_count(&big)?;
    let group = unit_group(&big)?;
    Ok(group.elements().iter().all(|u| {
        let ua = (u.rep() * a).rem(f).expect("monic");
        let ub = (u.rep() * b).rem(g).expect("monic");
        ua.is_monic() == ub.is_monic()
    }))
}

/// A witness `(1, b)` with `Gamma(1/f) ≈ Gamma(b/g)`, searching `b` over the
/// units mod `g` in enumeration order.
pub fn isogenous(f: &Poly, g: &Poly) -> Result<Option<(Poly, Poly)>> {
    check_modulus(f)?;
    residue_count(&f.lcm(g))?;
    let one = Poly::one(f.field());
    for b in unit_group(g)?.elements() {
        if approx_equiv(&one, f, b.rep(), g)? {
            return Ok(Some((one, b.rep().clone())));
        }
    }
    Ok(None)
}

/// Result of comparing `S = sum_{a in I_+} a` with `prod (1 - f_i)` mod `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoreDenoms {
    /// `S mod f` by direct summation.
    pub direct: Residue,
    /// `prod (1 - f_i) mod f` over the distinct prime factors.
    pub formula: Residue,
    pub agree: bool,
    /// `gcd(S, f) = 1`.
    pub coprime: bool,
}

/// Checks a claimed factorization `f = prod f_i^{e_i}` into distinct monic
/// irreducibles, then compares the two expressions for `S`.
pub fn moredenoms_check(f: &Poly, factors: &[(Poly, u32)]) -> Result<MoreDenoms> {
    check_modulus(f)?;
    let field = f.field();
    for (i, (p, e)) in factors.iter().enumerate() {
        if *e == 0 || !p.is_monic() || !p.is_irreducible() {
            return Err(Error::domain(format!("factor {p}^{e} is not a positive power of a monic irreducible")));
        }
        if factors[..i].iter().any(|(r, _)| r == p) {
            return Err(Error::domain(format!("factor {p} repeated")));
        }
    }
    let product = factors.iter().fold(Poly::one(field), |acc, (p, e)| &acc * &p.pow(*e as u64));
    if &product != f {
        return Err(Error::domain(format!("factors multiply to {product}, not {f}")));
    }
    let set = monic_set(f)?;
    let direct = set.members().iter().fold(Poly::zero(field), |acc, a| &acc + a.rep());
    let one = Poly::one(field);
    let formula = factors.iter().fold(one.clone(), |acc, (p, _)| &acc * &(&one - p));
    let direct = Residue::new(&direct, f)?;
    let formula = Residue::new(&formula, f)?;
    Ok(MoreDenoms {
        agree: direct == formula,
        coprime: direct.rep().gcd(f).is_one(),
        direct,
        formula,
    })
}

/// The hypothesis that no prime factor `f_i` divides any `f_j - 1`.
pub fn no_factor_divides_shifted(factors: &[(Poly, u32)]) -> bool {
    let Some((first, _)) = factors.first() else { return true };
    let one = Poly::one(first.field());
    factors.iter().all(|(fi, _)| factors.iter().all(|(fj, _)| !fi.divides(&(fj - &one))))
}

/// All monic polynomials of degree `1..=max_deg` over `field`.
pub fn moduli_up_to(field: &Fq, max_deg: usize) -> Vec<Poly> {
    crate::bracket::small_moduli(field, max_deg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracket::{is_bracket_relation, pair_vector};
    use crate::ffpoly::parse_poly;

    fn fq(q: u32) -> Fq {
        Fq::new(q).unwrap()
    }

    fn poly(field: &Fq, s: &str) -> Poly {
        parse_poly(field, s).unwrap()
    }

    fn names(rs: &[Residue]) -> Vec<String> {
        rs.iter().map(|r| r.to_string()).collect()
    }

    #[test]
    fn monic_set_examples() {
        let f3 = fq(3);
        assert_eq!(names(&monic_set(&Poly::t(&f3)).unwrap().members()), ["1"]);
        assert_eq!(names(&monic_set(&poly(&f3, "t^2-t")).unwrap().members()), ["1", "t+1"]);
        let s = monic_set(&poly(&f3, "t^3-t")).unwrap();
        let mut got = names(&s.members());
        got.sort();
        let mut expect: Vec<String> =
            ["1", "t^2+1", "t^2+t-1", "t^2-t-1"].iter().map(|s| poly(&f3, s).to_string()).collect();
        expect.sort();
        assert_eq!(got, expect);
    }

    #[test]
    fn stabilizer_examples() {
        let f3 = fq(3);
        assert_eq!(names(&stabilizer(&poly(&f3, "t^2-t")).unwrap().members), ["1", "t+1"]);
        let f4 = fq(4);
        let st = stabilizer(&poly(&f4, "t^2+t")).unwrap();
        assert_eq!(names(&st.members), ["1", "t+g", "t+g+1"]);
        let f5 = fq(5);
        assert_eq!(stabilizer(&poly(&f5, "t^2-t")).unwrap().members.len(), 1);
    }

    #[test]
    fn classification_examples() {
        let f3 = fq(3);
        let c = classify(&poly(&f3, "t^2-t")).unwrap();
        assert_eq!((c.is_simple, c.m, c.dim_e, c.rank_e, c.n_quasiperiods), (false, 2, 2, 4, 2));
        let c = classify(&poly(&f3, "t^3-t")).unwrap();
        assert_eq!((c.m, c.dim_e, c.rank_e, c.dim_h), (4, 4, 8, 1));
        let f2 = fq(2);
        assert_eq!(classify(&poly(&f2, "t^2+t")).unwrap().dim_e, 1);
        let json = classify(&poly(&f3, "t^2+2*t")).unwrap().to_json();
        assert_eq!(json["m"], 2);
        assert_eq!(json["f"], "t^2+2*t");
        assert_eq!(json["classes"][0], serde_json::json!(["1", "t+1"]));
    }

    #[test]
    fn structural_invariants() {
        for q in [2, 3, 4, 5] {
            let field = fq(q);
            for f in moduli_up_to(&field, 2) {
                let set = monic_set(&f).unwrap();
                let c = classify(&f).unwrap();
                let group = set.group();
                assert_eq!(group.len() % c.m, 0);
                assert_eq!(c.rank_e, (q as usize - 1) * c.dim_e);
                assert_eq!(c.dim_e % c.m, 0);
                assert!(c.classes.iter().all(|k| k.len() == c.m));
                assert_eq!(c.classes.iter().map(Vec::len).sum::<usize>(), group.len());
                // S_f is a union of classes
                for class in &c.classes {
                    let monic: Vec<bool> = class.iter().map(|r| set.contains(r.rep())).collect();
                    assert!(monic.iter().all(|&b| b == monic[0]), "f={f}");
                }
                // subgroup
                for a in &c.stabilizer {
                    assert!(c.stabilizer.contains(&a.inv().unwrap()));
                    for b in &c.stabilizer {
                        assert!(c.stabilizer.contains(&a.mul(b)));
                    }
                }
                // for q = 2 every unit is monic and F(1) is the whole group
                if q > 2 && f.is_irreducible() {
                    assert!(c.is_simple, "irreducible f={f}");
                }
                if q == 2 {
                    assert_eq!(c.m, group.len());
                }
            }
        }
    }

    #[test]
    fn approx_equiv_examples() {
        let f3 = fq(3);
        let one = Poly::one(&f3);
        let t = Poly::t(&f3);
        let tt1 = poly(&f3, "t^2-t");
        assert!(approx_equiv(&one, &t, &one, &t).unwrap());
        assert!(approx_equiv(&one, &t, &one, &tt1).unwrap());
        assert!(isogenous(&t, &tt1).unwrap().is_some());
        assert!(isogenous(&t, &poly(&f3, "t^2")).unwrap().is_none());
        assert_eq!(isogenous(&tt1, &tt1).unwrap(), Some((one.clone(), one.clone())));
        assert!(approx_equiv(&t, &tt1, &one, &tt1).is_err());
        let f5 = fq(5);
        let one5 = Poly::one(&f5);
        assert!(!approx_equiv(&one5, &Poly::t(&f5), &one5, &poly(&f5, "t^2-t")).unwrap());
    }

    #[test]
    fn approx_equiv_matches_pair_vectors() {
        for q in [2, 3] {
            let field = fq(q);
            for f in moduli_up_to(&field, 3) {
                let group = UnitGroup::new(&f).unwrap();
                for a in group.elements() {
                    for b in group.elements() {
                        let (v, _) = pair_vector(a.rep(), b.rep(), &f).unwrap();
                        let by_bracket = is_bracket_relation(&v).unwrap().is_relation;
                        assert_eq!(approx_equiv(a.rep(), &f, b.rep(), &f).unwrap(), by_bracket, "f={f} a={a} b={b}");
                    }
                }
            }
        }
    }

    #[test]
    fn isogeny_is_an_equivalence_on_the_corpus() {
        for q in [2, 3, 4, 5] {
            let field = fq(q);
            let corpus: Vec<Poly> = ["t", "t^2", "t^2-t", "t^2+t", "t^3-t"].iter().map(|s| poly(&field, s)).collect();
            let rel = |f: &Poly, g: &Poly| isogenous(f, g).unwrap().is_some();
            for f in &corpus {
                assert!(rel(f, f));
                for g in &corpus {
                    assert_eq!(rel(f, g), rel(g, f), "q={q} f={f} g={g}");
                    for h in &corpus {
                        if rel(f, g) && rel(g, h) {
                            assert!(rel(f, h), "q={q} {f} ~ {g} ~ {h}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn moredenoms_examples() {
        let f3 = fq(3);
        let f = poly(&f3, "t^2+1");
        let r = moredenoms_check(&f, &[(f.clone(), 1)]).unwrap();
        assert!(r.direct.rep().is_one() && r.agree && r.coprime);
        let t = Poly::t(&f3);
        let r = moredenoms_check(&t.pow(3), &[(t.clone(), 3)]).unwrap();
        assert_eq!(r.direct.rep(), &(&Poly::one(&f3) - &t));
        assert!(r.agree);
        let tm1 = poly(&f3, "t-1");
        let r = moredenoms_check(&poly(&f3, "t^2-t"), &[(t.clone(), 1), (tm1.clone(), 1)]).unwrap();
        assert!(r.agree);
        assert!(moredenoms_check(&poly(&f3, "t^2-t"), &[(t.clone(), 2)]).is_err());
        assert!(!no_factor_divides_shifted(&[(t.clone(), 1), (tm1, 1)]));
    }
}
