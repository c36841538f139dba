//! Residues modulo a monic polynomial and the unit group `(A/f)^x`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use super::field::Fq;
use super::poly::Poly;
use crate::error::{Error, Result};

/// Largest residue ring `q^{deg f}` that may be enumerated.
pub const ENUMERATION_GUARD: u64 = 10_000_000;

/// Checks that `f` is a usable modulus (monic, nonconstant).
pub fn check_modulus(f: &Poly) -> Result<()> {
    if !f.is_monic() {
        return Err(Error::domain(format!("modulus {f} is not monic")));
    }
    if f.is_constant() {
        return Err(Error::domain("modulus must have degree >= 1"));
    }
    Ok(())
}

/// `q^{deg f}`, or a resource-guard error if it exceeds [`ENUMERATION_GUARD`].
pub fn residue_count(f: &Poly) -> Result<u64> {
    let q = f.field().q() as u64;
    let d = f.deg().max(0) as u32;
    q.checked_pow(d)
        .filter(|&n| n <= ENUMERATION_GUARD)
        .ok_or_else(|| Error::guard(format!("residue ring of size {q}^{d} exceeds {ENUMERATION_GUARD}")))
}

/// The class of a polynomial modulo a monic `f`, stored by its remainder.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Residue {
    modulus: Poly,
    rep: Poly,
}

impl Residue {
    pub fn new(a: &Poly, modulus: &Poly) -> Result<Residue> {
        check_modulus(modulus)?;
        Ok(Residue { modulus: modulus.clone(), rep: a.rem(modulus)? })
    }

    pub(crate) fn from_reduced(rep: Poly, modulus: &Poly) -> Residue {
        debug_assert!(rep.deg() < modulus.deg());
        Residue { modulus: modulus.clone(), rep }
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    /// Canonical representative (`deg < deg f`).
    pub fn rep(&self) -> &Poly {
        &self.rep
    }

    pub fn is_zero(&self) -> bool {
        self.rep.is_zero()
    }

    /// Whether the canonical representative is monic.
    pub fn is_monic(&self) -> bool {
        self.rep.is_monic()
    }

    pub fn is_unit(&self) -> bool {
        self.rep.gcd(&self.modulus).is_one()
    }

    pub fn code(&self) -> u64 {
        self.rep.code()
    }

    pub fn mul(&self, other: &Residue) -> Residue {
        assert_eq!(self.modulus, other.modulus, "residues with different moduli");
        let rep = (&self.rep * &other.rep).rem(&self.modulus).expect("monic modulus");
        Residue { modulus: self.modulus.clone(), rep }
    }

    pub fn add(&self, other: &Residue) -> Residue {
        assert_eq!(self.modulus, other.modulus, "residues with different moduli");
        let rep = (&self.rep + &other.rep).rem(&self.modulus).expect("monic modulus");
        Residue { modulus: self.modulus.clone(), rep }
    }

    pub fn inv(&self) -> Result<Residue> {
        let (g, s, _) = self.rep.xgcd(&self.modulus);
        if !g.is_one() {
            return Err(Error::domain(format!("{} is not a unit mod {}", self.rep, self.modulus)));
        }
        Ok(Residue { modulus: self.modulus.clone(), rep: s.rem(&self.modulus)? })
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.rep, f)
    }
}

impl fmt::Debug for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.rep, self.modulus)
    }
}

/// All residues mod `f` in code order, including zero. Guarded.
pub fn all_residues(f: &Poly) -> Result<impl Iterator<Item = Residue> + '_> {
    check_modulus(f)?;
    let n = residue_count(f)?;
    let field = f.field().clone();
    Ok((0..n).map(move |code| Residue::from_reduced(Poly::from_code(&field, code), f)))
}

/// The unit group `(A/f)^x`, enumerated in code order of canonical reps.
#[derive(Clone, Debug)]
pub struct UnitGroup {
    modulus: Poly,
    elements: Vec<Residue>,
    index: HashMap<u64, usize>,
}

impl UnitGroup {
    pub fn new(f: &Poly) -> Result<UnitGroup> {
        check_modulus(f)?;
        residue_count(f)?;
        let elements: Vec<Residue> = all_residues(f)?.filter(|r| !r.is_zero() && r.is_unit()).collect();
        let index = elements.iter().enumerate().map(|(i, r)| (r.code(), i)).collect();
        Ok(UnitGroup { modulus: f.clone(), elements, index })
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn field(&self) -> &Fq {
        self.modulus.field()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Residue] {
        &self.elements
    }

    pub fn get(&self, i: usize) -> &Residue {
        &self.elements[i]
    }

    /// Position of a residue (any representative) in the enumeration.
    pub fn position(&self, a: &Poly) -> Option<usize> {
        let rep = a.rem(&self.modulus).ok()?;
        self.index.get(&rep.code()).copied()
    }

    pub fn position_of_code(&self, code: u64) -> Option<usize> {
        self.index.get(&code).copied()
    }

    /// Index of the product of elements `i` and `j`.
    pub fn mul_index(&self, i: usize, j: usize) -> usize {
        let prod = self.elements[i].mul(&self.elements[j]);
        self.index[&prod.code()]
    }

    pub fn identity_index(&self) -> usize {
        self.index[&1]
    }
}

/// Memoized [`UnitGroup::new`]. Enumerating by gcd dominates bracket tests
/// that revisit the same modulus, so groups are shared; the memo is dropped
/// wholesale once it holds too many residues.
pub fn unit_group(f: &Poly) -> Result<Arc<UnitGroup>> {
    const MEMO_BUDGET: usize = 1 << 22;
    type Memo = (usize, HashMap<Poly, Arc<UnitGroup>>);
    static MEMO: OnceLock<Mutex<Memo>> = OnceLock::new();
    let memo = MEMO.get_or_init(Default::default);
    if let Some(g) = memo.lock().expect("unit group memo").1.get(f) {
        return Ok(g.clone());
    }
    let g = Arc::new(UnitGroup::new(f)?);
    let mut guard = memo.lock().expect("unit group memo");
    if guard.0 + g.len() > MEMO_BUDGET {
        *guard = Default::default();
    }
    guard.0 += g.len();
    guard.1.insert(f.clone(), g.clone());
    Ok(g)
}

/// The function-field Euler value `q^{deg f} prod (1 - q^{-deg f_i})` over the
/// distinct irreducible factors of `f`, computed from a factorization.
pub fn euler_phi(f: &Poly) -> u64 {
    let q = f.field().q() as u64;
    f.factor().iter().fold(1u64, |acc, (m, e)| {
        let d = m.deg() as u32;
        acc * (q.pow(d * e) - q.pow(d * (e - 1)))
    })
}
