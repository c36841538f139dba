//! Exact arithmetic in `F_q`, in `A = F_q[t]`, in residue rings `A/f` and in
//! the unit group `(A/f)^x`.

mod field;
mod grammar;
mod poly;
mod residue;

pub use field::{prime_power, Fq, FqElem, MAX_FIELD_SIZE};
pub use grammar::{make_field, parse_elem, parse_fraction, parse_poly, parse_poly_in};
pub use poly::{enumerate_monics, Poly};
pub use residue::{all_residues, check_modulus, euler_phi, residue_count, unit_group, Residue, UnitGroup, ENUMERATION_GUARD};
