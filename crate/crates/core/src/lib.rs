//! Thakur Gamma values over `F_q[t]`: exact bracket-relation and CM
//! classification over residues mod `f`, and truncated Laurent-series
//! evaluation of `Γ(a/f)`, the Carlitz period and the Carlitz exponential.
//!
//! ```
//! use thakur_gamma::cm_analyzer::classify;
//! use thakur_gamma::ffpoly::{parse_poly, Fq};
//!
//! let f3 = Fq::new(3).unwrap();
//! let c = classify(&parse_poly(&f3, "t^2-t").unwrap()).unwrap();
//! assert_eq!(c.m, 2);
//! ```
//!
//! The guide in `book/` walks through each module; its snippets run as
//! doc-tests of this crate.

pub mod error;
pub mod ffpoly;
pub mod bracket;
pub mod cm_analyzer;
pub mod laurent;
pub mod recog;
pub mod special_values;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/fields.md")]
    pub struct Fields;
    #[doc = include_str!("../../../book/src/series.md")]
    pub struct Series;
    #[doc = include_str!("../../../book/src/gamma.md")]
    pub struct Gamma;
    #[doc = include_str!("../../../book/src/brackets.md")]
    pub struct Brackets;
    #[doc = include_str!("../../../book/src/classification.md")]
    pub struct Classification;
    #[doc = include_str!("../../../book/src/recognition.md")]
    pub struct Recognition;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
