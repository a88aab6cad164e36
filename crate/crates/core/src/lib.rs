//! Computations with logarithmic differential forms in characteristic p.
//!
//! The crate provides exact F_p linear algebra ([`gf`]), log forms on
//! coordinate charts ([`forms`]), the Cartier operator and `ν(n)`
//! ([`cartier`]), per-weight exact sequences ([`sequences`]), Čech
//! cohomology of twisted log forms on projective space and on the blowup
//! of affine space ([`cech`]), Gysin/purity checks ([`purity`]) and the
//! verification suites behind the `logpurity` binary ([`suites`]).

pub mod cartier;
pub mod cech;
pub mod cli;
pub mod error;
pub mod exterior;
pub mod forms;
pub mod gf;
pub mod purity;
pub mod suites;
pub mod sequences;

pub use error::{Error, Result};
