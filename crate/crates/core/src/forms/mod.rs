//! Logarithmic differential forms on coordinate charts.
//!
//! A [`FormRing`] is `F_p[T_1..T_m]` (optionally with some variables
//! inverted) carrying the log structure of the divisors `T_i = 0` for `i`
//! in its log set. Forms are free over the ring with basis
//! `⋀ g_i`, where `g_i = dlog T_i` on log variables and `dT_i` elsewhere.
//! Internally every term `T^a ⋀ g_I` is also viewed as `T^w dlog T_I`
//! with torus weight `w = a + e_{I∖L}`; `d`, wedge and Frobenius act on
//! that description by simple integer operations.

mod form;
mod notation;
mod ring;
mod slice;

pub use form::LogForm;
pub use ring::{FormRing, GenSet, Multidegree, Term, DEFAULT_RADIUS, MAX_VARS};
pub use slice::{differential_matrix, WeightSlice};
