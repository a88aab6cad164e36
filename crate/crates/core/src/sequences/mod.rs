//! Exact sequences realized slice by slice, with exactness decided by ranks.

mod complex;
mod euler;
mod filtration;
mod fundamental;
mod pullback;
mod residue;

pub use complex::{ComplexSummary, SliceComplex};
pub use euler::{euler_complex, EulerSlices};
pub use filtration::{filtration, FiltrationReport, FiltrationSpec};
pub use fundamental::{fundamental_ses_check, FundamentalReport};
pub use pullback::{pullback_ses, PullbackSlices, EXCEPTIONAL_LOG_MASK};
pub use residue::{closed_residue_complex, residue_complexes, residue_sweep, ResidueFamily, ResidueSweep};
