//! Purity along a coordinate divisor `Z = V(T_z)` on one affine chart.
//!
//! The part of `Ω^n(log(D+Z))` with a pole along `Z` is the cokernel of
//! `Ω^n(log D) ↪ Ω^n(log(D+Z))`; the residue identifies it with
//! `Ω^{n−1}_Z(log D|_Z)`, and likewise for closed forms. Everything is
//! computed weight slice by weight slice.

mod iterated;
mod nu;
mod square;

use serde::{Deserialize, Serialize};

pub use iterated::{iterated_purity, IteratedPurityReport, StageDims};
pub use nu::{nu_purity_report, NuPurityReport};
pub use square::{commuting_square, Decomposition, SquareReport};

use crate::cartier::zb_decomposition;
use crate::error::{Error, Result};
use crate::forms::{FormRing, LogForm, Multidegree, WeightSlice};
use crate::gf::{complement_in, in_span, span_rank, FpMatrix};

/// A ring with log set `L` and a distinguished log variable `T_z`; the
/// background divisor is `D = L ∖ {z}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GysinSetup {
    ring: FormRing,
    z: u8,
    pos: usize,
}

/// Serializable description of a [`GysinSetup`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetupInfo {
    pub p: u32,
    pub m: usize,
    pub log: Vec<u8>,
    pub inverted: Vec<u8>,
    pub z: u8,
    pub radius: i32,
}

impl GysinSetup {
    pub fn new(ring: FormRing, z: u8) -> Result<Self> {
        let pos = ring.position(z)?;
        if !ring.is_log(pos) {
            return Err(Error::NotLogVariable(z));
        }
        if ring.is_laurent(pos) {
            return Err(Error::invalid(format!("T{z} is inverted and cannot cut out a divisor")));
        }
        Ok(GysinSetup { ring, z, pos })
    }

    /// `Ω(log(D+Z))`.
    pub fn ring(&self) -> FormRing {
        self.ring
    }

    pub fn z(&self) -> u8 {
        self.z
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    /// `Ω(log D)`: same variables, `T_z` no longer logarithmic.
    pub fn background(&self) -> FormRing {
        self.ring.with_log_mask(self.ring.log_mask() & !(1 << self.pos))
    }

    /// `Ω_Z(log D|_Z)`.
    pub fn divisor(&self) -> FormRing {
        self.ring.drop_variable(self.pos)
    }

    pub fn info(&self) -> SetupInfo {
        let r = &self.ring;
        SetupInfo {
            p: r.p(),
            m: r.nvars(),
            log: r.log_labels(),
            inverted: (0..r.nvars()).filter(|&k| r.is_laurent(k)).map(|k| r.label(k)).collect(),
            z: self.z,
            radius: r.radius(),
        }
    }

    /// The slice of `Ω^{n−1}_Z` receiving residues from weight `w`; zero
    /// unless `w_z = 0`.
    pub fn target_slice(&self, n: usize, w: Multidegree) -> Option<WeightSlice> {
        let div = self.divisor();
        if n == 0 {
            return None;
        }
        Some(if w.0[self.pos] == 0 {
            WeightSlice::new(div, n - 1, w.remove(self.pos))
        } else {
            WeightSlice::empty(div, n - 1, w.remove(self.pos))
        })
    }
}

fn rows_of(m: &FpMatrix) -> Vec<Vec<u8>> {
    (0..m.rows()).map(|r| m.row(r).to_vec()).collect()
}

/// Pieces shared by the all-forms and closed-forms computations at one weight.
struct SliceMaps {
    big: WeightSlice,
    small: WeightSlice,
    target: Option<WeightSlice>,
    /// `Ω^n(log D)_w → Ω^n(log(D+Z))_w`.
    inclusion: FpMatrix,
    /// `Ω^n(log(D+Z))_w → Ω^{n−1}_{Z, w'}`.
    residue: FpMatrix,
}

impl SliceMaps {
    fn new(setup: &GysinSetup, n: usize, w: Multidegree) -> Result<Self> {
        let ring = setup.ring();
        let big = WeightSlice::new(ring, n, w);
        let small = WeightSlice::new(setup.background(), n, w);
        let inclusion = small.matrix_of(&big, |f| f.reinterpret(ring))?;
        let target = setup.target_slice(n, w);
        let residue = match &target {
            Some(t) => big.matrix_of(t, |f| f.residue(setup.z()))?,
            None => FpMatrix::zeros(ring.field(), 0, big.dim()),
        };
        Ok(SliceMaps { big, small, target, inclusion, residue })
    }

    fn target_dim(&self) -> usize {
        self.target.as_ref().map_or(0, |t| t.dim())
    }

    /// Standard basis vectors of the big slice completing the image of the inclusion.
    fn coker_basis(&self) -> Vec<Vec<u8>> {
        self.inclusion.cokernel_complement()
    }

    /// Coordinates of `v` in the cokernel basis.
    fn coker_coords(&self, coker: &[Vec<u8>], v: &[u8]) -> Result<Vec<u8>> {
        let mut cols = self.inclusion.columns();
        let sub = cols.len();
        cols.extend(coker.iter().cloned());
        let x = FpMatrix::from_columns(self.big.ring().field(), self.big.dim(), &cols).solve(v)?;
        Ok(x[sub..].to_vec())
    }
}

/// The cokernel of `Ω^n(log D) ↪ Ω^n(log(D+Z))` at one weight and its
/// comparison with `Ω^{n−1}_Z(log D|_Z)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GysinSlice {
    pub weight: Vec<i32>,
    pub n: usize,
    pub sub_dim: usize,
    pub total_dim: usize,
    pub coker_dim: usize,
    pub target_dim: usize,
    /// Residue vanishes on the subspace and induces a bijection on the cokernel.
    pub iso: bool,
    /// Rows: target basis; columns: cokernel basis (standard basis vectors
    /// of the total slice).
    pub matrix: Vec<Vec<u8>>,
}

pub fn gysin_residue(setup: &GysinSetup, n: usize, w: Multidegree) -> Result<GysinSlice> {
    let maps = SliceMaps::new(setup, n, w)?;
    let field = setup.ring().field();
    let coker = maps.coker_basis();
    let iso_m = maps.residue.mul(&FpMatrix::from_columns(field, maps.big.dim(), &coker))?;
    let kills_sub = maps.residue.mul(&maps.inclusion)?.is_zero();
    let td = maps.target_dim();
    let iso = kills_sub && coker.len() == td && iso_m.rank() == td;
    Ok(GysinSlice {
        weight: w.to_vec(setup.ring().nvars()),
        n,
        sub_dim: maps.small.dim(),
        total_dim: maps.big.dim(),
        coker_dim: coker.len(),
        target_dim: td,
        iso,
        matrix: rows_of(&iso_m),
    })
}

/// Closed-forms analogue of [`GysinSlice`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedGysinSlice {
    pub weight: Vec<i32>,
    pub n: usize,
    pub coker_dim: usize,
    pub target_dim: usize,
    /// `ZΩ^n(log(D+Z))/ZΩ^n(log D) → ZΩ^{n−1}_Z` is bijective.
    pub iso: bool,
    /// The closed cokernel injects into the all-forms cokernel and the
    /// all-forms iso matrix restricts to the closed residue.
    pub compatible: bool,
    /// Residues of exact forms are exact.
    pub exact_to_exact: bool,
    /// At weights prime to p closed forms are exact on both sides.
    pub prime_to_p_exact: bool,
    pub matrix: Vec<Vec<u8>>,
}

pub fn gysin_residue_closed(setup: &GysinSetup, n: usize, w: Multidegree) -> Result<ClosedGysinSlice> {
    let maps = SliceMaps::new(setup, n, w)?;
    let field = setup.ring().field();
    let dim = maps.big.dim();
    let big_zb = zb_decomposition(setup.ring(), n, w);
    let small_zb = zb_decomposition(setup.background(), n, w);
    let target_zb = match &maps.target {
        Some(t) if t.dim() > 0 => Some(zb_decomposition(*t.ring(), n - 1, t.weight())),
        _ => None,
    };
    let (tz, tb) = target_zb.as_ref().map_or((Vec::new(), Vec::new()), |z| (z.z_basis.clone(), z.b_basis.clone()));

    let sub_z: Vec<Vec<u8>> = small_zb.z_basis.iter().map(|z| maps.inclusion.mul_vec(z)).collect::<Result<_>>()?;
    let reps = complement_in(field, dim, &sub_z, &big_zb.z_basis);
    let images: Vec<Vec<u8>> = reps.iter().map(|r| maps.residue.mul_vec(r)).collect::<Result<_>>()?;
    let res_of_z: Vec<Vec<u8>> = big_zb.z_basis.iter().map(|z| maps.residue.mul_vec(z)).collect::<Result<_>>()?;
    let td = maps.target_dim();
    let image_rank = span_rank(field, td, &res_of_z);
    let iso = images.iter().all(|v| in_span(field, &tz, v))
        && image_rank == tz.len()
        && big_zb.z_dim() - image_rank == sub_z.len()
        && reps.len() == tz.len();

    let coker = maps.coker_basis();
    let iso_all = maps.residue.mul(&FpMatrix::from_columns(field, dim, &coker))?;
    let mut joined = maps.inclusion.columns();
    joined.extend(reps.iter().cloned());
    let mut compatible = span_rank(field, dim, &joined) == maps.inclusion.rank() + reps.len();
    for (r, img) in reps.iter().zip(&images) {
        let c = maps.coker_coords(&coker, r)?;
        compatible &= iso_all.mul_vec(&c)? == *img;
    }

    let exact_to_exact =
        big_zb.b_basis.iter().map(|b| maps.residue.mul_vec(b)).collect::<Result<Vec<_>>>()?.iter().all(|v| in_span(field, &tb, v));
    let prime_to_p_exact = w.div_exact(field.p() as i32).is_some()
        || (big_zb.z_dim() == big_zb.b_dim() && target_zb.as_ref().is_none_or(|z| z.z_dim() == z.b_dim()));

    let closed_iso = FpMatrix::from_columns(field, td, &images);
    Ok(ClosedGysinSlice {
        weight: w.to_vec(setup.ring().nvars()),
        n,
        coker_dim: reps.len(),
        target_dim: tz.len(),
        iso,
        compatible,
        exact_to_exact,
        prime_to_p_exact,
        matrix: rows_of(&closed_iso),
    })
}

/// `η = γ + η′ ∧ dlog T_z` with `γ` free of `dlog T_z`.
pub(crate) fn split_off_dlog(eta: &LogForm, pos: usize) -> Result<(LogForm, LogForm)> {
    let ring = *eta.ring();
    let f = ring.field();
    let mut gamma = LogForm::zero(ring, eta.degree());
    let mut rest = LogForm::zero(ring, eta.degree().saturating_sub(1));
    for (w, g, c) in eta.ambient_terms() {
        if g.contains(pos) {
            // move dlog T_z past the generators after it
            let after = g.len() - 1 - g.rank_of(pos);
            let c = if after % 2 == 1 { f.neg(c) } else { c };
            rest.add_ambient(w, g.without(pos), c)?;
        } else {
            gamma.add_ambient(w, g, c)?;
        }
    }
    Ok((gamma, rest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::PrimeField;

    pub(super) fn setup(p: u32, m: usize, log: &[u8], z: u8, radius: i32) -> GysinSetup {
        let r = FormRing::new(PrimeField::new(p).unwrap(), m).unwrap().with_log(log).unwrap().with_radius(radius).unwrap();
        GysinSetup::new(r, z).unwrap()
    }

    #[test]
    fn divisor_must_be_logarithmic() {
        let r = FormRing::new(PrimeField::new(3).unwrap(), 2).unwrap().with_log(&[1]).unwrap();
        assert!(matches!(GysinSetup::new(r, 2), Err(Error::NotLogVariable(2))));
    }

    #[test]
    fn curve_case() {
        let s = setup(3, 1, &[1], 1, 4);
        let g = gysin_residue(&s, 1, Multidegree::zero()).unwrap();
        assert_eq!((g.coker_dim, g.target_dim), (1, 1));
        assert!(g.iso);
        assert_eq!(g.matrix, vec![vec![1]]);
        for w in s.ring().window_weights() {
            assert_eq!(gysin_residue(&s, 0, w).unwrap().coker_dim, 0);
        }
    }

    #[test]
    fn surface_two_forms() {
        let s = setup(2, 2, &[1, 2], 1, 3);
        for w in s.ring().window_weights() {
            let g = gysin_residue(&s, 2, w).unwrap();
            assert!(g.iso, "{w:?}");
            let expect = WeightSlice::new(s.divisor(), 1, w.remove(0)).dim();
            assert_eq!(g.coker_dim, if w.0[0] == 0 { expect } else { 0 });
        }
    }

    #[test]
    fn closed_version_is_compatible() {
        for p in [2, 3] {
            let s = setup(p, 2, &[1, 2], 1, 2 * p as i32);
            for n in 0..=2 {
                for w in s.ring().window_weights() {
                    let c = gysin_residue_closed(&s, n, w).unwrap();
                    assert!(c.iso && c.compatible && c.exact_to_exact && c.prime_to_p_exact, "{c:?}");
                }
            }
        }
        let s = setup(3, 1, &[1], 1, 3);
        let c = gysin_residue_closed(&s, 1, Multidegree::zero()).unwrap();
        assert_eq!((c.coker_dim, c.matrix.clone()), (1, vec![vec![1]]));
    }

    #[test]
    fn split_recovers_form() {
        let s = setup(3, 3, &[1, 2, 3], 2, 4);
        let r = s.ring();
        let eta = LogForm::parse(r, "T1 dlogT1^dlogT2 + dlogT1^dlogT3 + T3 dlogT2^dlogT3").unwrap();
        let (g, e) = split_off_dlog(&eta, 1).unwrap();
        assert!(!g.is_zero());
        let back = g.add(&e.wedge(&LogForm::dlog(r, 2).unwrap()).unwrap()).unwrap();
        assert_eq!(back, eta);
    }
}
