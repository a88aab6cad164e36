use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{FormRing, LogForm, Multidegree, WeightSlice};
use crate::gf::{in_span, FpMatrix};

/// Restriction of log forms to the log divisor `Z = V(T_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FundamentalReport {
    pub label: u8,
    pub weights_checked: usize,
    /// `i*Ω^j_X → Ω^{j,log}_Z` is an isomorphism on every slice and degree.
    pub restriction_iso: bool,
    /// `d(I/I²)` vanishes in `i*Ω¹_X`.
    pub conormal_image_zero: bool,
    /// Per degree `j`: total dimension of `i*Ω^j_X` over the window.
    pub dims: Vec<usize>,
}

/// Checks that for `Z = V(T_i)` with `i` in the log set, `d: I/I² → i*Ω_X`
/// is zero and `i*Ω^{log}_X ≅ Ω^{log}_Z`, where `Z` carries the pulled-back
/// log structure: the log forms of `Z` plus the extra generator `γ = dlog T_i`.
pub fn fundamental_ses_check(ring: FormRing, label: u8) -> Result<FundamentalReport> {
    let pos = ring.position(label)?;
    if !ring.is_log(pos) {
        return Err(Error::NotLogVariable(label));
    }
    if ring.is_laurent(pos) {
        return Err(Error::invalid("divisor variable must not be inverted"));
    }
    let field = ring.field();
    let t = LogForm::variable(ring, label)?;
    let divisor = ring.drop_variable(pos);
    let m = ring.nvars();
    let mut restriction_iso = true;
    let mut conormal_image_zero = true;
    let mut dims = vec![0usize; m + 1];
    let weights = ring.window_weights();
    for w in &weights {
        let below = w.sub(Multidegree::unit(pos));
        for j in 0..=m {
            let slice = WeightSlice::new(ring, j, *w);
            let lower = WeightSlice::new(ring, j, below);
            // T_i·Ω^j at this weight
            let image = lower.matrix_of(&slice, |f| t.wedge(f))?;
            let ideal: Vec<Vec<u8>> = image.image_basis();
            let quotient_dim = slice.dim() - ideal.len();
            dims[j] += quotient_dim;
            // Ω^{j,log}_Z = Ω^j_Z ⊕ γ ∧ Ω^{j−1}_Z, nonzero only at w_i = 0
            let (zj, zj1) = if w.0[pos] == 0 {
                let wz = w.remove(pos);
                (
                    WeightSlice::new(divisor, j, wz),
                    if j > 0 { WeightSlice::new(divisor, j - 1, wz) } else { WeightSlice::empty(divisor, 0, wz) },
                )
            } else {
                (WeightSlice::empty(divisor, j, w.remove(pos)), WeightSlice::empty(divisor, j.saturating_sub(1), w.remove(pos)))
            };
            let target_dim = zj.dim() + zj1.dim();
            if quotient_dim != target_dim {
                restriction_iso = false;
                continue;
            }
            if w.0[pos] != 0 {
                continue;
            }
            // the restriction map on basis forms T^w dlog T_I
            let mut mat = FpMatrix::zeros(field, target_dim, slice.dim());
            for (c, g) in slice.gensets().iter().enumerate() {
                if g.contains(pos) {
                    let negative = g.rank_of(pos) % 2 == 1;
                    let rest = g.without(pos).remove_shift(pos);
                    let r = zj1.index_of(rest).ok_or_else(|| Error::internal("missing divisor basis element"))?;
                    mat.set(zj.dim() + r, c, if negative { field.neg(1) } else { 1 });
                } else {
                    let r = zj.index_of(g.remove_shift(pos)).ok_or_else(|| Error::internal("missing divisor basis element"))?;
                    mat.set(r, c, 1);
                }
            }
            if mat.rank() != target_dim {
                restriction_iso = false;
            }
        }
        // d(T_i·f) ∈ T_i·Ω¹ for every monomial f
        if w.0[pos] >= 1 {
            let funcs = WeightSlice::new(ring, 0, *w);
            let ones = WeightSlice::new(ring, 1, *w);
            let lower = WeightSlice::new(ring, 1, below);
            let ideal = lower.matrix_of(&ones, |f| t.wedge(f))?.image_basis();
            for f in funcs.basis_forms() {
                let v = ones.coords(&f.differential())?;
                if !in_span(field, &ideal, &v) {
                    conormal_image_zero = false;
                }
            }
        }
    }
    Ok(FundamentalReport { label, weights_checked: weights.len(), restriction_iso, conormal_image_zero, dims })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::PrimeField;

    #[test]
    fn divisor_of_log_variable() {
        let r = FormRing::new(PrimeField::new(3).unwrap(), 2).unwrap().with_log(&[1]).unwrap().with_radius(3).unwrap();
        let rep = fundamental_ses_check(r, 1).unwrap();
        assert!(rep.restriction_iso && rep.conormal_image_zero);
        // degree 1 at weight (0, 0): only dlog T1; at (0, k ≥ 1): dlog T1 and dT2
        assert_eq!(rep.dims[1], 1 + 2 * 3);
    }

    #[test]
    fn non_log_ideal_is_rejected() {
        let r = FormRing::new(PrimeField::new(3).unwrap(), 2).unwrap();
        assert!(matches!(fundamental_ses_check(r, 1), Err(Error::NotLogVariable(1))));
    }
}
