//! Exhaustive checks of the characterizing properties of `C` on slice bases.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cartier, cartier_slice, inverse_cartier, CartierSlice};
use crate::error::{Error, Result};
use crate::forms::{FormRing, LogForm, Multidegree, WeightSlice};
use crate::gf::FpMatrix;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub checked: usize,
    pub failed: usize,
}

impl Tally {
    fn record(&mut self, ok: bool) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
        }
    }

    fn merge(&mut self, o: Tally) {
        self.checked += o.checked;
        self.failed += o.failed;
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartierAxiomReport {
    pub ring: String,
    /// `C(c) = c` for constants.
    pub unit: Tally,
    /// `C(f^p ω) = f C(ω)`.
    pub frobenius_linear: Tally,
    /// `C(ω ∧ ω′) = C(ω) ∧ C(ω′)`.
    pub multiplicative: Tally,
    /// `ker C ∩ Z_w = B_w`, both inclusions, per slice.
    pub kernel_is_exact: Tally,
    /// `C(f^{p−1} df) = df` for monomials and binomials `f`.
    pub log_derivative: Tally,
    /// `C(C⁻¹(η)) = η` on slice bases.
    pub inverse: Tally,
    /// `C(Z_{pw}) = Ω_w`, and `Z_w = B_w` when `p ∤ w`.
    pub weight_scaling: Tally,
}

impl CartierAxiomReport {
    pub fn passed(&self) -> bool {
        self.tallies().iter().all(|t| t.ok() && t.checked > 0)
    }

    pub fn tallies(&self) -> [Tally; 7] {
        [
            self.unit,
            self.frobenius_linear,
            self.multiplicative,
            self.kernel_is_exact,
            self.log_derivative,
            self.inverse,
            self.weight_scaling,
        ]
    }

    fn merge(&mut self, o: &CartierAxiomReport) {
        self.unit.merge(o.unit);
        self.frobenius_linear.merge(o.frobenius_linear);
        self.multiplicative.merge(o.multiplicative);
        self.kernel_is_exact.merge(o.kernel_is_exact);
        self.log_derivative.merge(o.log_derivative);
        self.inverse.merge(o.inverse);
        self.weight_scaling.merge(o.weight_scaling);
    }
}

/// `C` through precomputed slice matrices, used where many products are checked.
struct SliceTable {
    slices: HashMap<(usize, Multidegree), (CartierSlice, FpMatrix)>,
}

impl SliceTable {
    fn new(ring: FormRing) -> Result<Self> {
        let keys: Vec<(usize, Multidegree)> = (0..=ring.nvars())
            .flat_map(|j| ring.window_weights().into_iter().map(move |w| (j, w)))
            .collect();
        let slices = keys
            .par_iter()
            .map(|&(j, w)| {
                let cs = cartier_slice(ring, j, w)?;
                let z = FpMatrix::from_columns(ring.field(), cs.source.slice.dim(), &cs.source.z_basis);
                Ok(((j, w), (cs, z)))
            })
            .collect::<Result<_>>()?;
        Ok(SliceTable { slices })
    }

    fn apply(&self, omega: &LogForm) -> Result<LogForm> {
        let ring = *omega.ring();
        let mut out = LogForm::zero(ring, omega.degree());
        for w in omega.weights() {
            let (cs, z) = self.slices.get(&(omega.degree(), w)).ok_or(Error::WindowOverflow { exponent: w.to_vec(ring.nvars()) })?;
            let v = cs.source.slice.coords(&omega.component(&w))?;
            let x = z.solve(&v).map_err(|_| Error::NotClosed)?;
            if let Some(t) = &cs.target {
                out = out.add(&t.form_from_coords(&cs.matrix.mul_vec(&x)?))?;
            }
        }
        Ok(out)
    }
}

fn monomial(ring: FormRing, a: &Multidegree) -> Result<LogForm> {
    LogForm::monomial(ring, 1, &a.to_vec(ring.nvars()))
}

fn power(f: &LogForm, e: u32) -> Result<LogForm> {
    let mut out = LogForm::scalar(*f.ring(), 1);
    for _ in 0..e {
        out = out.wedge(f)?;
    }
    Ok(out)
}

/// Weights of the window with every coordinate within `[-r, r]`.
fn inner_box(ring: FormRing, r: i32) -> Vec<Multidegree> {
    ring.window_weights().into_iter().filter(|w| w.0.iter().all(|x| x.abs() <= r)).collect()
}

fn zero_one_box(ring: FormRing) -> Vec<Multidegree> {
    let m = ring.nvars();
    (0..1u32 << m)
        .map(|bits| Multidegree::from_slice(&(0..m).map(|k| (bits >> k & 1) as i32).collect::<Vec<_>>()))
        .collect()
}

fn per_weight(ring: FormRing, table: &SliceTable, w: Multidegree) -> Result<CartierAxiomReport> {
    let p = ring.p() as i32;
    let mut r = CartierAxiomReport::default();
    for j in 0..=ring.nvars() {
        let (cs, _) = &table.slices[&(j, w)];
        let zb = &cs.source;
        // kernel = exact forms
        let rank = if cs.matrix.rows() == 0 { 0 } else { cs.matrix.rank() };
        let b_killed = zb.b_forms().iter().map(|b| table.apply(b)).collect::<Result<Vec<_>>>()?.iter().all(|x| x.is_zero());
        r.kernel_is_exact.record(b_killed && zb.z_dim() - rank == zb.b_dim());
        // C maps Z_w onto Ω_{w/p}
        r.weight_scaling.record(match &cs.target {
            Some(t) => rank == t.dim(),
            None => zb.z_dim() == zb.b_dim(),
        });
        // C ∘ C⁻¹ = id on the slice basis
        if ring.in_window(&w.scale(p)) {
            for eta in WeightSlice::new(ring, j, w).basis_forms() {
                r.inverse.record(cartier(&inverse_cartier(&eta)?)? == eta);
            }
        }
        // C(f^p ω) = f C(ω)
        for omega in zb.z_forms() {
            let c_omega = table.apply(&omega)?;
            for a in zero_one_box(ring) {
                if a.is_zero() || !ring.in_window(&w.add(a.scale(p))) {
                    continue;
                }
                let f = monomial(ring, &a)?;
                let lhs = table.apply(&monomial(ring, &a.scale(p))?.wedge(&omega)?)?;
                r.frobenius_linear.record(lhs == f.wedge(&c_omega)?);
            }
        }
    }
    Ok(r)
}

/// Runs every property on all slice bases of the window. Products are
/// taken over weights in the inner box of half the radius so that they stay
/// inside the window.
pub fn cartier_axioms(ring: FormRing) -> Result<CartierAxiomReport> {
    let p = ring.p() as i32;
    let field = ring.field();
    let table = SliceTable::new(ring)?;
    let weights = ring.window_weights();
    let parts: Vec<CartierAxiomReport> = weights.par_iter().map(|w| per_weight(ring, &table, *w)).collect::<Result<_>>()?;
    let mut report = CartierAxiomReport { ring: ring.describe(), ..Default::default() };
    for part in &parts {
        report.merge(part);
    }

    for c in field.elements() {
        let f = LogForm::scalar(ring, c as i64);
        report.unit.record(cartier(&f)? == f);
    }

    // f^{p−1} df for monomials with f^p in the window and for binomials
    let mut fs: Vec<LogForm> = Vec::new();
    for a in &weights {
        if !a.is_zero() && ring.in_window(&a.scale(p)) {
            fs.push(monomial(ring, a)?);
        }
    }
    let small = zero_one_box(ring);
    for (i, a) in small.iter().enumerate() {
        for b in &small[i + 1..] {
            if ring.in_window(&a.scale(p)) && ring.in_window(&b.scale(p)) {
                fs.push(monomial(ring, a)?.add(&monomial(ring, b)?)?);
            }
        }
    }
    for f in &fs {
        let df = f.differential();
        let omega = power(f, p as u32 - 1)?.wedge(&df)?;
        report.log_derivative.record(cartier(&omega)? == df);
    }

    // C(ω ∧ ω′) = C(ω) ∧ C(ω′) on closed basis forms of the inner box
    let half = inner_box(ring, ring.radius() / 2);
    let closed: Vec<(LogForm, LogForm)> = half
        .iter()
        .flat_map(|w| (0..=ring.nvars()).map(move |j| (j, *w)))
        .flat_map(|(j, w)| table.slices[&(j, w)].0.source.z_forms())
        .map(|f| Ok((table.apply(&f)?, f)))
        .collect::<Result<_>>()?;
    let mult: Vec<Tally> = closed
        .par_iter()
        .map(|(c1, f1)| {
            let mut t = Tally::default();
            for (c2, f2) in &closed {
                if f1.degree() + f2.degree() > ring.nvars() {
                    continue;
                }
                let lhs = table.apply(&f1.wedge(f2)?)?;
                t.record(lhs == c1.wedge(c2)?);
            }
            Ok(t)
        })
        .collect::<Result<_>>()?;
    for t in mult {
        report.multiplicative.merge(t);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::PrimeField;

    #[test]
    fn axioms_hold_on_small_rings() {
        for p in [2, 3] {
            for log in [&[][..], &[1, 2][..]] {
                let r = FormRing::new(PrimeField::new(p).unwrap(), 2).unwrap().with_log(log).unwrap().with_radius(2 * p as i32).unwrap();
                let rep = cartier_axioms(r).unwrap();
                assert!(rep.passed(), "{rep:?}");
            }
        }
    }
}
