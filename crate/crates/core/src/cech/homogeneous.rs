//! Homogeneous model of twisted log forms on `P^n`.
//!
//! A section of `Ω^j(log D_S)(l)` of torus weight `w` (with `Σ w = l`) on
//! `U_I` is `X^w · Σ_A c_A dlog X_A`, where `c ∈ ⋀^j F_p^{n+1}` is killed by
//! contraction with the Euler field and only involves `dlog X_k` for `k` in
//! `I`, in `S`, or with `w_k ≥ 1`. Every Čech restriction is then the
//! identity on `c`, so the whole complex lives in one ambient space.

use crate::exterior::{contraction_kernel, projective_support, WedgeBasis};
use crate::forms::GenSet;
use crate::gf::{FpMatrix, PrimeField};

/// Which subspace of `⋀^j` the sections occupy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SectionKind {
    /// Forms on projective space: the Euler contraction must vanish.
    Forms,
    /// `Ω^{j,log}` of the exceptional divisor of a point blowup: the extra
    /// generator `dlog` of the ideal lifts the contraction condition.
    PulledBack,
}

/// Basis of the weight-`w` sections on `U_I`, as vectors in `⋀^j F_p^{n+1}`.
pub fn proj_section_space(
    field: PrimeField,
    wedge: &WedgeBasis,
    kind: SectionKind,
    log_mask: u32,
    chart: GenSet,
    w: &[i32],
) -> Vec<Vec<u8>> {
    let Some(mask) = projective_support(chart, log_mask, w) else {
        return Vec::new();
    };
    match kind {
        SectionKind::Forms => contraction_kernel(field, wedge, mask),
        SectionKind::PulledBack => wedge.span_of(mask),
    }
}

/// A Čech complex over the standard covering of `P^n` whose cochains are
/// subspaces of `⊕_I ⋀^j F_p^{n+1}` and whose restrictions are inclusions.
#[derive(Clone, Debug)]
pub struct CechComplex {
    pub field: PrimeField,
    pub charts: usize,
    pub wedge: WedgeBasis,
    /// `levels[k]` lists the `(k+1)`-fold intersections in lex order.
    pub levels: Vec<Vec<GenSet>>,
    /// `sections[k][t]` is a basis of the sections on `levels[k][t]`.
    pub sections: Vec<Vec<Vec<Vec<u8>>>>,
    /// Charts missing the support: intersections meeting them carry no
    /// sections and restrictions into them are zero (push-forwards from a divisor).
    pub outside: u32,
}

impl CechComplex {
    pub fn new<F>(field: PrimeField, charts: usize, degree: usize, mut sections: F) -> Self
    where
        F: FnMut(&WedgeBasis, GenSet) -> Vec<Vec<u8>>,
    {
        let wedge = WedgeBasis::new(charts, degree);
        let all = (1u32 << charts) - 1;
        let levels: Vec<Vec<GenSet>> = (1..=charts).map(|s| GenSet::subsets(all, s)).collect();
        let sections = levels.iter().map(|lv| lv.iter().map(|&i| sections(&wedge, i)).collect()).collect();
        CechComplex { field, charts, wedge, levels, sections, outside: 0 }
    }

    /// Declares the sheaf to be supported away from the charts in `mask`.
    pub fn supported_off(mut self, mask: u32) -> Self {
        self.outside = mask;
        for (lv, secs) in self.levels.iter().zip(self.sections.iter_mut()) {
            for (set, s) in lv.iter().zip(secs.iter_mut()) {
                if set.0 & mask != 0 {
                    s.clear();
                }
            }
        }
        self
    }

    pub fn ambient_dim(&self, k: usize) -> usize {
        self.levels.get(k).map_or(0, |l| l.len()) * self.wedge.dim()
    }

    pub fn cochain_dim(&self, k: usize) -> usize {
        self.sections.get(k).map_or(0, |l| l.iter().map(|s| s.len()).sum())
    }

    /// Columns: a basis of `C^k`, embedded in the ambient space.
    pub fn basis(&self, k: usize) -> FpMatrix {
        let amb = self.ambient_dim(k);
        let mut cols = Vec::with_capacity(self.cochain_dim(k));
        if k < self.levels.len() {
            let d = self.wedge.dim();
            for (t, secs) in self.sections[k].iter().enumerate() {
                for s in secs {
                    let mut v = vec![0u8; amb];
                    v[t * d..(t + 1) * d].copy_from_slice(s);
                    cols.push(v);
                }
            }
        }
        FpMatrix::from_columns(self.field, amb, &cols)
    }

    /// The ambient coboundary `(δc)_I = Σ_t (−1)^t c_{I ∖ i_t}`.
    pub fn coboundary(&self, k: usize) -> FpMatrix {
        let d = self.wedge.dim();
        let mut m = FpMatrix::zeros(self.field, self.ambient_dim(k + 1), self.ambient_dim(k));
        if k + 1 >= self.levels.len() {
            return m;
        }
        for (r, set) in self.levels[k + 1].iter().enumerate() {
            if set.0 & self.outside != 0 {
                continue;
            }
            for (t, i) in set.positions().enumerate() {
                let face = set.without(i);
                let c = self.levels[k].binary_search(&face).expect("faces are listed");
                let v = if t % 2 == 0 { 1 } else { self.field.neg(1) };
                for x in 0..d {
                    m.set(r * d + x, c * d + x, v);
                }
            }
        }
        m
    }

    /// Ambient images of the basis of `C^k` under `δ`.
    pub fn coboundary_image(&self, k: usize) -> FpMatrix {
        self.coboundary(k).mul(&self.basis(k)).expect("shapes agree")
    }

    /// `dim Ȟ^k` for `k = 0..charts`.
    pub fn dims(&self) -> Vec<usize> {
        let ranks: Vec<usize> = (0..self.charts).map(|k| self.coboundary_image(k).rank()).collect();
        (0..self.charts)
            .map(|k| self.cochain_dim(k) - ranks[k] - if k > 0 { ranks[k - 1] } else { 0 })
            .collect()
    }

    pub fn squares_to_zero(&self) -> bool {
        (0..self.charts.saturating_sub(1)).all(|k| {
            let dd = self.coboundary(k + 1).mul(&self.coboundary_image(k)).expect("shapes agree");
            dd.is_zero()
        })
    }

    /// Whether an ambient vector is a cochain, i.e. each component is a section.
    pub fn is_cochain(&self, k: usize, v: &[u8]) -> bool {
        let d = self.wedge.dim();
        self.sections[k]
            .iter()
            .enumerate()
            .all(|(t, secs)| crate::gf::in_span(self.field, secs, &v[t * d..(t + 1) * d]))
    }
}

/// The sign class of each coordinate (`< 0`, `= 0`, `≥ 1`), which is all a
/// homogeneous slice depends on.
pub fn sign_pattern(w: &[i32]) -> Vec<i8> {
    w.iter().map(|&x| x.signum() as i8).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complex(p: u32, n: usize, j: usize, log_mask: u32, w: &[i32]) -> CechComplex {
        let f = PrimeField::new(p).unwrap();
        CechComplex::new(f, n + 1, j, |wb, i| proj_section_space(f, wb, SectionKind::Forms, log_mask, i, w))
    }

    #[test]
    fn p1_structure_sheaf() {
        assert_eq!(complex(3, 1, 0, 0, &[0, 0]).dims(), vec![1, 0]);
        // O(−2): only X0^{−1} X1^{−1} contributes, to H^1
        assert_eq!(complex(3, 1, 0, 0, &[-1, -1]).dims(), vec![0, 1]);
        assert_eq!(complex(3, 1, 0, 0, &[-2, 0]).dims(), vec![0, 0]);
    }

    #[test]
    fn p2_hodge_numbers_at_weight_zero() {
        for j in 0..=2 {
            let c = complex(2, 2, j, 0, &[0, 0, 0]);
            assert!(c.squares_to_zero());
            let mut expect = vec![0; 3];
            expect[j] = 1;
            assert_eq!(c.dims(), expect, "j={j}");
        }
    }

    #[test]
    fn contraction_rejects_plain_dlog_wedge() {
        let f = PrimeField::new(3).unwrap();
        let wb = WedgeBasis::new(2, 2);
        let secs = proj_section_space(f, &wb, SectionKind::Forms, 0, GenSet::from_positions(&[0, 1]), &[0, 0]);
        assert!(secs.is_empty());
    }
}
