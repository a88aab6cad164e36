use super::complex::SliceComplex;
use crate::error::{Error, Result};
use crate::exterior::{contract, contraction_kernel, projective_support, WedgeBasis};
use crate::forms::GenSet;
use crate::gf::{coordinates, PrimeField};

/// The Euler sequence `0 → Ω^j(l) → ⋀^j(O(−1)^{n+1})(l) → Ω^{j−1}(l) → 0` on
/// `P^n` at torus weight `w` (with `Σ w = l`), one slice complex per chart
/// `U_I`, `I` a nonempty subset of `{0..n}`.
#[derive(Clone, Debug)]
pub struct EulerSlices {
    pub n: usize,
    pub j: usize,
    pub weight: Vec<i32>,
    pub charts: Vec<(Vec<usize>, SliceComplex)>,
}

impl EulerSlices {
    pub fn exact(&self) -> bool {
        self.charts.iter().all(|(_, c)| c.is_exact())
    }
}

/// In the basis `X^w dlog X_A`: the middle term is spanned by `e_A` with `A`
/// inside the support, the left term is the part killed by contraction with
/// the Euler field, and the right map is that contraction.
pub fn euler_complex(field: PrimeField, n: usize, j: usize, w: &[i32]) -> Result<EulerSlices> {
    if w.len() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, found: w.len() });
    }
    if j > n {
        return Err(Error::invalid("form degree exceeds dimension"));
    }
    let top = WedgeBasis::new(n + 1, j);
    let low = WedgeBasis::new(n + 1, j.saturating_sub(1));
    let mut charts = Vec::new();
    for size in 1..=n + 1 {
        for chart in GenSet::subsets((1u32 << (n + 1)) - 1, size) {
            let (left, middle, right) = match projective_support(chart, 0, w) {
                None => (Vec::new(), Vec::new(), Vec::new()),
                Some(mask) => (
                    contraction_kernel(field, &top, mask),
                    top.span_of(mask),
                    if j == 0 { Vec::new() } else { contraction_kernel(field, &low, mask) },
                ),
            };
            let inc = coordinates(field, top.dim(), &middle, &left)?;
            let images: Vec<Vec<u8>> = if j == 0 {
                Vec::new()
            } else {
                middle.iter().map(|v| contract(field, &top, &low, v)).collect()
            };
            let iota = if j == 0 {
                crate::gf::FpMatrix::zeros(field, 0, middle.len())
            } else {
                coordinates(field, low.dim(), &right, &images)?
            };
            let labels = vec![format!("Ω^{j}"), format!("⋀^{j}(O(-1)^{})", n + 1), format!("Ω^{}", j as i64 - 1)];
            let complex = SliceComplex::new(labels, vec![left.len(), middle.len(), right.len()], vec![inc, iota])?;
            charts.push((chart.positions().collect(), complex));
        }
    }
    Ok(EulerSlices { n, j, weight: w.to_vec(), charts })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p1_cotangent_slices_drop_by_one() {
        let f = PrimeField::new(3).unwrap();
        let e = euler_complex(f, 1, 1, &[1, -1]).unwrap();
        assert!(e.exact());
        // weight (1,-1) vanishes on U_0; on U_1: left 1, middle 2, right 1
        assert_eq!(e.charts[0].1.dims, vec![0, 0, 0]);
        assert_eq!(e.charts[1].1.dims, vec![1, 2, 1]);
    }

    #[test]
    fn j1_middle_is_n_plus_one_copies() {
        let f = PrimeField::new(2).unwrap();
        let e = euler_complex(f, 2, 1, &[1, 1, 1]).unwrap();
        assert!(e.charts.iter().all(|(_, c)| c.dims[1] == 3));
        assert!(e.exact());
    }
}
