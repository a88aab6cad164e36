use super::complex::SliceComplex;
use crate::error::{Error, Result};
use crate::exterior::{contract, contraction_kernel, projective_support, WedgeBasis};
use crate::forms::GenSet;
use crate::gf::{coordinates, FpMatrix, PrimeField};

/// The exceptional divisor `E = P^{c−1}` of the blowup of `A^c` in the
/// origin, with coordinates `X_1..X_c` (indices `0..c`) and log structure
/// pulled back from the blowup along `E + D̄_1`.
///
/// On the chart `U_j` of `E` the pulled-back log forms are generated by
/// `dlog u_j` (the extra generator coming from `E`) and the log forms of
/// `E` with poles along `V(X_1)`; in the homogeneous basis `X^w dlog X_A`
/// they are all of `⋀^n(span of the support)`, without the condition of
/// being killed by the Euler contraction. The sequence
/// `0 → Ω^n_E(log) → Ω^{n,log}_E → Ω^{n−1}_E(log) → 0` then has the
/// inclusion on the left and the contraction on the right.
#[derive(Clone, Debug)]
pub struct PullbackSlices {
    pub c: usize,
    pub n: usize,
    pub weight: Vec<i32>,
    pub charts: Vec<(Vec<usize>, SliceComplex)>,
}

impl PullbackSlices {
    pub fn exact(&self) -> bool {
        self.charts.iter().all(|(_, c)| c.is_exact())
    }
}

/// Log set of the exceptional divisor model: the strict transform of `V(T_1)`.
pub const EXCEPTIONAL_LOG_MASK: u32 = 1;

pub fn pullback_ses(field: PrimeField, c: usize, n: usize, w: &[i32]) -> Result<PullbackSlices> {
    if c < 1 || w.len() != c {
        return Err(Error::DimensionMismatch { expected: c, found: w.len() });
    }
    if n > c {
        return Err(Error::invalid("form degree exceeds c"));
    }
    let top = WedgeBasis::new(c, n);
    let low = WedgeBasis::new(c, n.saturating_sub(1));
    let mut charts = Vec::new();
    for size in 1..=c {
        for chart in GenSet::subsets((1u32 << c) - 1, size) {
            let (left, middle, right) = match projective_support(chart, EXCEPTIONAL_LOG_MASK, w) {
                None => (Vec::new(), Vec::new(), Vec::new()),
                Some(mask) => (
                    contraction_kernel(field, &top, mask),
                    top.span_of(mask),
                    if n == 0 { Vec::new() } else { contraction_kernel(field, &low, mask) },
                ),
            };
            let inc = coordinates(field, top.dim(), &middle, &left)?;
            let proj = if n == 0 {
                FpMatrix::zeros(field, 0, middle.len())
            } else {
                let images: Vec<Vec<u8>> = middle.iter().map(|v| contract(field, &top, &low, v)).collect();
                coordinates(field, low.dim(), &right, &images)?
            };
            let labels = vec![format!("Ω^{n}_E(log)"), format!("Ω^{n},log_E"), format!("Ω^{}_E(log)", n as i64 - 1)];
            let complex = SliceComplex::new(labels, vec![left.len(), middle.len(), right.len()], vec![inc, proj])?;
            charts.push((chart.positions().collect(), complex));
        }
    }
    Ok(PullbackSlices { c, n, weight: w.to_vec(), charts })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n1_c2_middle_is_sum_of_ends() {
        let f = PrimeField::new(2).unwrap();
        for w in [[0, 0], [1, -1], [-1, 1], [2, -2], [1, 0]] {
            let s = pullback_ses(f, 2, 1, &w).unwrap();
            assert!(s.exact());
            for (_, c) in &s.charts {
                assert_eq!(c.dims[1], c.dims[0] + c.dims[2]);
            }
        }
    }

    #[test]
    fn n0_degenerates() {
        let f = PrimeField::new(3).unwrap();
        let s = pullback_ses(f, 3, 0, &[0, 0, 0]).unwrap();
        for (_, c) in &s.charts {
            assert_eq!(c.dims, vec![1, 1, 0]);
        }
    }
}
