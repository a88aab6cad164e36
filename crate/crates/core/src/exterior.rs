//! Exterior powers of `F_p^N` with the Koszul contraction
//! `ι(e_{a_0} ∧ … ∧ e_{a_k}) = Σ_t (−1)^t e_{a_0} ∧ … ê_{a_t} … ∧ e_{a_k}`.
//!
//! On projective space `e_i` stands for `dlog X_i`; `ι` is contraction with
//! the Euler vector field, whose kernel cuts out forms that descend.

use std::collections::HashMap;

use crate::forms::GenSet;
use crate::gf::{FpMatrix, PrimeField};

/// The standard basis `{e_A : |A| = k, A ⊆ {0..N}}` of `⋀^k F_p^N`.
#[derive(Clone, Debug)]
pub struct WedgeBasis {
    pub total: usize,
    pub degree: usize,
    pub sets: Vec<GenSet>,
    index: HashMap<GenSet, usize>,
}

impl WedgeBasis {
    pub fn new(total: usize, degree: usize) -> Self {
        let sets = GenSet::subsets((1u32 << total) - 1, degree);
        let index = sets.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        WedgeBasis { total, degree, sets, index }
    }

    pub fn dim(&self) -> usize {
        self.sets.len()
    }

    pub fn index_of(&self, s: GenSet) -> Option<usize> {
        self.index.get(&s).copied()
    }

    pub fn unit(&self, s: GenSet) -> Vec<u8> {
        let mut v = vec![0u8; self.dim()];
        v[self.index[&s]] = 1;
        v
    }

    /// Standard basis vectors of `⋀^k(span{e_i : i ∈ mask})`.
    pub fn span_of(&self, mask: u32) -> Vec<Vec<u8>> {
        self.sets.iter().filter(|s| s.is_subset_of(mask)).map(|s| self.unit(*s)).collect()
    }
}

/// Terms of `ι(e_A)` as `(A ∖ a_t, negative)`.
pub fn contraction_terms(a: GenSet) -> Vec<(GenSet, bool)> {
    a.positions().enumerate().map(|(t, k)| (a.without(k), t % 2 == 1)).collect()
}

/// Matrix of `ι: ⋀^k → ⋀^{k-1}` on full standard bases.
pub fn contraction_matrix(field: PrimeField, src: &WedgeBasis, dst: &WedgeBasis) -> FpMatrix {
    let mut m = FpMatrix::zeros(field, dst.dim(), src.dim());
    if src.degree == 0 {
        return m;
    }
    for (c, s) in src.sets.iter().enumerate() {
        for (t, neg) in contraction_terms(*s) {
            let r = dst.index_of(t).expect("subset of smaller size");
            m.add_to(r, c, if neg { field.neg(1) } else { 1 });
        }
    }
    m
}

/// Applies `ι` to a vector in `src` coordinates.
pub fn contract(field: PrimeField, src: &WedgeBasis, dst: &WedgeBasis, v: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; dst.dim()];
    if src.degree == 0 {
        return out;
    }
    for (c, &x) in v.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (t, neg) in contraction_terms(src.sets[c]) {
            let r = dst.index_of(t).expect("subset of smaller size");
            out[r] = field.add(out[r], if neg { field.neg(x) } else { x });
        }
    }
    out
}

/// Basis of `ker ι ∩ ⋀^k(span{e_i : i ∈ mask})`, in coordinates of `basis`.
pub fn contraction_kernel(field: PrimeField, basis: &WedgeBasis, mask: u32) -> Vec<Vec<u8>> {
    let local: Vec<GenSet> = basis.sets.iter().copied().filter(|s| s.is_subset_of(mask)).collect();
    if local.is_empty() {
        return Vec::new();
    }
    if basis.degree == 0 {
        return vec![basis.unit(GenSet::empty())];
    }
    let lower = WedgeBasis::new(basis.total, basis.degree - 1);
    let cols: Vec<Vec<u8>> = local.iter().map(|s| contract(field, basis, &lower, &basis.unit(*s))).collect();
    let m = FpMatrix::from_columns(field, lower.dim(), &cols);
    m.kernel_basis()
        .into_iter()
        .map(|x| {
            let mut v = vec![0u8; basis.dim()];
            for (i, s) in local.iter().enumerate() {
                v[basis.index_of(*s).unwrap()] = x[i];
            }
            v
        })
        .collect()
}

/// Coordinates `k` whose `dlog X_k` may appear in a section over the chart
/// `U_I = {X_i ≠ 0, i ∈ I}` at torus weight `w`: those in `I`, in the log set,
/// or with `w_k ≥ 1`. `None` if some `k ∉ I` has `w_k < 0`, in which case
/// the weight-`w` piece vanishes on `U_I`.
pub fn projective_support(chart: GenSet, log_mask: u32, w: &[i32]) -> Option<u32> {
    let mut mask = chart.0 | log_mask;
    for (k, &wk) in w.iter().enumerate() {
        if chart.contains(k) {
            continue;
        }
        if wk < 0 {
            return None;
        }
        if wk >= 1 {
            mask |= 1 << k;
        }
    }
    Some(mask & ((1u32 << w.len()) - 1))
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}
