use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{binomial, WedgeBasis};
use crate::forms::GenSet;
use crate::gf::{span_rank, FpMatrix, PrimeField};

/// A short exact sequence `0 → U → V → W → 0` of ranks `(u, v, w)` and a wedge power `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationSpec {
    pub u: usize,
    pub v: usize,
    pub w: usize,
    pub k: usize,
}

/// Dimensions and checks of the filtration
/// `F_i = image(⋀^{k−i}U ⊗ ⋀^i V → ⋀^k V)`, `0 ≤ i ≤ k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationReport {
    pub spec: FiltrationSpec,
    /// `dim F_i` computed from wedges of actual vectors.
    pub filtration_dims: Vec<usize>,
    /// `dim F_i − dim F_{i−1}`.
    pub graded_dims: Vec<usize>,
    /// `C(u, k−i) · C(w, i)`.
    pub expected_dims: Vec<usize>,
    /// The split-basis wedges with exactly `i` factors from the complement
    /// are independent modulo `F_{i−1}` and, with it, span `F_i`.
    pub split_basis_ok: bool,
    /// `φ_i: F_i → ⋀^{k−i}U ⊗ ⋀^iW` kills `F_{i−1}` and is a permutation
    /// matrix on the split basis.
    pub phi_ok: bool,
    pub total_ok: bool,
}

impl FiltrationReport {
    pub fn passed(&self) -> bool {
        self.graded_dims == self.expected_dims && self.split_basis_ok && self.phi_ok && self.total_ok
    }
}

fn det(field: PrimeField, mut m: Vec<Vec<u8>>) -> u8 {
    let n = m.len();
    let mut result = 1u8;
    for c in 0..n {
        let Some(r) = (c..n).find(|&r| m[r][c] != 0) else {
            return 0;
        };
        if r != c {
            m.swap(r, c);
            result = field.neg(result);
        }
        let pivot = m[c][c];
        result = field.mul(result, pivot);
        let inv = field.inv(pivot).unwrap();
        for r2 in c + 1..n {
            let factor = field.mul(m[r2][c], inv);
            if factor == 0 {
                continue;
            }
            for c2 in c..n {
                let sub = field.mul(factor, m[c][c2]);
                m[r2][c2] = field.sub(m[r2][c2], sub);
            }
        }
    }
    result
}

/// `x_1 ∧ … ∧ x_k` in the standard basis of `⋀^k F_p^v` (Plücker coordinates).
fn wedge_vectors(field: PrimeField, basis: &WedgeBasis, vectors: &[&Vec<u8>]) -> Vec<u8> {
    basis
        .sets
        .iter()
        .map(|s| {
            let rows: Vec<usize> = s.positions().collect();
            let minor: Vec<Vec<u8>> = rows.iter().map(|&r| vectors.iter().map(|x| x[r]).collect()).collect();
            det(field, minor)
        })
        .collect()
}

/// Builds a seeded random `U ⊂ F_p^v`, a complement `W̃`, and verifies the
/// two-step filtration of `⋀^k V` with its graded pieces.
pub fn filtration(field: PrimeField, spec: FiltrationSpec, seed: u64) -> Result<FiltrationReport> {
    let FiltrationSpec { u, v, w, k } = spec;
    if u + w != v {
        return Err(Error::invalid("ranks must satisfy u + w = v"));
    }
    if k > v || v > 16 {
        return Err(Error::invalid("wedge power must satisfy k ≤ v ≤ 16"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = field.p() as u8;
    // random injection U → V of full rank
    let sub: Vec<Vec<u8>> = loop {
        let cand: Vec<Vec<u8>> = (0..u).map(|_| (0..v).map(|_| rng.gen_range(0..p)).collect()).collect();
        if span_rank(field, v, &cand) == u {
            break cand;
        }
    };
    let standard = FpMatrix::identity(field, v).columns();
    let complement = crate::gf::complement_in(field, v, &sub, &standard);
    debug_assert_eq!(complement.len(), w);
    let split: Vec<Vec<u8>> = sub.iter().chain(complement.iter()).cloned().collect();
    let basis = WedgeBasis::new(v, k);

    // F_i from actual wedges of k−i vectors of U with i arbitrary vectors of V
    let mut filtration_dims = Vec::new();
    let mut spans: Vec<Vec<Vec<u8>>> = Vec::new();
    for i in 0..=k {
        let mut gens = Vec::new();
        if k - i <= u {
            for a in GenSet::subsets((1u32 << u) - 1, k - i) {
                for b in GenSet::subsets((1u32 << v) - 1, i) {
                    let vecs: Vec<&Vec<u8>> = a.positions().map(|x| &sub[x]).chain(b.positions().map(|x| &standard[x])).collect();
                    let x = wedge_vectors(field, &basis, &vecs);
                    if x.iter().any(|&c| c != 0) {
                        gens.push(x);
                    }
                }
            }
        }
        filtration_dims.push(span_rank(field, basis.dim(), &gens));
        spans.push(gens);
    }
    let graded_dims: Vec<usize> = (0..=k)
        .map(|i| filtration_dims[i] - if i > 0 { filtration_dims[i - 1] } else { 0 })
        .collect();
    let expected_dims: Vec<usize> = (0..=k).map(|i| binomial(u, k - i) * binomial(w, i)).collect();

    // split wedge basis of ⋀^k V: s_S = ⋀_{x∈S} split[x]; S ∩ {0..u} are U-factors
    let split_sets = GenSet::subsets((1u32 << v) - 1, k);
    let split_wedges: Vec<Vec<u8>> = split_sets
        .iter()
        .map(|s| wedge_vectors(field, &basis, &s.positions().map(|x| &split[x]).collect::<Vec<_>>()))
        .collect();
    let change = FpMatrix::from_columns(field, basis.dim(), &split_wedges);
    // split coordinates of a vector of ⋀^k V
    let to_split = change.solve_many(&FpMatrix::identity(field, basis.dim()))?;
    let w_count = |s: &GenSet| s.positions().filter(|&x| x >= u).count();

    let mut split_basis_ok = true;
    let mut phi_ok = true;
    for i in 0..=k {
        let new: Vec<Vec<u8>> = split_sets
            .iter()
            .zip(&split_wedges)
            .filter(|(s, _)| w_count(s) == i)
            .map(|(_, x)| x.clone())
            .collect();
        let prev: &[Vec<u8>] = if i > 0 { &spans[i - 1] } else { &[] };
        let prev_dim = if i > 0 { filtration_dims[i - 1] } else { 0 };
        let mut joined = prev.to_vec();
        joined.extend(new.iter().cloned());
        if span_rank(field, basis.dim(), &joined) != prev_dim + new.len() || prev_dim + new.len() != filtration_dims[i] {
            split_basis_ok = false;
        }
        // φ_i reads off split coordinates with exactly i complement factors
        let phi_of = |x: &Vec<u8>| -> Result<Vec<u8>> {
            let coords = to_split.mul_vec(x)?;
            Ok(split_sets.iter().zip(coords).filter(|(s, _)| w_count(s) == i).map(|(_, c)| c).collect())
        };
        for x in prev {
            if phi_of(x)?.iter().any(|&c| c != 0) {
                phi_ok = false;
            }
        }
        for x in spans[i].iter() {
            // F_i has no split coordinates with more than i complement factors
            let coords = to_split.mul_vec(x)?;
            if split_sets.iter().zip(&coords).any(|(s, &c)| c != 0 && w_count(s) > i) {
                phi_ok = false;
            }
        }
        let images: Vec<Vec<u8>> = new.iter().map(phi_of).collect::<Result<_>>()?;
        let m = FpMatrix::from_columns(field, new.len(), &images);
        let is_perm = (0..m.rows()).all(|r| (0..m.cols()).filter(|&c| m.get(r, c) != 0).count() == 1)
            && (0..m.cols()).all(|c| (0..m.rows()).filter(|&r| m.get(r, c) != 0).count() == 1)
            && (0..m.rows()).all(|r| (0..m.cols()).all(|c| matches!(m.get(r, c), 0 | 1) || m.get(r, c) == field.neg(1)));
        if !is_perm {
            phi_ok = false;
        }
    }
    let total_ok = filtration_dims.last() == Some(&binomial(v, k)) && expected_dims.iter().sum::<usize>() == binomial(v, k);
    Ok(FiltrationReport { spec, filtration_dims, graded_dims, expected_dims, split_basis_ok, phi_ok, total_ok })
}
