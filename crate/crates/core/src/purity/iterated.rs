use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{FormRing, LogForm, Multidegree, WeightSlice};
use crate::gf::{span_rank, FpMatrix};

/// Totals over the window for one ordering of the chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageDims {
    pub order: Vec<u8>,
    /// `stages[k]`: total dimension of the cokernel after `k + 1` residues.
    pub stages: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IteratedPurityReport {
    pub p: u32,
    pub m: usize,
    pub log: Vec<u8>,
    pub chain: Vec<u8>,
    pub n: usize,
    pub r: usize,
    /// The identification holds in cohomological degree `r` (shift `[−r]`).
    pub shift: i32,
    pub weights: usize,
    /// `Σ_w dim Ω^n(log L)_w / Σ_k Ω^n(log L∖{z_k})_w`.
    pub coker_dim: usize,
    /// `Σ_w dim Ω^{n−r}_Z(log (L∖chain)|_Z)_w`.
    pub target_dim: usize,
    /// The composite residue kills every `Ω^n(log L∖{z_k})` and is bijective on the quotient.
    pub iso: bool,
    pub orders: Vec<StageDims>,
    pub order_independent: bool,
}

fn permutations(items: &[u8]) -> Vec<Vec<u8>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Residue-cokernel dims for one ordering: at stage `k` the ring has lost
/// `z_1..z_k` and the cokernel is taken along `z_{k+1}`.
fn stage_dims(ring: FormRing, order: &[u8], n: usize) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = ring;
    for (k, &z) in order.iter().enumerate() {
        if k > n {
            out.push(0);
            continue;
        }
        let pos = current.position(z)?;
        let small = current.with_log_mask(current.log_mask() & !(1 << pos));
        let mut total = 0;
        for w in current.window_weights() {
            let big = WeightSlice::new(current, n - k, w);
            let sub = WeightSlice::new(small, n - k, w);
            total += big.dim() - sub.dim();
        }
        out.push(total);
        current = current.drop_variable(pos);
    }
    Ok(out)
}

/// Composes the residues along `T_{z_1}, …, T_{z_r}` and checks the composite
/// identifies the iterated cokernel with `Ω^{n−r}` of `Z = V(T_{z_1}, …, T_{z_r})`.
pub fn iterated_purity(ring: FormRing, chain: &[u8], n: usize) -> Result<IteratedPurityReport> {
    let mut positions = Vec::new();
    for &z in chain {
        let pos = ring.position(z)?;
        if !ring.is_log(pos) || ring.is_laurent(pos) {
            return Err(Error::NotLogVariable(z));
        }
        if positions.contains(&pos) {
            return Err(Error::invalid(format!("T{z} repeated in divisor chain")));
        }
        positions.push(pos);
    }
    if chain.is_empty() {
        return Err(Error::invalid("empty divisor chain"));
    }
    let r = chain.len();
    let field = ring.field();
    let mut target_ring = ring;
    for &z in chain {
        target_ring = target_ring.drop_variable(target_ring.position(z)?);
    }
    let mut coker_dim = 0;
    let mut target_dim = 0;
    let mut iso = true;
    let weights = ring.window_weights();
    for w in &weights {
        let big = WeightSlice::new(ring, n, *w);
        let on_z = positions.iter().all(|&k| w.0[k] == 0);
        let target = if n >= r && on_z {
            let mut tw = *w;
            let mut sorted = positions.clone();
            sorted.sort_unstable_by(|a, b| b.cmp(a));
            for k in sorted {
                tw = tw.remove(k);
            }
            WeightSlice::new(target_ring, n - r, tw)
        } else {
            WeightSlice::empty(target_ring, n.saturating_sub(r), Multidegree::zero())
        };
        let mut subs = Vec::new();
        for &k in &positions {
            let small = WeightSlice::new(ring.with_log_mask(ring.log_mask() & !(1 << k)), n, *w);
            subs.extend(small.matrix_of(&big, |f| f.reinterpret(ring))?.columns());
        }
        let sub_rank = span_rank(field, big.dim(), &subs);
        let q = big.dim() - sub_rank;
        coker_dim += q;
        target_dim += target.dim();
        if big.dim() == 0 {
            iso &= target.dim() == 0;
            continue;
        }
        let composite = if n >= r {
            big.matrix_of(&target, |f| {
                let mut g: LogForm = f.clone();
                for &z in chain {
                    g = g.residue(z)?;
                }
                Ok(g)
            })?
        } else {
            FpMatrix::zeros(field, 0, big.dim())
        };
        let kills = subs.iter().all(|s| composite.mul_vec(s).is_ok_and(|v| v.iter().all(|&x| x == 0)));
        iso &= kills && q == target.dim() && composite.rank() == target.dim();
    }
    let orders: Vec<StageDims> = permutations(chain)
        .into_iter()
        .map(|order| Ok(StageDims { stages: stage_dims(ring, &order, n)?, order }))
        .collect::<Result<_>>()?;
    let order_independent = orders.windows(2).all(|w| w[0].stages == w[1].stages)
        && orders.iter().all(|o| o.stages.last() == Some(&coker_dim));
    Ok(IteratedPurityReport {
        p: ring.p(),
        m: ring.nvars(),
        log: ring.log_labels(),
        chain: chain.to_vec(),
        n,
        r,
        shift: -(r as i32),
        weights: weights.len(),
        coker_dim,
        target_dim,
        iso,
        orders,
        order_independent,
    })
}
