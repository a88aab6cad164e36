use std::collections::HashMap;

use super::{cartier_slice, inverse_cartier};
use crate::error::Result;
use crate::forms::{FormRing, GenSet, LogForm, Multidegree, WeightSlice};
use crate::gf::FpMatrix;

/// A basis of `ker(C − 1: ZΩ^n → Ω^n)` within the weight window.
#[derive(Clone, Debug)]
pub struct NuSections {
    pub ring: FormRing,
    pub degree: usize,
    pub basis: Vec<LogForm>,
    /// Set for rings with inverted variables, where weight chains can
    /// leave the window in both directions.
    pub truncated: bool,
    pub chains: usize,
}

impl NuSections {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// `ν(n)` through the chain structure of `C`: `C` maps weight `pw` to `w`,
/// so `C − 1` couples only the weights `r, pr, p²r, …` of one chain.
pub fn nu_sections(ring: FormRing, n: usize) -> Result<NuSections> {
    let p = ring.p() as i32;
    let mut roots = vec![Multidegree::zero()];
    roots.extend(
        ring.window_weights()
            .into_iter()
            .filter(|w| !w.is_zero() && w.div_exact(p).is_none()),
    );
    let mut basis = Vec::new();
    for root in &roots {
        let mut chain = vec![*root];
        if !root.is_zero() {
            loop {
                let next = chain.last().unwrap().scale(p);
                if !ring.in_window(&next) {
                    break;
                }
                chain.push(next);
            }
        }
        basis.extend(chain_kernel(ring, n, &chain)?);
    }
    Ok(NuSections {
        ring,
        degree: n,
        basis,
        truncated: ring.laurent_mask() != 0,
        chains: roots.len(),
    })
}

/// Kernel of `C − 1` on `⊕_k Z_{chain[k]}`; `chain = [0]` is the fixed chain.
fn chain_kernel(ring: FormRing, n: usize, chain: &[Multidegree]) -> Result<Vec<LogForm>> {
    let field = ring.field();
    let slices: Vec<_> = chain.iter().map(|w| cartier_slice(ring, n, *w)).collect::<Result<_>>()?;
    let zdims: Vec<usize> = slices.iter().map(|s| s.source.z_dim()).collect();
    let odims: Vec<usize> = slices.iter().map(|s| s.source.slice.dim()).collect();
    let total_z: usize = zdims.iter().sum();
    if total_z == 0 {
        return Ok(Vec::new());
    }
    let zoff: Vec<usize> = zdims.iter().scan(0, |a, &d| { let o = *a; *a += d; Some(o) }).collect();
    let ooff: Vec<usize> = odims.iter().scan(0, |a, &d| { let o = *a; *a += d; Some(o) }).collect();
    let total_o: usize = odims.iter().sum();
    let mut m = FpMatrix::zeros(field, total_o, total_z);
    let fixed = chain.len() == 1 && chain[0].is_zero();
    for k in 0..chain.len() {
        // -ι(x_k) at node k
        for (c, z) in slices[k].source.z_basis.iter().enumerate() {
            for (r, &v) in z.iter().enumerate() {
                m.add_to(ooff[k] + r, zoff[k] + c, field.neg(v));
            }
        }
        // C(x_k) lands at node k-1 (or at node 0 itself for the fixed chain)
        let target_node = if fixed { Some(0) } else { k.checked_sub(1) };
        if let Some(t) = target_node {
            let cm = &slices[k].matrix;
            for r in 0..cm.rows() {
                for c in 0..cm.cols() {
                    m.add_to(ooff[t] + r, zoff[k] + c, cm.get(r, c));
                }
            }
        }
    }
    let mut out = Vec::new();
    for x in m.kernel_basis() {
        let mut form = LogForm::zero(ring, n);
        for k in 0..chain.len() {
            let sl = &slices[k].source;
            let mut v = vec![0u8; sl.slice.dim()];
            for (c, z) in sl.z_basis.iter().enumerate() {
                let coef = x[zoff[k] + c];
                for (r, &zv) in z.iter().enumerate() {
                    v[r] = field.add(v[r], field.mul(coef, zv));
                }
            }
            form = form.add(&sl.slice.form_from_coords(&v))?;
        }
        out.push(form);
    }
    Ok(out)
}

/// `dim ker(C − 1)` from one coupled system over the whole window, with no
/// use of the weight grading: global `d` matrices, a global `C⁻¹` matrix and
/// a single solve for `C` on all closed forms at once.
pub fn nu_bruteforce_dim(ring: FormRing, n: usize) -> Result<usize> {
    let field = ring.field();
    let p = ring.p() as i32;
    let weights = ring.window_weights();
    let index = |j: usize| -> (Vec<(Multidegree, GenSet)>, HashMap<(Multidegree, GenSet), usize>) {
        let mut terms = Vec::new();
        for w in &weights {
            for g in WeightSlice::new(ring, j, *w).gensets() {
                terms.push((*w, *g));
            }
        }
        let map = terms.iter().enumerate().map(|(i, t)| (*t, i)).collect();
        (terms, map)
    };
    let (cur, cur_idx) = index(n);
    if cur.is_empty() {
        return Ok(0);
    }
    let coords = |form: &LogForm, idx: &HashMap<(Multidegree, GenSet), usize>, len: usize| -> Vec<u8> {
        let mut v = vec![0u8; len];
        for (w, g, c) in form.ambient_terms() {
            v[idx[&(w, g)]] = c;
        }
        v
    };
    let d_matrix = |src: &[(Multidegree, GenSet)], dst_idx: &HashMap<(Multidegree, GenSet), usize>, dst_len: usize| {
        let cols: Vec<Vec<u8>> = src
            .iter()
            .map(|(w, g)| {
                let f = LogForm::from_ambient(ring, 1, *w, *g).expect("enumerated term");
                coords(&f.differential(), dst_idx, dst_len)
            })
            .collect();
        FpMatrix::from_columns(field, dst_len, &cols)
    };
    let (next, next_idx) = index(n + 1);
    let z_basis = if next.is_empty() {
        FpMatrix::identity(field, cur.len()).columns()
    } else {
        d_matrix(&cur, &next_idx, next.len()).kernel_basis()
    };
    if z_basis.is_empty() {
        return Ok(0);
    }
    let mut system_cols: Vec<Vec<u8>> = Vec::new();
    let mut small_terms = Vec::new();
    for (k, (w, g)) in cur.iter().enumerate() {
        let pw = w.scale(p);
        if ring.in_window(&pw) {
            let f = LogForm::from_ambient(ring, 1, *w, *g).expect("enumerated term");
            system_cols.push(coords(&inverse_cartier(&f)?, &cur_idx, cur.len()));
            small_terms.push(k);
        }
    }
    let n_small = small_terms.len();
    if n > 0 {
        let (prev, _) = index(n - 1);
        let dprev = d_matrix(&prev, &cur_idx, cur.len());
        system_cols.extend(dprev.columns().into_iter().filter(|c| c.iter().any(|&x| x != 0)));
    }
    let system = FpMatrix::from_columns(field, cur.len(), &system_cols);
    let rhs = FpMatrix::from_columns(field, cur.len(), &z_basis);
    let sol = system.solve_many(&rhs).map_err(|_| crate::Error::internal("closed forms not spanned by C⁻¹ and B"))?;
    // column c of (C − 1): C(z_c) − z_c in global coordinates
    let mut cm = FpMatrix::zeros(field, cur.len(), z_basis.len());
    for (c, z) in z_basis.iter().enumerate() {
        for (r, &zv) in z.iter().enumerate() {
            cm.set(r, c, field.neg(zv));
        }
        for (s, &k) in small_terms.iter().enumerate().take(n_small) {
            cm.add_to(k, c, sol.get(s, c));
        }
    }
    Ok(z_basis.len() - cm.rank())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::PrimeField;

    fn ring(p: u32, m: usize, log: &[u8], radius: i32) -> FormRing {
        FormRing::new(PrimeField::new(p).unwrap(), m).unwrap().with_log(log).unwrap().with_radius(radius).unwrap()
    }

    #[test]
    fn nu_examples() {
        let r = ring(3, 2, &[1, 2], 6);
        assert_eq!(nu_sections(r, 0).unwrap().dim(), 1);
        let nu1 = nu_sections(r, 1).unwrap();
        let names: Vec<String> = nu1.basis.iter().map(|f| f.to_string()).collect();
        assert_eq!(names.len(), 2);
        assert!(names.contains(&"dlogT1".to_string()) && names.contains(&"dlogT2".to_string()));
        assert_eq!(nu_sections(r, 3).unwrap().dim(), 0);
        assert_eq!(nu_bruteforce_dim(r, 1).unwrap(), 2);
        assert_eq!(nu_bruteforce_dim(r, 0).unwrap(), 1);
    }

    #[test]
    fn laurent_rings_are_flagged() {
        let r = ring(2, 1, &[], 4).with_laurent(&[1]).unwrap();
        assert!(nu_sections(r, 1).unwrap().truncated);
    }
}
