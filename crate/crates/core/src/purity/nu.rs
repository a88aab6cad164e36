use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{GysinSetup, SetupInfo, SliceMaps};
use crate::cartier::{c_minus_one_surjectivity, cartier, nu_sections, zb_decomposition};
use crate::error::Result;
use crate::forms::{GenSet, LogForm, Multidegree};
use crate::gf::{complement_in, FpMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NuDims {
    /// `dim ν_Z(n−1)` in the window of the divisor ring.
    pub expected: usize,
    /// `dim ker(C − 1)` on the closed Gysin cokernels.
    pub computed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NuPurityReport {
    pub setup: SetupInfo,
    pub n: usize,
    /// Codimension of the center; always 1 here.
    pub r: usize,
    pub nu_dims: NuDims,
    /// `dim coker(C − 1)` on the Gysin cokernels inside the window.
    pub obstruction_dim: usize,
    /// Targets `T^a dlog T_I` (`z ∈ I ⊆ L`, `a ∈ {0,1}`, `a_z = 0`) tried
    /// in an Artin–Schreier extension.
    pub extension_targets: usize,
    pub extension_preimages: usize,
    pub chains: usize,
    /// Set when the divisor ring has inverted variables (chains cut at both ends).
    pub truncated: bool,
    pub elapsed_ms: Option<u64>,
}

impl NuPurityReport {
    pub fn ok(&self) -> bool {
        self.nu_dims.expected == self.nu_dims.computed && self.extension_preimages == self.extension_targets
    }
}

/// Per-weight data of one chain node.
struct Node {
    maps: SliceMaps,
    coker: Vec<Vec<u8>>,
    /// Representatives of `ZΩ^n(log(D+Z))_w / ZΩ^n(log D)_w`.
    reps: Vec<Vec<u8>>,
}

fn node(setup: &GysinSetup, n: usize, w: Multidegree) -> Result<Node> {
    let maps = SliceMaps::new(setup, n, w)?;
    let field = setup.ring().field();
    let big = zb_decomposition(setup.ring(), n, w);
    let small = zb_decomposition(setup.background(), n, w);
    let sub: Vec<Vec<u8>> = small.z_basis.iter().map(|z| maps.inclusion.mul_vec(z)).collect::<Result<_>>()?;
    let reps = complement_in(field, maps.big.dim(), &sub, &big.z_basis);
    let coker = maps.coker_basis();
    Ok(Node { maps, coker, reps })
}

/// `(kernel dim, cokernel dim)` of `C − 1` from the closed cokernels to the
/// all-forms cokernels along one chain. `C` sends node `k` to node `k − 1`
/// (to itself on the fixed chain at weight 0).
fn chain_map(setup: &GysinSetup, n: usize, chain: &[Multidegree]) -> Result<(usize, usize)> {
    let field = setup.ring().field();
    let nodes: Vec<Node> = chain.iter().map(|w| node(setup, n, *w)).collect::<Result<_>>()?;
    let cols_total: usize = nodes.iter().map(|x| x.reps.len()).sum();
    let rows_total: usize = nodes.iter().map(|x| x.coker.len()).sum();
    if rows_total == 0 {
        return Ok((cols_total, 0));
    }
    let row_off: Vec<usize> = nodes.iter().scan(0, |a, x| { let o = *a; *a += x.coker.len(); Some(o) }).collect();
    let index: std::collections::HashMap<Multidegree, usize> = chain.iter().enumerate().map(|(i, w)| (*w, i)).collect();
    let mut m = FpMatrix::zeros(field, rows_total, cols_total);
    let mut col = 0;
    for nd in &nodes {
        for rep in &nd.reps {
            let eta = nd.maps.big.form_from_coords(rep);
            let image = cartier(&eta)?.sub(&eta)?;
            for u in image.weights() {
                let t = index[&u];
                let v = nodes[t].maps.big.coords(&image.component(&u))?;
                for (r, c) in nodes[t].maps.coker_coords(&nodes[t].coker, &v)?.into_iter().enumerate() {
                    m.add_to(row_off[t] + r, col, c);
                }
            }
            col += 1;
        }
    }
    let rank = m.rank();
    Ok((cols_total - rank, rows_total - rank))
}

/// `ker(C − 1)` on `ZΩ^n(log(D+Z))/ZΩ^n(log D) → Ω^n(log(D+Z))/Ω^n(log D)`
/// over the window, compared with `ν_Z(n−1)`.
pub fn nu_purity_report(setup: &GysinSetup, n: usize) -> Result<NuPurityReport> {
    let ring = setup.ring();
    let p = ring.p() as i32;
    let mut chains = vec![vec![Multidegree::zero()]];
    for root in ring.window_weights() {
        if root.is_zero() || root.div_exact(p).is_some() {
            continue;
        }
        let mut chain = vec![root];
        loop {
            let next = chain.last().unwrap().scale(p);
            if !ring.in_window(&next) {
                break;
            }
            chain.push(next);
        }
        chains.push(chain);
    }
    let parts: Vec<(usize, usize)> =
        chains.par_iter().map(|c| chain_map(setup, n, c)).collect::<Result<_>>()?;
    let computed = parts.iter().map(|x| x.0).sum();
    let obstruction_dim = parts.iter().map(|x| x.1).sum();
    let div = setup.divisor();
    let expected = if n == 0 { 0 } else { nu_sections(div, n - 1)?.dim() };

    let mut extension_targets = 0;
    let mut extension_preimages = 0;
    if n > 0 {
        let others = ring.log_mask() & !(1 << setup.position());
        for rest in GenSet::subsets(others, n - 1) {
            let gens = GenSet(rest.0 | 1 << setup.position());
            for bits in 0..1u32 << ring.nvars() {
                if bits >> setup.position() & 1 == 1 {
                    continue;
                }
                let a = Multidegree::from_slice(&(0..ring.nvars()).map(|k| (bits >> k & 1) as i32).collect::<Vec<_>>());
                let target = LogForm::from_ambient(ring, 1, a, gens)?;
                extension_targets += 1;
                if c_minus_one_surjectivity(&target)?.verified {
                    extension_preimages += 1;
                }
            }
        }
    }
    Ok(NuPurityReport {
        setup: setup.info(),
        n,
        r: 1,
        nu_dims: NuDims { expected, computed },
        obstruction_dim,
        extension_targets,
        extension_preimages,
        chains: chains.len(),
        truncated: div.laurent_mask() != 0,
        elapsed_ms: None,
    })
}

#[cfg(test)]
mod tests {
    use super::super::tests::setup;
    use super::*;
    use crate::forms::FormRing;
    use crate::gf::PrimeField;

    #[test]
    fn surface_with_two_log_lines() {
        let s = setup(3, 2, &[1, 2], 1, 6);
        let r = nu_purity_report(&s, 1).unwrap();
        assert_eq!(r.nu_dims, NuDims { expected: 1, computed: 1 });
        assert!(r.ok());
        let r0 = nu_purity_report(&s, 0).unwrap();
        assert_eq!(r0.nu_dims, NuDims { expected: 0, computed: 0 });
        assert_eq!(r0.obstruction_dim, 0);
    }

    #[test]
    fn inverted_coordinate_leaves_obstruction() {
        let f = PrimeField::new(2).unwrap();
        let ring = FormRing::new(f, 2).unwrap().with_log(&[1]).unwrap().with_laurent(&[2]).unwrap().with_radius(4).unwrap();
        let s = GysinSetup::new(ring, 1).unwrap();
        let r = nu_purity_report(&s, 1).unwrap();
        assert_eq!(r.nu_dims.expected, r.nu_dims.computed);
        assert!(r.obstruction_dim > 0);
        assert!(r.truncated);
    }

    #[test]
    fn point_divisor_in_a_line() {
        let s = setup(2, 1, &[1], 1, 4);
        let r = nu_purity_report(&s, 1).unwrap();
        assert_eq!(r.nu_dims, NuDims { expected: 1, computed: 1 });
        // C − 1 vanishes on the constants of the point
        assert_eq!(r.obstruction_dim, 1);
    }
}
