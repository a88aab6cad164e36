use serde::{Deserialize, Serialize};

use super::homogeneous::CechComplex;
use super::{cech_cohomology, projective_complex, BoxPolicy, SheafSpec};
use crate::error::{Error, Result};
use crate::exterior::{contract, contraction_kernel, WedgeBasis};
use crate::forms::GenSet;
use crate::gf::{complement_in, span_rank, FpMatrix, PrimeField};

/// One component of a cochain: the chart `U_I` and the form on it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CochainComponent {
    pub chart: Vec<usize>,
    pub form: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorReport {
    pub n: usize,
    pub j: usize,
    pub components: Vec<CochainComponent>,
    pub is_cochain: bool,
    pub is_cocycle: bool,
    pub is_coboundary: bool,
    pub zero_is_coboundary: bool,
    /// Total `dim H^j(P^n, Ω^j)` over the stabilized box.
    pub cohomology_dim: usize,
    pub spans: bool,
}

/// `X^0 · Σ_A c_A dlog X_A` as text.
pub fn format_wedge(field: PrimeField, wedge: &WedgeBasis, v: &[u8]) -> String {
    let p = field.p() as i64;
    let mut parts = Vec::new();
    for (k, &c) in v.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let name = if wedge.sets[k].is_empty() {
            "1".to_string()
        } else {
            wedge.sets[k].positions().map(|i| format!("dlogX{i}")).collect::<Vec<_>>().join("^")
        };
        let c = c as i64;
        let (neg, mag) = if c > p / 2 { (true, p - c) } else { (false, c) };
        let body = if mag == 1 { name } else { format!("{mag}*{name}") };
        parts.push((neg, body));
    }
    if parts.is_empty() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (i, (neg, body)) in parts.into_iter().enumerate() {
        match (i, neg) {
            (0, false) => s.push_str(&body),
            (0, true) => s.push_str(&format!("-{body}")),
            (_, false) => s.push_str(&format!(" + {body}")),
            (_, true) => s.push_str(&format!(" - {body}")),
        }
    }
    s
}

fn components(cx: &CechComplex, k: usize, v: &[u8]) -> Vec<CochainComponent> {
    let d = cx.wedge.dim();
    cx.levels[k]
        .iter()
        .enumerate()
        .map(|(t, set)| CochainComponent {
            chart: set.positions().collect(),
            form: format_wedge(cx.field, &cx.wedge, &v[t * d..(t + 1) * d]),
        })
        .collect()
}

/// The alternating dlog cochain `(Σ_k (−1)^k dlog X_{i_0} ∧ … ^k … ∧ dlog X_{i_j})_I`
/// at level `j`, i.e. the Euler contraction of `dlog X_I` on every `U_I`.
pub fn alternating_dlog_cochain(cx: &CechComplex, j: usize) -> Vec<u8> {
    let field = cx.field;
    let upper = WedgeBasis::new(cx.charts, j + 1);
    let d = cx.wedge.dim();
    let mut v = vec![0u8; cx.ambient_dim(j)];
    for (t, set) in cx.levels[j].iter().enumerate() {
        let comp = contract(field, &upper, &cx.wedge, &upper.unit(*set));
        v[t * d..(t + 1) * d].copy_from_slice(&comp);
    }
    v
}

fn in_column_span(m: &FpMatrix, v: &[u8]) -> bool {
    v.iter().all(|&x| x == 0) || (m.cols() > 0 && m.solve(v).is_ok())
}

/// Checks that the alternating dlog cocycle spans `H^j(P^n, Ω^j)`.
pub fn generator_check(field: PrimeField, n: usize, j: usize) -> Result<GeneratorReport> {
    if n == 0 || j > n {
        return Err(Error::invalid("generator check requires 0 ≤ j ≤ n, n ≥ 1"));
    }
    let spec = SheafSpec::projective(n, j, &[], 0);
    let cx = projective_complex(field, &spec, &vec![0; n + 1]);
    let z = alternating_dlog_cochain(&cx, j);
    let is_cochain = cx.is_cochain(j, &z);
    let is_cocycle = cx.coboundary(j).mul_vec(&z)?.iter().all(|&x| x == 0);
    let boundaries = match j {
        0 => FpMatrix::zeros(field, z.len(), 0),
        _ => cx.coboundary_image(j - 1),
    };
    let is_coboundary = in_column_span(&boundaries, &z);
    let zero_is_coboundary = in_column_span(&boundaries, &vec![0; z.len()]);
    let report = cech_cohomology(field, &spec, BoxPolicy::default())?;
    let cohomology_dim = report.dims[j];
    Ok(GeneratorReport {
        n,
        j,
        components: components(&cx, j, &z),
        is_cochain,
        is_cocycle,
        is_coboundary,
        zero_is_coboundary,
        cohomology_dim,
        spans: is_cochain && is_cocycle && !is_coboundary && cohomology_dim == 1 && report.stabilized,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectingMapReport {
    pub n: usize,
    /// `dim H^{n−1}(D, Ω^{n−1}_D)` and `dim H^n(P^n, Ω^n)` at weight 0.
    pub source_dim: usize,
    pub target_dim: usize,
    pub rank: usize,
    pub isomorphism: bool,
    pub zero_maps_to_zero: bool,
    /// The image of the source generator is a nonzero multiple of the
    /// alternating dlog class.
    pub image_is_generator_class: bool,
    /// The displayed lift `(Σ_k (−1)^k dlog(X_0/X_{i_k}) ∧ dlog X_{I∖i_k})_I`
    /// is a cochain of `Ω^n(log D)` with residue the generator of `D`.
    /// Its Euler contraction is `(1−n)·ι(dlog X_I)`, so this holds for `n = 1`
    /// (and when `p | n−1`) only.
    pub explicit_lift_valid: bool,
    /// Its coboundary compared with the alternating dlog cocycle:
    /// `Some(1)` equal, `Some(-1)` opposite, `None` otherwise.
    pub explicit_lift_image_sign: Option<i8>,
    pub image: Vec<CochainComponent>,
}

/// Residue along `D = V(X_0)` on ambient cochains: `e_0 ∧ e_B ↦ e_B`
/// on charts not containing `0`, zero elsewhere.
fn residue_matrix(field: PrimeField, charts_level: &[GenSet], top: &WedgeBasis, low: &WedgeBasis) -> FpMatrix {
    let (dt, dl) = (top.dim(), low.dim());
    let mut m = FpMatrix::zeros(field, charts_level.len() * dl, charts_level.len() * dt);
    for (t, set) in charts_level.iter().enumerate() {
        if set.contains(0) {
            continue;
        }
        for (c, a) in top.sets.iter().enumerate() {
            if a.contains(0) {
                let r = low.index_of(a.without(0)).expect("smaller set");
                m.set(t * dl + r, t * dt + c, 1);
            }
        }
    }
    m
}

/// The connecting map `H^{n−1}(D, Ω^{n−1}) → H^n(P^n, Ω^n)` of
/// `0 → Ω^n → Ω^n(log D) → Ω^{n−1}_D → 0`, `D = V(X_0)`, at weight 0.
pub fn connecting_map_check(field: PrimeField, n: usize) -> Result<ConnectingMapReport> {
    if n < 1 {
        return Err(Error::invalid("connecting map needs n ≥ 1"));
    }
    let w = vec![0; n + 1];
    let plain = projective_complex(field, &SheafSpec::projective(n, n, &[], 0), &w);
    let log = projective_complex(field, &SheafSpec::projective(n, n, &[0], 0), &w);
    let divisor = CechComplex::new(field, n + 1, n - 1, |wb, set| contraction_kernel(field, wb, set.0)).supported_off(1);
    let k = n - 1;
    let res_k = residue_matrix(field, &log.levels[k], &log.wedge, &divisor.wedge);
    let res_n = residue_matrix(field, &log.levels[n], &log.wedge, &divisor.wedge);

    // H^{n−1}(D) representatives: cocycles modulo coboundaries
    let dbasis = divisor.basis(k);
    let dcob = divisor.coboundary_image(k);
    let cocycles: Vec<Vec<u8>> =
        dcob.kernel_basis().iter().map(|x| dbasis.mul_vec(x)).collect::<Result<_>>()?;
    let dbound: Vec<Vec<u8>> = if k > 0 { divisor.coboundary_image(k - 1).image_basis() } else { Vec::new() };
    let reps = complement_in(field, divisor.ambient_dim(k), &dbound, &cocycles);

    let lbasis = log.basis(k);
    let res_on_basis = res_k.mul(&lbasis)?;
    let lift_and_bound = |z: &[u8]| -> Result<Vec<u8>> {
        let x = res_on_basis.solve(z).map_err(|_| Error::internal("residue is not surjective on cochains"))?;
        let b = lbasis.mul_vec(&x)?;
        let db = log.coboundary(k).mul_vec(&b)?;
        if res_n.mul_vec(&db)?.iter().any(|&c| c != 0) {
            return Err(Error::internal("coboundary of a lift has a residue"));
        }
        if !plain.is_cochain(n, &db) {
            return Err(Error::internal("coboundary of a lift is not a cochain of Ω^n"));
        }
        Ok(db)
    };
    let images: Vec<Vec<u8>> = reps.iter().map(|z| lift_and_bound(z)).collect::<Result<_>>()?;
    let zero_maps_to_zero = lift_and_bound(&vec![0; divisor.ambient_dim(k)])?.iter().all(|&c| c == 0);

    let boundaries = plain.coboundary_image(n - 1).image_basis();
    let len = plain.ambient_dim(n);
    let base = span_rank(field, len, &boundaries);
    let with = |extra: &[Vec<u8>]| {
        let mut all = boundaries.clone();
        all.extend(extra.iter().cloned());
        span_rank(field, len, &all)
    };
    let rank = with(&images) - base;
    let target_dim = plain.dims()[n];
    let source_dim = reps.len();
    let generator = alternating_dlog_cochain(&plain, n);
    let image_is_generator_class = images.len() == 1
        && with(&images) == base + 1
        && with(std::slice::from_ref(&generator)) == with(&[generator.clone(), images[0].clone()]);

    // the explicit lift
    let d = log.wedge.dim();
    let mut lift = vec![0u8; log.ambient_dim(k)];
    for (t, set) in log.levels[k].iter().enumerate() {
        for (idx, i) in set.positions().enumerate() {
            let rest = set.without(i);
            let sign = if idx % 2 == 0 { 1 } else { field.neg(1) };
            for (lead, coef) in [(0usize, sign), (i, field.neg(sign))] {
                if let Some((s, neg)) = GenSet::from_positions(&[lead]).wedge(rest) {
                    let r = log.wedge.index_of(s).expect("degree n set");
                    let c = if neg { field.neg(coef) } else { coef };
                    lift[t * d + r] = field.add(lift[t * d + r], c);
                }
            }
        }
    }
    let divisor_generator = {
        let upper = WedgeBasis::new(n + 1, n);
        let dd = divisor.wedge.dim();
        let mut v = vec![0u8; divisor.ambient_dim(k)];
        for (t, set) in divisor.levels[k].iter().enumerate() {
            if !set.contains(0) {
                let comp = contract(field, &upper, &divisor.wedge, &upper.unit(*set));
                v[t * dd..(t + 1) * dd].copy_from_slice(&comp);
            }
        }
        v
    };
    let explicit_lift_valid = log.is_cochain(k, &lift) && res_k.mul_vec(&lift)? == divisor_generator;
    let lift_image = log.coboundary(k).mul_vec(&lift)?;
    let neg_generator: Vec<u8> = generator.iter().map(|&x| field.neg(x)).collect();
    let explicit_lift_image_sign = if lift_image == generator {
        Some(1)
    } else if lift_image == neg_generator {
        Some(-1)
    } else {
        None
    };

    Ok(ConnectingMapReport {
        n,
        source_dim,
        target_dim,
        rank,
        isomorphism: source_dim == target_dim && rank == source_dim && source_dim == 1,
        zero_maps_to_zero,
        image_is_generator_class,
        explicit_lift_valid,
        explicit_lift_image_sign,
        image: images.first().map(|v| components(&plain, n, v)).unwrap_or_default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h1_of_p1_is_spanned_by_dlog_difference() {
        let f = PrimeField::new(3).unwrap();
        let r = generator_check(f, 1, 1).unwrap();
        assert!(r.spans, "{r:?}");
        assert_eq!(r.components[0].form, "-dlogX0 + dlogX1");
        assert!(r.zero_is_coboundary);
    }

    #[test]
    fn connecting_map_n1_hits_generator() {
        let f = PrimeField::new(2).unwrap();
        let r = connecting_map_check(f, 1).unwrap();
        assert!(r.isomorphism && r.image_is_generator_class && r.explicit_lift_valid, "{r:?}");
        assert!(r.zero_maps_to_zero);
    }

    #[test]
    fn connecting_map_n2_and_n3() {
        for (p, n) in [(5, 2), (3, 3)] {
            let f = PrimeField::new(p).unwrap();
            let r = connecting_map_check(f, n).unwrap();
            assert!(r.isomorphism && r.image_is_generator_class, "{r:?}");
        }
    }

    #[test]
    fn displayed_lift_is_euler_invariant_only_when_p_divides_n_minus_one() {
        let r = connecting_map_check(PrimeField::new(5).unwrap(), 2).unwrap();
        assert!(!r.explicit_lift_valid);
        let r = connecting_map_check(PrimeField::new(2).unwrap(), 3).unwrap();
        assert!(r.explicit_lift_valid, "{r:?}");
    }
}
