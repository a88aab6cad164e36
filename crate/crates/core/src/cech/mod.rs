//! Čech cohomology of twisted log forms on `P^n` and on the blowup of `A^m`
//! along a coordinate center, computed one torus weight at a time.

mod atlas;
mod formal;
mod generators;
mod homogeneous;

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::WedgeBasis;
use crate::gf::PrimeField;

pub use atlas::{blowup_charts, projective_atlas, Atlas, Chart};
pub use formal::{exceptional_chart_agreement, formal_functions_check, FormalFunctionsReport, TwistPiece};
pub use generators::{connecting_map_check, generator_check, ConnectingMapReport, GeneratorReport};
pub use homogeneous::{proj_section_space, sign_pattern, CechComplex, SectionKind};

impl Default for SectionKind {
    fn default() -> Self {
        SectionKind::Forms
    }
}

impl Serialize for SectionKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(match self {
            SectionKind::Forms => "forms",
            SectionKind::PulledBack => "pulled_back",
        })
    }
}

impl<'de> Deserialize<'de> for SectionKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match String::deserialize(d)?.as_str() {
            "forms" => Ok(SectionKind::Forms),
            "pulled_back" => Ok(SectionKind::PulledBack),
            other => Err(serde::de::Error::custom(format!("unknown section kind {other}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Space {
    Projective { n: usize },
    /// `Bl_{V(T_1..T_c)} A^m` with log structure `E + D̄_1`.
    Blowup { m: usize, c: usize },
}

/// `Ω^j(log D_S)(l)`. On the blowup the log divisor is always `E + D̄_1`,
/// `log` must be empty and `twist` zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SheafSpec {
    pub space: Space,
    pub j: usize,
    #[serde(default)]
    pub log: Vec<usize>,
    #[serde(default)]
    pub twist: i32,
    #[serde(default)]
    pub kind: SectionKind,
}

impl SheafSpec {
    pub fn projective(n: usize, j: usize, log: &[usize], twist: i32) -> Self {
        SheafSpec { space: Space::Projective { n }, j, log: log.to_vec(), twist, kind: SectionKind::Forms }
    }

    pub fn blowup(m: usize, c: usize, j: usize) -> Self {
        SheafSpec { space: Space::Blowup { m, c }, j, log: Vec::new(), twist: 0, kind: SectionKind::Forms }
    }

    /// Number of Čech degrees, i.e. number of charts.
    pub fn charts(&self) -> usize {
        match self.space {
            Space::Projective { n } => n + 1,
            Space::Blowup { c, .. } => c,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.space {
            Space::Projective { n } => {
                if n > 6 {
                    return Err(Error::invalid("projective dimension must lie in 0..=6"));
                }
                let max_j = if self.kind == SectionKind::PulledBack { n + 1 } else { n };
                if self.j > max_j {
                    return Err(Error::invalid("form degree exceeds dimension"));
                }
                if let Some(s) = self.log.iter().find(|&&s| s > n) {
                    return Err(Error::invalid(format!("log index {s} outside 0..={n}")));
                }
            }
            Space::Blowup { m, c } => {
                if !(2 <= c && c <= m && m <= 6) {
                    return Err(Error::invalid("blowup requires 2 ≤ c ≤ m ≤ 6"));
                }
                if self.j > m {
                    return Err(Error::invalid("form degree exceeds dimension"));
                }
                if !self.log.is_empty() || self.twist != 0 || self.kind != SectionKind::Forms {
                    return Err(Error::invalid("blowup sheaf is fixed to Ω^j(log(E + D̄_1))"));
                }
            }
        }
        Ok(())
    }

    fn log_mask(&self) -> u32 {
        self.log.iter().fold(0, |m, &s| m | 1 << s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightDims {
    pub w: Vec<i32>,
    pub dims: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightBox {
    /// `|w_k| ≤ radius` for every coordinate.
    pub radius: i32,
    /// Number of weights enumerated.
    pub weights: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyReport {
    pub spec: SheafSpec,
    pub prime: u32,
    #[serde(rename = "box")]
    pub weight_box: WeightBox,
    pub dims: Vec<usize>,
    pub per_weight: Vec<WeightDims>,
    /// Enlarging the box by one step changed no compared dimension.
    pub stabilized: bool,
    /// Degrees whose totals are infinite and only reported inside the box.
    pub truncated_degrees: Vec<usize>,
    pub elapsed_ms: Option<u64>,
}

impl CohomologyReport {
    /// `Some(true)` iff every `H^i`, `i ≥ 1`, vanishes; `None` before stabilization.
    pub fn higher_vanishing(&self) -> Option<bool> {
        self.stabilized.then(|| self.dims.iter().skip(1).all(|&d| d == 0))
    }
}

/// Box growth: start radius (default `max(|l|, j, p) + 2`) and hard cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxPolicy {
    pub start: Option<i32>,
    pub cap: i32,
}

impl Default for BoxPolicy {
    fn default() -> Self {
        BoxPolicy { start: None, cap: 64 }
    }
}

/// Weights `w ∈ [−r, r]^{len}` with `Σ w = total` (when given), in lex order.
fn box_weights(len: usize, lo: &[i32], hi: &[i32], total: Option<i32>) -> Vec<Vec<i32>> {
    let mut out = Vec::new();
    let mut cur = vec![0i32; len];
    fn rec(k: usize, lo: &[i32], hi: &[i32], total: Option<i32>, sum: i32, cur: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
        let len = cur.len();
        if k + 1 == len && total.is_some() {
            let last = total.unwrap() - sum;
            if lo[k] <= last && last <= hi[k] {
                cur[k] = last;
                out.push(cur.clone());
            }
            return;
        }
        if k == len {
            out.push(cur.clone());
            return;
        }
        for v in lo[k]..=hi[k] {
            cur[k] = v;
            rec(k + 1, lo, hi, total, sum + v, cur, out);
        }
    }
    if len > 0 {
        rec(0, lo, hi, total, 0, &mut cur, &mut out);
    }
    out
}

struct BoxResult {
    weights: usize,
    dims: Vec<usize>,
    per_weight: Vec<WeightDims>,
}

fn sum_into(total: &mut [usize], d: &[usize]) {
    for (t, x) in total.iter_mut().zip(d) {
        *t += x;
    }
}

/// Dimensions of the homogeneous Čech complex at one weight of `P^n`.
pub fn projective_weight_dims(field: PrimeField, spec: &SheafSpec, w: &[i32]) -> Result<Vec<usize>> {
    spec.validate()?;
    let Space::Projective { n } = spec.space else {
        return Err(Error::invalid("not a projective space"));
    };
    if w.len() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, found: w.len() });
    }
    if w.iter().sum::<i32>() != spec.twist {
        return Ok(vec![0; n + 1]);
    }
    Ok(projective_complex(field, spec, w).dims())
}

/// The homogeneous Čech complex of `spec` at weight `w`.
pub fn projective_complex(field: PrimeField, spec: &SheafSpec, w: &[i32]) -> CechComplex {
    let log_mask = spec.log_mask();
    let kind = spec.kind;
    CechComplex::new(field, spec.charts(), spec.j, |wb: &WedgeBasis, i| proj_section_space(field, wb, kind, log_mask, i, w))
}

fn projective_box(field: PrimeField, spec: &SheafSpec, r: i32) -> BoxResult {
    let len = spec.charts();
    let weights = box_weights(len, &vec![-r; len], &vec![r; len], Some(spec.twist));
    let mut patterns: Vec<Vec<i8>> = weights.iter().map(|w| sign_pattern(w)).collect();
    patterns.sort();
    patterns.dedup();
    let cache: HashMap<Vec<i8>, Vec<usize>> = patterns
        .into_par_iter()
        .map(|pat| {
            let w: Vec<i32> = pat.iter().map(|&s| s as i32).collect();
            let dims = projective_complex(field, spec, &w).dims();
            (pat, dims)
        })
        .collect();
    let mut dims = vec![0; len];
    let mut per_weight = Vec::new();
    for w in &weights {
        let d = &cache[&sign_pattern(w)];
        if d.iter().any(|&x| x > 0) {
            sum_into(&mut dims, d);
            per_weight.push(WeightDims { w: w.clone(), dims: d.clone() });
        }
    }
    BoxResult { weights: weights.len(), dims, per_weight }
}

/// Weights of the blowup box: `[−r, r]` on the center coordinates, `[0, r]` on the rest.
fn blowup_box(field: PrimeField, m: usize, c: usize, j: usize, r: i32) -> Result<BoxResult> {
    let atlas = blowup_charts(field, m, c)?;
    let lo: Vec<i32> = (0..m).map(|i| if i < c { -r } else { 0 }).collect();
    let hi = vec![r; m];
    let weights = box_weights(m, &lo, &hi, None);
    let results: Vec<Vec<usize>> = weights
        .par_iter()
        .map(|w| {
            let chi: Vec<i64> = w.iter().map(|&x| x as i64).collect();
            atlas.cohomology_dims(j, &chi)
        })
        .collect::<Result<_>>()?;
    let mut dims = vec![0; c];
    let mut per_weight = Vec::new();
    for (w, d) in weights.iter().zip(results) {
        if d.iter().any(|&x| x > 0) {
            sum_into(&mut dims, &d);
            per_weight.push(WeightDims { w: w.clone(), dims: d });
        }
    }
    Ok(BoxResult { weights: weights.len(), dims, per_weight })
}

/// Computes the cohomology report, enlarging the weight box until one
/// more step changes nothing (degrees `≥ 1` on the blowup, where `H^0` is
/// infinite-dimensional).
pub fn cech_cohomology(field: PrimeField, spec: &SheafSpec, policy: BoxPolicy) -> Result<CohomologyReport> {
    spec.validate()?;
    let p = field.p() as i32;
    let mut r = policy.start.unwrap_or(spec.twist.abs().max(spec.j as i32).max(p) + 2).max(1);
    if r >= policy.cap {
        return Err(Error::ResourceLimit(format!("start radius {r} is not below the cap {}", policy.cap)));
    }
    let compute = |r: i32| -> Result<BoxResult> {
        match spec.space {
            Space::Projective { .. } => Ok(projective_box(field, spec, r)),
            Space::Blowup { m, c } => blowup_box(field, m, c, spec.j, r),
        }
    };
    let skip = match spec.space {
        Space::Projective { .. } => 0,
        Space::Blowup { .. } => 1,
    };
    let mut current = compute(r)?;
    loop {
        let next = compute(r + 1)?;
        if current.dims[skip..] == next.dims[skip..] {
            return Ok(CohomologyReport {
                spec: spec.clone(),
                prime: field.p(),
                weight_box: WeightBox { radius: r, weights: current.weights },
                dims: current.dims,
                per_weight: current.per_weight,
                stabilized: true,
                truncated_degrees: if skip == 1 { vec![0] } else { Vec::new() },
                elapsed_ms: None,
            });
        }
        let grown = (2 * r).min(policy.cap - 1);
        if grown <= r {
            return Err(Error::ResourceLimit(format!("weight box did not stabilize below radius {}", policy.cap)));
        }
        r = grown;
        current = compute(r)?;
    }
}

/// Convenience wrapper for the blowup.
pub fn blowup_cohomology(field: PrimeField, m: usize, c: usize, j: usize, policy: BoxPolicy) -> Result<CohomologyReport> {
    cech_cohomology(field, &SheafSpec::blowup(m, c, j), policy)
}

/// Per-weight agreement of the homogeneous model with the chart model on `P^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelComparison {
    pub spec: SheafSpec,
    pub radius: i32,
    pub weights_compared: usize,
    pub mismatches: Vec<(Vec<i32>, Vec<usize>, Vec<usize>)>,
}

pub fn compare_models(field: PrimeField, spec: &SheafSpec, radius: i32) -> Result<ModelComparison> {
    spec.validate()?;
    let Space::Projective { n } = spec.space else {
        return Err(Error::invalid("model comparison is defined on projective space"));
    };
    if spec.kind != SectionKind::Forms {
        return Err(Error::invalid("the chart model covers Ω^j(log D)(l) only"));
    }
    let atlas = projective_atlas(field, n, &spec.log, spec.twist)?;
    let weights = box_weights(n + 1, &vec![-radius; n + 1], &vec![radius; n + 1], Some(spec.twist));
    let rows: Vec<Option<(Vec<i32>, Vec<usize>, Vec<usize>)>> = weights
        .par_iter()
        .map(|w| {
            let a = projective_complex(field, spec, w).dims();
            let chi: Vec<i64> = w.iter().map(|&x| x as i64).collect();
            let b = atlas.cohomology_dims(spec.j, &chi)?;
            Ok((a != b).then(|| (w.clone(), a, b)))
        })
        .collect::<Result<_>>()?;
    Ok(ModelComparison {
        spec: spec.clone(),
        radius,
        weights_compared: weights.len(),
        mismatches: rows.into_iter().flatten().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn p2_cotangent() {
        let r = cech_cohomology(f(3), &SheafSpec::projective(2, 1, &[], 0), BoxPolicy::default()).unwrap();
        assert_eq!(r.dims, vec![0, 1, 0]);
        assert!(r.stabilized);
        assert_eq!(r.per_weight, vec![WeightDims { w: vec![0, 0, 0], dims: vec![0, 1, 0] }]);
    }

    #[test]
    fn p1_o_minus_two() {
        let r = cech_cohomology(f(2), &SheafSpec::projective(1, 0, &[], -2), BoxPolicy::default()).unwrap();
        assert_eq!(r.dims, vec![0, 1]);
        assert_eq!(r.per_weight[0].w, vec![-1, -1]);
    }

    #[test]
    fn p2_top_log_forms_are_acyclic() {
        let r = cech_cohomology(f(3), &SheafSpec::projective(2, 2, &[0], 0), BoxPolicy::default()).unwrap();
        assert_eq!(r.higher_vanishing(), Some(true));
    }

    #[test]
    fn h0_of_positive_twist_counts_monomials() {
        // H^0(P^2, O(2)) = 6
        let r = cech_cohomology(f(5), &SheafSpec::projective(2, 0, &[], 2), BoxPolicy::default()).unwrap();
        assert_eq!(r.dims, vec![6, 0, 0]);
    }

    #[test]
    fn models_agree_on_p1_and_p2() {
        for spec in [
            SheafSpec::projective(1, 1, &[0], 0),
            SheafSpec::projective(1, 0, &[], -3),
            SheafSpec::projective(2, 1, &[], 1),
            SheafSpec::projective(2, 2, &[0], -1),
            SheafSpec::projective(2, 1, &[0, 2], 0),
        ] {
            let c = compare_models(f(2), &spec, 3).unwrap();
            assert!(c.mismatches.is_empty(), "{spec:?}: {:?}", c.mismatches);
        }
    }

    #[test]
    fn blowup_surface_is_acyclic() {
        for j in 0..=2 {
            let r = blowup_cohomology(f(2), 2, 2, j, BoxPolicy::default()).unwrap();
            assert_eq!(r.higher_vanishing(), Some(true), "j={j}: {:?}", r.dims);
            assert_eq!(r.truncated_degrees, vec![0]);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let e = cech_cohomology(f(2), &SheafSpec::projective(1, 0, &[], 0), BoxPolicy { start: Some(8), cap: 8 });
        assert!(matches!(e, Err(Error::ResourceLimit(_))));
    }
}
