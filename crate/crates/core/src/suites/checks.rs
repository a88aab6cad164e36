use serde_json::json;

use super::{run_check, CheckOutcome, Finding, SuiteParams};
use crate::cartier::{
    c_minus_one_surjectivity, cartier, cartier_axioms, etale_obstruction_demo, nu_bruteforce_dim, nu_sections,
};
use crate::cech::{
    blowup_cohomology, cech_cohomology, compare_models, connecting_map_check, formal_functions_check, generator_check,
    BoxPolicy, SheafSpec,
};
use crate::error::Result;
use crate::exterior::binomial;
use crate::forms::{FormRing, GenSet, LogForm, Multidegree};
use crate::gf::{span_rank, PrimeField};
use crate::purity::{commuting_square, gysin_residue, gysin_residue_closed, iterated_purity, nu_purity_report, GysinSetup};
use crate::sequences::{euler_complex, filtration, fundamental_ses_check, pullback_ses, residue_sweep, FiltrationSpec};

/// Seed of the random subspaces in the filtration suite.
pub const FILTRATION_SEED: u64 = 0x5eed;

pub fn ring(p: u32, m: usize, log: &[u8], radius: i32) -> Result<FormRing> {
    FormRing::new(PrimeField::new(p)?, m)?.with_log(log)?.with_radius(radius)
}

fn first_labels(a: usize) -> Vec<u8> {
    (1..=a as u8).collect()
}

/// Window radius used by ring-level suites.
pub fn ring_radius(p: u32) -> i32 {
    2 * p as i32
}

fn weights_box(len: usize, r: i32) -> Vec<Vec<i32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out.into_iter().flat_map(|w| (-r..=r).map(move |x| [w.clone(), vec![x]].concat())).collect();
    }
    out
}

pub fn cartier_suite(params: &SuiteParams) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for p in params.primes_or(&[2, 3]) {
        for m in params.m_range(1, 3) {
            for log in [Vec::new(), first_labels(m)] {
                let radius = ring_radius(p);
                out.push(run_check(
                    "cartier-axioms",
                    json!({"p": p, "m": m, "log": log, "radius": radius}),
                    "C(c)=c, C(f^p ω)=f C(ω), C(ω∧ω′)=C(ω)∧C(ω′), ker C = B, C(f^{p−1}df)=df, C∘C⁻¹=id on every slice basis",
                    || {
                        let r = cartier_axioms(ring(p, m, &log, radius)?)?;
                        let names = ["unit", "frobenius_linear", "multiplicative", "kernel_is_exact", "log_derivative", "inverse", "weight_scaling"];
                        let detail = names
                            .iter()
                            .zip(r.tallies())
                            .map(|(n, t)| format!("{n} {}/{}", t.checked - t.failed, t.checked))
                            .collect::<Vec<_>>()
                            .join(", ");
                        Ok(Finding::new(r.passed(), r.tallies().iter().map(|t| t.checked).collect(), detail))
                    },
                )?);
            }
        }
    }
    Ok(out)
}

pub fn nu_suite(params: &SuiteParams) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for p in params.primes_or(&[2, 3]) {
        for m in params.m_range(1, 3) {
            for a in 0..=m {
                for n in params.n_range(0, a + 1) {
                    let log = first_labels(a);
                    let radius = ring_radius(p);
                    out.push(run_check(
                        "nu",
                        json!({"p": p, "m": m, "log": log, "n": n, "radius": radius}),
                        "ν(n) = ker(C−1: ZΩ^n → Ω^n) has dimension C(|L|, n); 0→ν→ZΩ→Ω exact at ν and ZΩ; C−1 hits h·dlog T_I after an Artin–Schreier extension",
                        || nu_point(ring(p, m, &log, radius)?, n),
                    )?);
                }
            }
        }
    }
    Ok(out)
}

fn nu_point(r: FormRing, n: usize) -> Result<Finding> {
    let a = r.log_labels().len();
    let expected = binomial(a, n);
    let nu = nu_sections(r, n)?;
    let brute = nu_bruteforce_dim(r, n)?;
    // ν injects into ZΩ and is fixed by C
    let closed = nu.basis.iter().all(|f| f.is_closed());
    let fixed = nu.basis.iter().map(|f| Ok(cartier(f)? == *f)).collect::<Result<Vec<_>>>()?.into_iter().all(|x| x);
    let coords: Vec<Vec<u8>> = {
        let mut terms: Vec<(Multidegree, GenSet)> = nu.basis.iter().flat_map(|f| f.ambient_terms().map(|(w, g, _)| (w, g))).collect();
        terms.sort();
        terms.dedup();
        nu.basis
            .iter()
            .map(|f| {
                let mut v = vec![0u8; terms.len()];
                for (w, g, c) in f.ambient_terms() {
                    v[terms.binary_search(&(w, g)).unwrap()] = c;
                }
                v
            })
            .collect()
    };
    let len = coords.first().map_or(0, |v| v.len());
    let independent = span_rank(r.field(), len, &coords) == nu.dim();
    let mut targets = 0;
    let mut preimages = 0;
    for gens in GenSet::subsets(r.log_mask(), n) {
        for bits in 0..1u32 << r.nvars() {
            let h = Multidegree::from_slice(&(0..r.nvars()).map(|k| (bits >> k & 1) as i32).collect::<Vec<_>>());
            let target = LogForm::from_ambient(r, 1, h, gens)?;
            targets += 1;
            if c_minus_one_surjectivity(&target)?.verified {
                preimages += 1;
            }
        }
    }
    let ok = nu.dim() == expected && brute == expected && closed && fixed && independent && preimages == targets;
    Ok(Finding::new(
        ok,
        vec![expected, nu.dim(), brute],
        format!("C(|L|,n)={expected} chains={} brute={brute} preimages {preimages}/{targets}", nu.dim()),
    ))
}

pub fn residue_suite(params: &SuiteParams) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for p in params.primes_or(&[2, 3]) {
        for m in params.m_range(1, 3) {
            let mut logs = vec![first_labels(m)];
            if m > 1 {
                logs.push(vec![1]);
            }
            for log in logs {
                for a in 1..=m {
                    let radius = ring_radius(p);
                    out.push(run_check(
                        "residue",
                        json!({"p": p, "m": m, "log": log, "a": a, "radius": radius}),
                        "the three residue sequences and the closed-forms residue sequence are exact on every weight slice",
                        || {
                            let s = residue_sweep(ring(p, m, &log, radius)?, a, 1)?;
                            let detail = match &s.first_failure {
                                Some(f) => format!("first failure {:?} homology {:?}", f.labels, f.homology),
                                None => format!("{} weights, {} nonzero", s.weights, s.nonzero_slices),
                            };
                            Ok(Finding::new(s.all_exact && s.closed_all_exact, vec![s.weights, s.nonzero_slices], detail))
                        },
                    )?);
                }
            }
        }
    }
    Ok(out)
}

pub fn fundamental_suite(params: &SuiteParams) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for p in params.primes_or(&[2, 3]) {
        for m in params.m_range(1, 3) {
            let log = first_labels(m);
            let radius = ring_radius(p);
            out.push(run_check(
                "fundamental",
                json!({"p": p, "m": m, "log": log, "z": 1, "radius": radius}),
                "d(I/I²) → i*Ω¹ vanishes and i*Ω^{j,log}_X ≅ Ω^{j,log}_Z for Z = V(T_1)",
                || {
                    let r = fundamental_ses_check(ring(p, m, &log, radius)?, 1)?;
                    Ok(Finding::new(r.restriction_iso && r.conormal_image_zero, r.dims, format!("{} weights", r.weights_checked)))
                },
            )?);
        }
    }
    Ok(out)
}

pub fn euler_suite(params: &SuiteParams) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for p in params.primes_or(&[2, 3]) {
        for n in params.n_range(1, 3) {
            for j in 0..=n {
                out.push(run_check(
                    "euler",
                    json!({"p": p, "n": n, "j": j, "radius": 2}),
                    "0 → Ω^j(l) → ⋀^j(O(−1)^{n+1})(l) → Ω^{j−1}(l) → 0 is exact on every chart and weight",
                    || {
                        let f = PrimeField::new(p)?;
                        let mut ok = true;
                        let mut nonzero = 0;
                        let weights = weights_box(n + 1, 2);
                        for w in &weights {
                            let e = euler_complex(f, n, j, w)?;
                            ok &= e.exact();
                            nonzero += e.charts.iter().filter(|(_, c)| c.dims.iter().any(|&d| d > 0)).count();
                        }
                        Ok(Finding::new(ok, vec![weights.len(), nonzero], format!("{nonzero} nonzero chart slices")))
                    },
                )?);
            }
        }
    }
    Ok(out)
}

pub fn pullback_suite(params: &SuiteParams) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for p in params.primes_or(&[2, 3]) {
        for c in params.m_range(2, 3) {
            for n in 0..=c {
                out.push(run_check(
                    "pullback",
                    json!({"p": p, "c": c, "n": n, "radius": 2}),
                    "0 → Ω^n_E(log) → Ω^{n,log}_E → Ω^{n−1}_E(log) → 0 is exact on every chart of E and weight",
                    || {
                        let f = PrimeField::new(p)?;
                        let mut ok = true;
                        let weights = weights_box(c, 2);
                        for w in &weights {
                            ok &= pullback_ses(f, c, n, w)?.exact();
                        }
                        Ok(Finding::new(ok, vec![weights.len()], ""))
                    },
                )?);
            }
        }
    }
    Ok(out)
}

pub fn filtration_suite(params: &SuiteParams) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for p in params.primes_or(&[2, 3]) {
        for u in 0..=5 {
            for w in 0..=5 {
                if u + w == 0 {
                    continue;
                }
                out.push(run_check(
                    "filtration",
                    json!({"p": p, "u": u, "w": w}),
                    "⋀^k V has a filtration with graded pieces ⋀^{k−i}U ⊗ ⋀^iW of dimension C(u,k−i)·C(w,i)",
                    || {
                        let f = PrimeField::new(p)?;
                        let mut ok = true;
                        let mut dims = Vec::new();
                        for k in 0..=u + w {
                            let r = filtration(f, FiltrationSpec { u, v: u + w, w, k }, FILTRATION_SEED)?;
                            ok &= r.passed();
                            dims.push(r.graded_dims.iter().sum());
                        }
                        Ok(Finding::new(ok, dims, ""))
                    },
                )?);
            }
        }
    }
    Ok(out)
}

fn cohomology_check(
    name: &str,
    p: u32,
    spec: SheafSpec,
    statement: &str,
    accept: impl FnOnce(&[usize]) -> bool,
) -> Result<CheckOutcome> {
    let params = json!({"p": p, "sheaf": spec});
    run_check(name, params, statement, || {
        let r = cech_cohomology(PrimeField::new(p)?, &spec, BoxPolicy::default())?;
        let ok = r.stabilized && accept(&r.dims);
        Ok(Finding::new(ok, r.dims, format!("box radius {}", r.weight_box.radius)))
    })
}

pub fn projective_suite(params: &SuiteParams) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for p in params.primes_or(&[2, 3, 5]) {
        for n in params.n_range(0, 3) {
            for j in 0..=n {
                out.push(cohomology_check(
                    "projective",
                    p,
                    SheafSpec::projective(n, j, &[], 0),
                    "dim H^i(P^n, Ω^j) = 1 if i = j, else 0",
                    |d| d.iter().enumerate().all(|(i, &x)| x == usize::from(i == j)),
                )?);
            }
        }
    }
    Ok(out)
}

pub fn twist_suite(params: &SuiteParams) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for p in params.primes_or(&[2, 3]) {
        for n in params.n_range(1, 3) {
            for j in 0..=n {
                for l in 1..=3 {
                    out.push(cohomology_check(
                        "twist",
                        p,
                        SheafSpec::projective(n, j, &[], l),
                        "H^i(P^n, Ω^j(l)) = 0 for i ≥ 1 and l ≥ 1 (H^0 reported)",
                        |d| d.iter().skip(1).all(|&x| x == 0),
                    )?);
                }
            }
        }
    }
    Ok(out)
}

pub fn log_vanishing_suite(params: &SuiteParams) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for p in params.primes_or(&[2, 3]) {
        for n in params.n_range(1, 3) {
            for l in 0..=3 {
                out.push(cohomology_check(
                    "log-vanishing",
                    p,
                    SheafSpec::projective(n, n, &[0], l),
                    "H^i(P^n, Ω^n(log V(X_0))(l)) = 0 for i ≥ 1 and l ≥ 0 (H^0 reported)",
                    |d| d.iter().skip(1).all(|&x| x == 0),
                )?);
            }
        }
    }
    Ok(out)
}

pub fn models_suite(params: &SuiteParams) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for p in params.primes_or(&[2, 3]) {
        for n in params.n_range(1, 2) {
            for j in 0..=n {
                for log in [vec![], vec![0]] {
                    for l in -2..=2 {
                        let spec = SheafSpec::projective(n, j, &log, l);
                        out.push(run_check(
                            "models",
                            json!({"p": p, "sheaf": spec, "radius": 3}),
                            "the homogeneous contraction model and the glued affine-chart model give equal per-weight Čech dimensions",
                            || {
                                let c = compare_models(PrimeField::new(p)?, &spec, 3)?;
                                Ok(Finding::new(c.mismatches.is_empty(), vec![c.weights_compared, c.mismatches.len()], ""))
                            },
                        )?);
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn generators_suite(params: &SuiteParams) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for p in params.primes_or(&[2, 3]) {
        for n in params.n_range(1, 3) {
            for j in 0..=n {
                out.push(run_check(
                    "generators",
                    json!({"p": p, "n": n, "j": j}),
                    "the alternating dlog cochain (ι(dlog X_I))_I is a cocycle whose class spans H^j(P^n, Ω^j)",
                    || {
                        let r = generator_check(PrimeField::new(p)?, n, j)?;
                        let ok = r.is_cochain && r.is_cocycle && !r.is_coboundary && r.zero_is_coboundary && r.spans && r.cohomology_dim == 1;
                        let sample = r.components.first().map(|c| format!("U{:?}: {}", c.chart, c.form)).unwrap_or_default();
                        Ok(Finding::new(ok, vec![r.cohomology_dim], sample))
                    },
                )?);
            }
        }
    }
    Ok(out)
}

pub fn connecting_suite(params: &SuiteParams) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for p in params.primes_or(&[2, 3]) {
        for n in params.n_range(1, 3) {
            out.push(run_check(
                "connecting",
                json!({"p": p, "n": n}),
                "the boundary map H^{n−1}(D, Ω^{n−1}_D) → H^n(P^n, Ω^n) of 0 → Ω^n → Ω^n(log D) → Ω^{n−1}_D → 0 is an isomorphism onto the dlog class",
                || {
                    let r = connecting_map_check(PrimeField::new(p)?, n)?;
                    let ok = r.isomorphism && r.zero_maps_to_zero && r.image_is_generator_class;
                    Ok(Finding::new(
                        ok,
                        vec![r.source_dim, r.target_dim, r.rank],
                        format!("explicit lift valid: {}", r.explicit_lift_valid),
                    ))
                },
            )?);
        }
    }
    Ok(out)
}

/// `(m, c)` pairs of the default blowup grid.
pub const BLOWUP_GRID: [(usize, usize); 3] = [(2, 2), (3, 2), (3, 3)];

pub fn blowup_suite(params: &SuiteParams) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for p in params.primes_or(&[2, 3]) {
        for (m, c) in BLOWUP_GRID {
            if params.m.is_some_and(|x| x != m) {
                continue;
            }
            for j in 0..=m {
                out.push(run_check(
                    "blowup",
                    json!({"p": p, "m": m, "c": c, "j": j}),
                    "H^i(Bl A^m, Ω^j(log(E + D̄_1))) = 0 for i > 0 in a stabilized weight box",
                    || {
                        let r = blowup_cohomology(PrimeField::new(p)?, m, c, j, BoxPolicy::default())?;
                        let ok = r.higher_vanishing() == Some(true);
                        Ok(Finding::new(ok, r.dims, format!("box radius {}, H^0 truncated", r.weight_box.radius)))
                    },
                )?);
            }
        }
    }
    Ok(out)
}

pub fn formal_suite(params: &SuiteParams) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for p in params.primes_or(&[2, 3]) {
        for c in params.m_range(2, 3) {
            for j in 0..=c {
                out.push(run_check(
                    "formal",
                    json!({"p": p, "c": c, "j": j, "l_max": 3}),
                    "H^{i>0}(E, Ω^{j,log} ⊗ O/I_E^l) = 0 for l ≤ 3 through the graded pieces Ω^{j,log}_E(k)",
                    || {
                        let r = formal_functions_check(PrimeField::new(p)?, c, j, 3)?;
                        let dims = r.pieces.iter().map(|x| x.middle.iter().skip(1).sum()).collect();
                        Ok(Finding::new(r.vanishing, dims, ""))
                    },
                )?);
            }
        }
    }
    Ok(out)
}

pub fn gysin_suite(params: &SuiteParams) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for p in params.primes_or(&[2, 3]) {
        for m in params.m_range(1, 3) {
            for n in params.n_range(0, m) {
                let log = first_labels(m);
                let radius = ring_radius(p);
                out.push(run_check(
                    "gysin",
                    json!({"p": p, "m": m, "log": log, "z": 1, "n": n, "radius": radius}),
                    "residue identifies Ω^n(log(D+Z))/Ω^n(log D) with Ω^{n−1}_Z(log D|_Z), and the closed-forms cokernel with ZΩ^{n−1}_Z compatibly",
                    || {
                        let s = GysinSetup::new(ring(p, m, &log, radius)?, 1)?;
                        let mut ok = true;
                        let (mut coker, mut closed) = (0, 0);
                        for w in s.ring().window_weights() {
                            let g = gysin_residue(&s, n, w)?;
                            let c = gysin_residue_closed(&s, n, w)?;
                            ok &= g.iso && c.iso && c.compatible && c.exact_to_exact && c.prime_to_p_exact;
                            coker += g.coker_dim;
                            closed += c.coker_dim;
                        }
                        Ok(Finding::new(ok, vec![coker, closed], ""))
                    },
                )?);
            }
        }
    }
    Ok(out)
}

pub fn iterated_suite(params: &SuiteParams) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for p in params.primes_or(&[2, 3]) {
        for m in params.m_range(2, 3) {
            let chains: Vec<Vec<u8>> = if m == 2 { vec![vec![1, 2]] } else { vec![vec![1, 2], vec![2, 3], vec![1, 2, 3]] };
            for chain in chains {
                for n in params.n_range(0, m) {
                    let log = first_labels(m);
                    let radius = ring_radius(p);
                    out.push(run_check(
                        "iterated",
                        json!({"p": p, "m": m, "log": log, "chain": chain, "n": n, "radius": radius}),
                        "composed residues identify the iterated cokernel with Ω^{n−r}_Z, independently of the order of the divisors",
                        || {
                            let r = iterated_purity(ring(p, m, &log, radius)?, &chain, n)?;
                            Ok(Finding::new(r.iso && r.order_independent, vec![r.coker_dim, r.target_dim], format!("shift {}", r.shift)))
                        },
                    )?);
                }
            }
        }
    }
    Ok(out)
}

fn purity_grid(params: &SuiteParams) -> Vec<(u32, usize, usize, usize)> {
    let mut out = Vec::new();
    for p in params.primes_or(&[2, 3]) {
        for m in params.m_range(1, 3) {
            for a in 1..=m {
                for n in params.n_range(0, 2) {
                    out.push((p, m, a, n));
                }
            }
        }
    }
    out
}

pub fn purity_square_suite(params: &SuiteParams) -> Result<Vec<CheckOutcome>> {
    purity_grid(params)
        .into_iter()
        .map(|(p, m, a, n)| {
            let log = first_labels(a);
            let radius = ring_radius(p);
            run_check(
                "purity-square",
                json!({"p": p, "m": m, "log": log, "z": 1, "n": n, "radius": radius}),
                "res(C(η)) = C(res(η)) for every closed basis form η of ZΩ^{n+1}(log(D+Z)), with η = γ + η′∧dlog T_z",
                || {
                    let r = commuting_square(&GysinSetup::new(ring(p, m, &log, radius)?, 1)?, n)?;
                    let detail = r.mismatches.first().cloned().unwrap_or_else(|| format!("{} forms", r.forms_checked));
                    Ok(Finding::new(r.square_ok, vec![r.forms_checked, r.mismatches.len()], detail))
                },
            )
        })
        .collect()
}

pub fn purity_nu_suite(params: &SuiteParams) -> Result<Vec<CheckOutcome>> {
    purity_grid(params)
        .into_iter()
        .map(|(p, m, a, n)| {
            let log = first_labels(a);
            let radius = ring_radius(p);
            run_check(
                "purity-nu",
                json!({"p": p, "m": m, "log": log, "z": 1, "n": n, "radius": radius}),
                "dim ker(C−1) on the Gysin cokernels equals dim ν_Z(n−1); coker(C−1) reported",
                || {
                    let r = nu_purity_report(&GysinSetup::new(ring(p, m, &log, radius)?, 1)?, n)?;
                    Ok(Finding::new(
                        r.ok(),
                        vec![r.nu_dims.expected, r.nu_dims.computed, r.obstruction_dim],
                        format!(
                            "obstruction {} in the polynomial model; extension preimages {}/{}",
                            r.obstruction_dim, r.extension_preimages, r.extension_targets
                        ),
                    ))
                },
            )
        })
        .collect()
}

/// Degree bound of the Laurent search.
pub const OBSTRUCTION_BOUND: u32 = 8;

pub fn obstruction_suite(params: &SuiteParams) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for p in params.primes_or(&[2, 3]) {
        out.push(run_check(
            "obstruction",
            json!({"p": p, "bound": OBSTRUCTION_BOUND}),
            "γ^p − γ = t^{−1} has no Laurent solution of degree ≤ 8 but has one in F_p[t^{±1}][γ]/(γ^p − γ − t^{−1})",
            || {
                let r = etale_obstruction_demo(p, OBSTRUCTION_BOUND)?;
                let lr = FormRing::new(PrimeField::new(p)?, 1)?.with_laurent(&[1])?;
                let cert = c_minus_one_surjectivity(&LogForm::monomial(lr, 1, &[-1])?)?;
                let ok = !r.laurent_solution
                    && r.exhaustive_solution == Some(false)
                    && r.extension_root
                    && r.control_root.is_some()
                    && cert.verified
                    && cert.base_root.is_none();
                let laurent = if r.laurent_solution || r.exhaustive_solution == Some(true) { "Laurent preimage found" } else { "no Laurent preimage" };
                let extension = if cert.verified && r.extension_root { "extension preimage found" } else { "no extension preimage" };
                Ok(Finding::new(ok, vec![r.exhaustive_candidates.unwrap_or(0) as usize], format!("{laurent}; {extension}")))
            },
        )?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_runs_pass() {
        let params = SuiteParams { primes: Some(vec![2]), m: Some(2), n: Some(1) };
        for s in [cartier_suite, nu_suite, gysin_suite, purity_square_suite, purity_nu_suite, connecting_suite] {
            for o in s(&params).unwrap() {
                assert!(o.passed(), "{o:?}");
            }
        }
    }
}
