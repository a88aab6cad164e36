use proptest::prelude::*;

use logpurity::cartier::{cartier, inverse_cartier};
use logpurity::cech::{cech_cohomology, BoxPolicy, SheafSpec};
use logpurity::cli::{Format, RunConfig, Task};
use logpurity::forms::{FormRing, GenSet, LogForm, Multidegree, WeightSlice};
use logpurity::gf::{FpMatrix, PrimeField};
use logpurity::suites::SuiteParams;

fn ring(p: u32, m: usize, log_bits: u32) -> FormRing {
    let log: Vec<u8> = (0..m).filter(|k| log_bits >> k & 1 == 1).map(|k| k as u8 + 1).collect();
    FormRing::new(PrimeField::new(p).unwrap(), m).unwrap().with_log(&log).unwrap().with_radius(2 * p as i32).unwrap()
}

/// Sum of random ambient terms `c T^w dlog_I` of one degree; terms that are
/// not sections of the ring are dropped.
fn form(r: FormRing, degree: usize, terms: &[(i64, [i32; 3], u32)], max_exp: i32) -> LogForm {
    let m = r.nvars();
    let mut out = LogForm::zero(r, degree);
    let sets = GenSet::subsets(r.all_mask(), degree);
    for &(c, w, pick) in terms {
        let w: Vec<i32> = w[..m].iter().map(|x| x.rem_euclid(max_exp + 1)).collect();
        let gens = sets[pick as usize % sets.len()];
        if let Ok(t) = LogForm::from_ambient(r, c, Multidegree::from_slice(&w), gens) {
            out = out.add(&t).unwrap();
        }
    }
    out
}

fn ring_strategy() -> impl Strategy<Value = FormRing> {
    (prop::sample::select(vec![2u32, 3, 5]), 1usize..=3, 0u32..8).prop_map(|(p, m, bits)| ring(p, m, bits))
}

fn terms() -> impl Strategy<Value = Vec<(i64, [i32; 3], u32)>> {
    prop::collection::vec((-4i64..5, prop::array::uniform3(0i32..16), 0u32..64), 0..6)
}

/// `χ(O(d))` on `P^n`.
fn chi_line(n: i64, d: i64) -> i64 {
    let mut num = 1i64;
    let mut den = 1i64;
    for k in 1..=n {
        num *= d + k;
        den *= k;
    }
    num / den
}

fn choose(n: i64, k: i64) -> i64 {
    if k < 0 || k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `χ(Ω^j(l))` from the Euler sequence, by induction on `j`.
fn chi_forms(n: i64, j: i64, l: i64) -> i64 {
    if j == 0 {
        return chi_line(n, l);
    }
    choose(n + 1, j) * chi_line(n, l - j) - chi_forms(n, j - 1, l)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_round_trip(r in ring_strategy(), degree in 0usize..=3, ts in terms()) {
        prop_assume!(degree <= r.nvars());
        let f = form(r, degree, &ts, 2 * r.p() as i32);
        let text = f.to_string();
        prop_assert_eq!(LogForm::parse_with_degree(r, &text, degree).unwrap(), f);
    }

    #[test]
    fn d_squared_is_zero(r in ring_strategy(), degree in 0usize..=2, ts in terms()) {
        prop_assume!(degree <= r.nvars());
        let f = form(r, degree, &ts, 2 * r.p() as i32);
        prop_assert!(f.differential().differential().is_zero());
    }

    #[test]
    fn leibniz(r in ring_strategy(), a in terms(), b in terms(), da in 0usize..=1, db in 0usize..=1) {
        prop_assume!(da + db < r.nvars());
        let half = r.p() as i32;
        let (x, y) = (form(r, da, &a, half), form(r, db, &b, half));
        let lhs = x.wedge(&y).unwrap().differential();
        let sign = if da % 2 == 0 { 1 } else { -1 };
        let rhs = x.differential().wedge(&y).unwrap().add(&x.wedge(&y.differential()).unwrap().scale(sign)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn cartier_kills_exact_forms(r in ring_strategy(), degree in 0usize..=2, ts in terms()) {
        prop_assume!(degree < r.nvars());
        let f = form(r, degree, &ts, 2 * r.p() as i32);
        prop_assert!(cartier(&f.differential()).unwrap().is_zero());
    }

    #[test]
    fn cartier_inverts_inverse_cartier(r in ring_strategy(), degree in 0usize..=3, ts in terms()) {
        prop_assume!(degree <= r.nvars());
        let eta = form(r, degree, &ts, 2);
        let lifted = inverse_cartier(&eta).unwrap();
        prop_assert!(lifted.is_closed());
        prop_assert_eq!(cartier(&lifted).unwrap(), eta);
    }

    #[test]
    fn cartier_is_frobenius_semilinear(r in ring_strategy(), degree in 0usize..=2, ts in terms(), a in prop::array::uniform3(0i32..2)) {
        prop_assume!(degree <= r.nvars());
        let p = r.p() as i32;
        let m = r.nvars();
        // closed forms: p-th powers times dlogs, plus an exact part
        let base = inverse_cartier(&form(r, degree, &ts, 1)).unwrap();
        let f = LogForm::monomial(r, 1, &a[..m]).unwrap();
        let fp = LogForm::monomial(r, 1, &a[..m].iter().map(|x| x * p).collect::<Vec<_>>()).unwrap();
        let lhs = cartier(&fp.wedge(&base).unwrap()).unwrap();
        prop_assert_eq!(lhs, f.wedge(&cartier(&base).unwrap()).unwrap());
    }

    #[test]
    fn slice_coordinates_round_trip(r in ring_strategy(), degree in 0usize..=3, w in prop::array::uniform3(0i32..6), seed in prop::collection::vec(0u8..5, 8)) {
        prop_assume!(degree <= r.nvars());
        let s = WeightSlice::new(r, degree, Multidegree::from_slice(&w[..r.nvars()]));
        let v: Vec<u8> = (0..s.dim()).map(|k| seed[k % seed.len()] % r.p() as u8).collect();
        prop_assert_eq!(s.coords(&s.form_from_coords(&v)).unwrap(), v);
    }

    #[test]
    fn rank_nullity(p in prop::sample::select(vec![2u32, 3, 5, 7]), rows in 1usize..7, cols in 1usize..7, entries in prop::collection::vec(-10i64..10, 49)) {
        let field = PrimeField::new(p).unwrap();
        let data: Vec<Vec<i64>> = (0..rows).map(|r| entries[r * 7..r * 7 + cols].to_vec()).collect();
        let a = FpMatrix::from_rows(field, &data).unwrap();
        let kernel = a.kernel_basis();
        prop_assert_eq!(a.rank() + kernel.len(), cols);
        prop_assert_eq!(a.rank(), a.transpose().rank());
        for k in &kernel {
            prop_assert!(a.mul_vec(k).unwrap().iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn euler_characteristic(p in prop::sample::select(vec![2u32, 3, 5]), n in 1usize..=3, j in 0usize..=3, l in -3i32..=3) {
        prop_assume!(j <= n);
        let r = cech_cohomology(PrimeField::new(p).unwrap(), &SheafSpec::projective(n, j, &[], l), BoxPolicy::default()).unwrap();
        let chi: i64 = r.dims.iter().enumerate().map(|(i, &d)| if i % 2 == 0 { d as i64 } else { -(d as i64) }).sum();
        prop_assert_eq!(chi, chi_forms(n as i64, j as i64, l as i64));
    }

    #[test]
    fn config_round_trip(p in 2u32..252, m in prop::option::of(1usize..=6), n in prop::option::of(0usize..=6), radius in prop::option::of(1i32..=64), timings in any::<bool>(), fmt in 0usize..3) {
        let mut c = RunConfig::new(Task::Verify { suite: Some("gysin".into()), params: SuiteParams { primes: Some(vec![p]), m, n } });
        c.radius = radius;
        c.timings = timings;
        c.format = [Format::Json, Format::Csv, Format::Text][fmt];
        let text = serde_json::to_string(&c).unwrap();
        prop_assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), c);
    }
}
