use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{split_off_dlog, GysinSetup, SetupInfo};
use crate::cartier::{cartier, zb_decomposition};
use crate::error::Result;
use crate::forms::LogForm;

/// One closed form, its splitting along `dlog T_z` and both paths around the square.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub eta: String,
    pub gamma: String,
    pub eta_prime: String,
    pub residue_then_cartier: String,
    pub cartier_then_residue: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareReport {
    pub setup: SetupInfo,
    /// Degree of the residue target; the closed forms checked have degree `n + 1`.
    pub n: usize,
    pub weights: usize,
    pub forms_checked: usize,
    pub mismatches: Vec<String>,
    /// `γ + η′ ∧ dlog T_z = η` for every form checked.
    pub decomposition_ok: bool,
    /// The first few forms with a nonzero residue.
    pub examples: Vec<Decomposition>,
    pub square_ok: bool,
}

const EXAMPLES: usize = 4;

/// Outcome for one form: `(decomposition holds, both paths, split)`.
fn square_for(setup: &GysinSetup, eta: &LogForm) -> Result<(bool, LogForm, LogForm, LogForm, LogForm)> {
    let z = setup.z();
    let (gamma, rest) = split_off_dlog(eta, setup.position())?;
    let dlog = LogForm::dlog(setup.ring(), z)?;
    let split_ok = gamma.add(&rest.wedge(&dlog)?)? == *eta;
    let res_c = cartier(eta)?.residue(z)?;
    let c_res = cartier(&eta.residue(z)?)?;
    Ok((split_ok, res_c, c_res, gamma, rest))
}

/// Checks `res ∘ C = C ∘ res` on a basis of `ZΩ^{n+1}(log(D+Z))` at every
/// weight of the window.
pub fn commuting_square(setup: &GysinSetup, n: usize) -> Result<SquareReport> {
    let ring = setup.ring();
    let weights = ring.window_weights();
    let per_weight: Vec<Result<Vec<(LogForm, bool, LogForm, LogForm, LogForm, LogForm)>>> = weights
        .par_iter()
        .map(|w| {
            zb_decomposition(ring, n + 1, *w)
                .z_forms()
                .into_iter()
                .map(|eta| {
                    let (ok, rc, cr, g, e) = square_for(setup, &eta)?;
                    Ok((eta, ok, rc, cr, g, e))
                })
                .collect()
        })
        .collect();
    let mut forms_checked = 0;
    let mut mismatches = Vec::new();
    let mut decomposition_ok = true;
    let mut examples = Vec::new();
    for res in per_weight {
        for (eta, ok, rc, cr, g, e) in res? {
            forms_checked += 1;
            decomposition_ok &= ok;
            if rc != cr {
                mismatches.push(format!("{eta}: res∘C = {rc}, C∘res = {cr}"));
            }
            if examples.len() < EXAMPLES && !e.is_zero() {
                examples.push(Decomposition {
                    eta: eta.to_string(),
                    gamma: g.to_string(),
                    eta_prime: e.to_string(),
                    residue_then_cartier: cr.to_string(),
                    cartier_then_residue: rc.to_string(),
                });
            }
        }
    }
    let square_ok = mismatches.is_empty() && decomposition_ok;
    Ok(SquareReport {
        setup: setup.info(),
        n,
        weights: weights.len(),
        forms_checked,
        mismatches,
        decomposition_ok,
        examples,
        square_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::super::tests::setup;
    use super::*;

    #[test]
    fn dlog_wedge_and_frobenius_twist() {
        for p in [2, 3, 5] {
            let s = setup(p, 2, &[1, 2], 1, 2 * p as i32);
            let r = s.ring();
            let eta = LogForm::parse(r, "dlogT1^dlogT2").unwrap();
            let (_, rc, cr, _, _) = square_for(&s, &eta).unwrap();
            assert_eq!(rc.to_string(), "dlogT2");
            assert_eq!(rc, cr);
            let eta = LogForm::parse(r, &format!("T2^{p} dlogT1^dlogT2")).unwrap();
            let (ok, rc, cr, g, e) = square_for(&s, &eta).unwrap();
            assert!(ok && g.is_zero());
            // dlog T1 ∧ dlog T2 = −dlog T2 ∧ dlog T1
            assert_eq!(e, LogForm::parse(r, &format!("T2^{p} dlogT2")).unwrap().neg());
            assert_eq!(rc.to_string(), "T2 dlogT2");
            assert_eq!(rc, cr);
        }
    }

    #[test]
    fn forms_without_pole_go_to_zero() {
        let s = setup(3, 2, &[1, 2], 1, 6);
        let eta = LogForm::parse(s.ring(), "T1^3 dlogT1^dlogT2 + dT1^dlogT2").unwrap();
        let (_, rc, cr, _, _) = square_for(&s, &eta).unwrap();
        assert!(rc.is_zero() && cr.is_zero());
    }

    #[test]
    fn square_commutes_on_small_grid() {
        for p in [2, 3] {
            for n in 0..=1 {
                let s = setup(p, 2, &[1, 2], 1, 2 * p as i32);
                let r = commuting_square(&s, n).unwrap();
                assert!(r.square_ok, "{:?}", r.mismatches);
                assert!(r.forms_checked > 0);
            }
        }
    }
}
