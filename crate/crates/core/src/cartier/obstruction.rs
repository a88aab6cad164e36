use serde::{Deserialize, Serialize};

use super::artin_schreier::{artin_schreier_root_in_base, ArtinSchreierExtension};
use crate::error::{Error, Result};
use crate::forms::{FormRing, LogForm};
use crate::gf::PrimeField;

/// Outcome of searching for `γ` with `γ^p − γ = t^{-1}` among Laurent
/// polynomials `Σ_{|k| ≤ B} c_k t^k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub p: u32,
    pub bound: u32,
    /// Whether the linear solve found a Laurent root.
    pub laurent_solution: bool,
    /// Number of candidates enumerated, when the exhaustive search ran.
    pub exhaustive_candidates: Option<u64>,
    pub exhaustive_solution: Option<bool>,
    /// `γ^p = γ + t^{-1}` verified in `F_p[t, t^{-1}][γ]/(γ^p − γ − t^{-1})`.
    pub extension_root: bool,
    /// Root found for the control equation `γ^p − γ = t^p − t`.
    pub control_root: Option<String>,
    pub verdict: String,
}

/// Largest search space enumerated candidate by candidate.
pub const EXHAUSTIVE_LIMIT: u64 = 1 << 28;

/// Enumerates all `γ = Σ_{|k|≤B} c_k t^k` over F_p and counts the roots of
/// `γ^p − γ = target`. Returns `None` when the space exceeds [`EXHAUSTIVE_LIMIT`].
///
/// `target` holds coefficients of `t^{-pB} … t^{pB}`. The residual
/// `γ^p − γ − target` is updated incrementally as an odometer steps through
/// the coefficient vectors.
pub fn exhaustive_artin_schreier_search(p: u32, bound: u32, target: &[u8]) -> Result<Option<(u64, u64)>> {
    let field = PrimeField::new(p)?;
    let b = bound as i64;
    let width = (2 * p as i64 * b + 1) as usize;
    if target.len() != width {
        return Err(Error::DimensionMismatch { expected: width, found: target.len() });
    }
    let digits = (2 * b + 1) as u32;
    let Some(total) = (p as u64).checked_pow(digits).filter(|&t| t <= EXHAUSTIVE_LIMIT) else {
        return Ok(None);
    };
    let offset = p as i64 * b;
    // column of digit k: t^{p(k-B)} − t^{k-B}
    let cols: Vec<(usize, usize)> = (0..digits as i64)
        .map(|k| {
            let e = k - b;
            ((p as i64 * e + offset) as usize, (e + offset) as usize)
        })
        .collect();
    let mut residual: Vec<u8> = target.iter().map(|&x| field.neg(x)).collect();
    let mut nonzero = residual.iter().filter(|&&x| x != 0).count();
    let mut counter = vec![0u8; digits as usize];
    let mut roots = 0u64;
    let bump = |residual: &mut Vec<u8>, nonzero: &mut usize, idx: usize, delta: u8| {
        let old = residual[idx];
        let new = field.add(old, delta);
        residual[idx] = new;
        match (old == 0, new == 0) {
            (true, false) => *nonzero += 1,
            (false, true) => *nonzero -= 1,
            _ => {}
        }
    };
    for step in 0..total {
        if nonzero == 0 {
            roots += 1;
        }
        if step + 1 == total {
            break;
        }
        // increment the odometer; a wrapping digit subtracts (p-1) columns
        let mut d = 0;
        loop {
            let (hi, lo) = cols[d];
            if counter[d] + 1 < p as u8 {
                counter[d] += 1;
                if hi != lo {
                    bump(&mut residual, &mut nonzero, hi, 1);
                    bump(&mut residual, &mut nonzero, lo, field.neg(1));
                }
                break;
            }
            counter[d] = 0;
            if hi != lo {
                let back = field.reduce(-(p as i64 - 1));
                bump(&mut residual, &mut nonzero, hi, back);
                bump(&mut residual, &mut nonzero, lo, field.neg(back));
            }
            d += 1;
        }
    }
    Ok(Some((total, roots)))
}

/// Shows that `γ^p − γ = t^{-1}` has no Laurent-polynomial solution of
/// degree at most `B` in absolute value, while the Artin–Schreier extension
/// supplies a root.
pub fn etale_obstruction_demo(p: u32, bound: u32) -> Result<ObstructionReport> {
    let field = PrimeField::new(p)?;
    let b = bound as i32;
    let ring = FormRing::new(field, 1)?.with_laurent(&[1])?.with_radius(p as i32 * b)?;
    let t_inv = LogForm::monomial(ring, 1, &[-1])?;
    // restrict unknowns to |k| ≤ B: the window is exactly p·B, so that is the
    // set of k with p·k inside the window
    let laurent_solution = artin_schreier_root_in_base(&t_inv)?.is_some();
    let width = (2 * p as i64 * bound as i64 + 1) as usize;
    let mut target = vec![0u8; width];
    target[(p as i64 * bound as i64 - 1) as usize] = 1;
    let exhaustive = exhaustive_artin_schreier_search(p, bound, &target)?;
    let ext = ArtinSchreierExtension::new(t_inv)?;
    let extension_root = ext.defining_relation_holds()?;
    let control = LogForm::monomial(ring, 1, &[p as i32])?.sub(&LogForm::monomial(ring, 1, &[1])?)?;
    let control_root = artin_schreier_root_in_base(&control)?.map(|g| g.to_string());
    let exhaustive_solution = exhaustive.map(|(_, roots)| roots > 0);
    let no_solution = !laurent_solution && exhaustive_solution != Some(true);
    let verdict = match (no_solution, extension_root) {
        (true, true) => "no Laurent solution; extension solution exists",
        (true, false) => "no Laurent solution; extension check failed",
        (false, _) => "Laurent solution found",
    };
    Ok(ObstructionReport {
        p,
        bound,
        laurent_solution,
        exhaustive_candidates: exhaustive.map(|(n, _)| n),
        exhaustive_solution,
        extension_root,
        control_root,
        verdict: verdict.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn control_equation_has_polynomial_root() {
        let r = etale_obstruction_demo(2, 3).unwrap();
        assert_eq!(r.control_root.as_deref(), Some("T1"));
        assert!(!r.laurent_solution);
        assert_eq!(r.exhaustive_solution, Some(false));
    }

    #[test]
    fn exhaustive_search_counts_constant_roots() {
        // γ^p − γ = 0 has exactly the p constant roots
        for p in [2, 3] {
            let width = (2 * p * 2 + 1) as usize;
            let (_, roots) = exhaustive_artin_schreier_search(p, 2, &vec![0; width]).unwrap().unwrap();
            assert_eq!(roots, p as u64);
        }
    }
}
