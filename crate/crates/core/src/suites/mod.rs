//! Verification suites: each runs one family of checks over a parameter grid
//! and returns one [`CheckOutcome`] per grid point.

mod checks;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub use checks::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

/// Result of one check at one parameter point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub params: Value,
    /// The mathematical statement exercised.
    pub statement: String,
    pub verdict: Verdict,
    pub dims: Vec<usize>,
    pub detail: String,
    pub elapsed_ms: Option<u64>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// `key=value` pairs joined by `;`, keys sorted.
    pub fn params_text(&self) -> String {
        match &self.params {
            Value::Object(map) => map.iter().map(|(k, v)| format!("{k}={}", compact(v))).collect::<Vec<_>>().join(";"),
            v => compact(v),
        }
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => format!("[{}]", items.iter().map(compact).collect::<Vec<_>>().join(",")),
        other => other.to_string(),
    }
}

/// What a check body reports: verdict, dimensions, free-form detail.
pub struct Finding {
    pub ok: bool,
    pub dims: Vec<usize>,
    pub detail: String,
}

impl Finding {
    pub fn new(ok: bool, dims: Vec<usize>, detail: impl Into<String>) -> Self {
        Finding { ok, dims, detail: detail.into() }
    }
}

/// Times `body` and wraps its finding. Resource errors propagate; other
/// errors become a failed check carrying the message.
pub fn run_check<F>(name: &str, params: Value, statement: &str, body: F) -> Result<CheckOutcome>
where
    F: FnOnce() -> Result<Finding>,
{
    let start = Instant::now();
    let (ok, dims, detail) = match body() {
        Ok(f) => (f.ok, f.dims, f.detail),
        Err(e @ Error::ResourceLimit(_)) => return Err(e),
        Err(e) => (false, Vec::new(), format!("error: {e}")),
    };
    Ok(CheckOutcome {
        name: name.to_string(),
        params,
        statement: statement.to_string(),
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        dims,
        detail,
        elapsed_ms: Some(start.elapsed().as_millis() as u64),
    })
}

/// Parameter restrictions for a suite run; `None` means the default grid.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteParams {
    pub primes: Option<Vec<u32>>,
    /// Number of affine variables (or `m` of a blowup).
    pub m: Option<usize>,
    /// Form degree for ring-level suites, dimension of `P^n` for projective ones.
    pub n: Option<usize>,
}

impl SuiteParams {
    pub(crate) fn primes_or(&self, default: &[u32]) -> Vec<u32> {
        self.primes.clone().unwrap_or_else(|| default.to_vec())
    }

    pub(crate) fn m_range(&self, lo: usize, hi: usize) -> Vec<usize> {
        match self.m {
            Some(m) => vec![m],
            None => (lo..=hi).collect(),
        }
    }

    pub(crate) fn n_range(&self, lo: usize, hi: usize) -> Vec<usize> {
        match self.n {
            Some(n) => vec![n],
            None => (lo..=hi).collect(),
        }
    }
}

macro_rules! suites {
    ($($variant:ident => $name:literal, $run:path;)*) => {
        /// The verification suites, in the order `verify all` runs them.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
        pub enum Suite {
            $($variant,)*
        }

        impl Suite {
            pub const ALL: &'static [Suite] = &[$(Suite::$variant,)*];

            pub fn name(self) -> &'static str {
                match self {
                    $(Suite::$variant => $name,)*
                }
            }

            pub fn run(self, params: &SuiteParams) -> Result<Vec<CheckOutcome>> {
                match self {
                    $(Suite::$variant => $run(params),)*
                }
            }
        }
    };
}

suites! {
    Cartier => "cartier", checks::cartier_suite;
    Nu => "nu", checks::nu_suite;
    Residue => "residue", checks::residue_suite;
    Fundamental => "fundamental", checks::fundamental_suite;
    Euler => "euler", checks::euler_suite;
    Pullback => "pullback", checks::pullback_suite;
    Filtration => "filtration", checks::filtration_suite;
    Projective => "projective", checks::projective_suite;
    Twist => "twist", checks::twist_suite;
    LogVanishing => "log-vanishing", checks::log_vanishing_suite;
    Models => "models", checks::models_suite;
    Generators => "generators", checks::generators_suite;
    Connecting => "connecting", checks::connecting_suite;
    Blowup => "blowup", checks::blowup_suite;
    Formal => "formal", checks::formal_suite;
    Gysin => "gysin", checks::gysin_suite;
    Iterated => "iterated", checks::iterated_suite;
    PuritySquare => "purity-square", checks::purity_square_suite;
    PurityNu => "purity-nu", checks::purity_nu_suite;
    Obstruction => "obstruction", checks::obstruction_suite;
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .iter()
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown suite '{s}'")))
    }
}

/// Runs every suite in order.
pub fn run_all(params: &SuiteParams) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for s in Suite::ALL {
        out.extend(s.run(params)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), *s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn params_render_sorted() {
        let o = run_check("x", serde_json::json!({"p": 3, "m": 2, "log": [1, 2]}), "s", || Ok(Finding::new(true, vec![], ""))).unwrap();
        assert_eq!(o.params_text(), "log=[1,2];m=2;p=3");
        assert!(o.passed());
    }

    #[test]
    fn errors_become_failures() {
        let o = run_check("x", Value::Null, "s", || Err(Error::invalid("bad"))).unwrap();
        assert_eq!(o.verdict, Verdict::Fail);
        assert!(run_check("x", Value::Null, "s", || Err(Error::ResourceLimit("cap".into()))).is_err());
    }
}
