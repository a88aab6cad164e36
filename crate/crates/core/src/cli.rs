//! Run configuration, command execution and report rendering for the
//! `logpurity` binary.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::cech::{cech_cohomology, BoxPolicy, CohomologyReport, SheafSpec, Space};
use crate::error::{Error, Result};
use crate::gf::PrimeField;
use crate::suites::{run_all, CheckOutcome, Suite, SuiteParams};

/// Version of the JSON layout described by `schema/report.schema.json`.
pub const SCHEMA_VERSION: u32 = 1;

pub const MAX_PRIME: u32 = 251;
pub const MAX_M: usize = 6;
pub const MAX_RADIUS: i32 = 64;
/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "LOGPURITY_THREADS";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Task {
    Cohomology { p: u32, spec: SheafSpec },
    /// `suite: None` runs every suite.
    Verify { suite: Option<String>, params: SuiteParams },
    /// Projective table: `Ω^j(l)` on `P^n` for every prime, `1 ≤ n ≤ max_n`, `j ≤ n`, listed twist.
    Report { primes: Vec<u32>, max_n: usize, twists: Vec<i32> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub task: Task,
    /// Starting weight-box radius; the default depends on the sheaf.
    pub radius: Option<i32>,
    /// Stabilization cap on the box radius.
    pub cap: i32,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub threads: Option<usize>,
    /// Keep measured times in reports; otherwise `elapsed_ms` is null.
    pub timings: bool,
}

impl RunConfig {
    pub fn new(task: Task) -> Self {
        RunConfig { task, radius: None, cap: BoxPolicy::default().cap, output: None, format: Format::Json, threads: None, timings: false }
    }

    pub fn validate(&self) -> Result<()> {
        let check_prime = |p: u32| if p > MAX_PRIME { Err(Error::InvalidPrime(p)) } else { PrimeField::new(p).map(|_| ()) };
        if let Some(r) = self.radius {
            if !(1..=MAX_RADIUS).contains(&r) {
                return Err(Error::invalid(format!("box radius {r} outside 1..={MAX_RADIUS}")));
            }
        }
        if !(2..=MAX_RADIUS + 1).contains(&self.cap) {
            return Err(Error::invalid(format!("stabilization cap {} outside 2..={}", self.cap, MAX_RADIUS + 1)));
        }
        if self.threads == Some(0) {
            return Err(Error::invalid("thread count must be positive"));
        }
        match &self.task {
            Task::Cohomology { p, spec } => {
                check_prime(*p)?;
                spec.validate()
            }
            Task::Verify { suite, params } => {
                if let Some(s) = suite {
                    s.parse::<Suite>()?;
                }
                for &p in params.primes.iter().flatten() {
                    check_prime(p)?;
                }
                if params.m.is_some_and(|m| m == 0 || m > MAX_M) {
                    return Err(Error::invalid(format!("m must lie in 1..={MAX_M}")));
                }
                if params.n.is_some_and(|n| n > MAX_M) {
                    return Err(Error::invalid(format!("n must lie in 0..={MAX_M}")));
                }
                Ok(())
            }
            Task::Report { primes, max_n, .. } => {
                for &p in primes {
                    check_prime(p)?;
                }
                if *max_n > MAX_M {
                    return Err(Error::invalid(format!("n must lie in 0..={MAX_M}")));
                }
                Ok(())
            }
        }
    }

    fn policy(&self) -> BoxPolicy {
        BoxPolicy { start: self.radius, cap: self.cap }
    }
}

/// One element of the `report` array.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub schema_version: u32,
    #[serde(flatten)]
    pub report: CohomologyReport,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Output {
    Cohomology(CohomologyReport),
    Checks(Vec<CheckOutcome>),
    Report(Vec<ReportEntry>),
}

impl Output {
    /// False iff some check failed.
    pub fn success(&self) -> bool {
        match self {
            Output::Checks(cs) => cs.iter().all(CheckOutcome::passed),
            _ => true,
        }
    }
}

/// Runs the task on the current rayon pool.
pub fn execute(config: &RunConfig) -> Result<Output> {
    config.validate()?;
    let keep = config.timings;
    match &config.task {
        Task::Cohomology { p, spec } => {
            let start = std::time::Instant::now();
            let mut r = cech_cohomology(PrimeField::new(*p)?, spec, config.policy())?;
            r.elapsed_ms = keep.then(|| start.elapsed().as_millis() as u64);
            Ok(Output::Cohomology(r))
        }
        Task::Verify { suite, params } => {
            let mut checks = match suite {
                Some(s) => s.parse::<Suite>()?.run(params)?,
                None => run_all(params)?,
            };
            if !keep {
                for c in &mut checks {
                    c.elapsed_ms = None;
                }
            }
            Ok(Output::Checks(checks))
        }
        Task::Report { primes, max_n, twists } => {
            let mut out = Vec::new();
            for &p in primes {
                let field = PrimeField::new(p)?;
                for n in 1..=*max_n {
                    for j in 0..=n {
                        for &l in twists {
                            let start = std::time::Instant::now();
                            let mut r = cech_cohomology(field, &SheafSpec::projective(n, j, &[], l), config.policy())?;
                            r.elapsed_ms = keep.then(|| start.elapsed().as_millis() as u64);
                            out.push(ReportEntry { schema_version: SCHEMA_VERSION, report: r });
                        }
                    }
                }
            }
            Ok(Output::Report(out))
        }
    }
}

fn compact_dims(dims: &[usize]) -> String {
    format!("[{}]", dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","))
}

fn space_name(spec: &SheafSpec) -> String {
    match spec.space {
        Space::Projective { n } => format!("P{n}"),
        Space::Blowup { m, c } => format!("blowup(m={m},c={c})"),
    }
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?).map_err(|e| Error::Io(e.to_string()))
}

fn cohomology_rows(p: u32, r: &CohomologyReport) -> Vec<Vec<String>> {
    r.dims
        .iter()
        .enumerate()
        .map(|(i, d)| {
            vec![
                space_name(&r.spec),
                p.to_string(),
                r.spec.j.to_string(),
                r.spec.twist.to_string(),
                compact_dims(&r.spec.log),
                i.to_string(),
                d.to_string(),
                r.truncated_degrees.contains(&i).to_string(),
            ]
        })
        .collect()
}

const COHOMOLOGY_COLUMNS: [&str; 8] = ["space", "p", "j", "twist", "log", "degree", "dim", "truncated"];
/// Columns of `verify --format csv`.
pub const CHECK_COLUMNS: [&str; 5] = ["check", "params", "verdict", "dims", "elapsed_ms"];

fn cohomology_text(r: &CohomologyReport) -> String {
    let mut s = format!(
        "{} Ω^{}{}({}) over F_{}: box radius {} ({} weights){}\n",
        space_name(&r.spec),
        r.spec.j,
        if r.spec.log.is_empty() { String::new() } else { format!("(log {:?})", r.spec.log) },
        r.spec.twist,
        r.prime,
        r.weight_box.radius,
        r.weight_box.weights,
        if r.stabilized { ", stabilized" } else { "" },
    );
    for (i, d) in r.dims.iter().enumerate() {
        let note = if r.truncated_degrees.contains(&i) { " (inside the box)" } else { "" };
        let _ = writeln!(s, "  H^{i} = {d}{note}");
    }
    s
}

/// Renders the output. JSON ends with a newline; equal outputs render to equal bytes.
pub fn render(out: &Output, format: Format) -> Result<String> {
    Ok(match (out, format) {
        (Output::Cohomology(r), Format::Json) => to_json(r)?,
        (Output::Checks(cs), Format::Json) => to_json(cs)?,
        (Output::Report(rs), Format::Json) => to_json(rs)?,
        (Output::Cohomology(r), Format::Csv) => csv_text(&COHOMOLOGY_COLUMNS, cohomology_rows(r.prime, r))?,
        (Output::Report(rs), Format::Csv) => {
            csv_text(&COHOMOLOGY_COLUMNS, rs.iter().flat_map(|e| cohomology_rows(e.report.prime, &e.report)).collect())?
        }
        (Output::Checks(cs), Format::Csv) => csv_text(
            &CHECK_COLUMNS,
            cs.iter()
                .map(|c| {
                    vec![
                        c.name.clone(),
                        c.params_text(),
                        c.verdict.to_string(),
                        compact_dims(&c.dims),
                        c.elapsed_ms.map(|t| t.to_string()).unwrap_or_default(),
                    ]
                })
                .collect(),
        )?,
        (Output::Cohomology(r), Format::Text) => cohomology_text(r),
        (Output::Report(rs), Format::Text) => rs.iter().map(|e| cohomology_text(&e.report)).collect(),
        (Output::Checks(cs), Format::Text) => {
            let mut s = String::new();
            for c in cs {
                let time = c.elapsed_ms.map(|t| format!(" {t} ms")).unwrap_or_default();
                let detail = if c.detail.is_empty() { String::new() } else { format!(" ({})", c.detail) };
                let _ = writeln!(s, "{} {} {} dims={}{time}{detail}", c.name, c.params_text(), c.verdict, compact_dims(&c.dims));
            }
            let failed = cs.iter().filter(|c| !c.passed()).count();
            let _ = writeln!(s, "{} checks, {} passed, {} failed", cs.len(), cs.len() - failed, failed);
            s
        }
    })
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Worker count: explicit value, else the environment variable, else rayon's default.
pub fn thread_count(explicit: Option<usize>) -> Result<Option<usize>> {
    if explicit.is_some() {
        return Ok(explicit);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::invalid(format!("{THREADS_ENV}={v} is not a positive integer"))),
        },
        Err(_) => Ok(None),
    }
}

/// Writes `text` to the configured path, or stdout.
pub fn emit(config: &RunConfig, text: &str) -> Result<()> {
    match &config.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes()).map_err(|e| Error::Io(e.to_string()))
        }
    }
}

/// Process exit code for an error: 2 for resource caps, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ResourceLimit(_) => 2,
        _ => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips() {
        let mut c = RunConfig::new(Task::Cohomology { p: 3, spec: SheafSpec::projective(2, 1, &[0], -1) });
        c.radius = Some(5);
        c.format = Format::Csv;
        c.output = Some("out.csv".into());
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        let v = RunConfig::new(Task::Verify { suite: Some("nu".into()), params: SuiteParams { primes: Some(vec![2]), m: Some(2), n: None } });
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn bounds() {
        let cfg = |p| RunConfig::new(Task::Cohomology { p, spec: SheafSpec::projective(1, 0, &[], 0) });
        assert!(cfg(251).validate().is_ok());
        assert!(cfg(257).validate().is_err());
        assert!(cfg(4).validate().is_err());
        let mut c = cfg(2);
        c.radius = Some(65);
        assert!(c.validate().is_err());
        let v = RunConfig::new(Task::Verify { suite: None, params: SuiteParams { primes: None, m: Some(7), n: None } });
        assert!(v.validate().is_err());
        let v = RunConfig::new(Task::Verify { suite: Some("bogus".into()), params: SuiteParams::default() });
        assert!(v.validate().is_err());
    }

    #[test]
    fn empty_report_is_empty_array() {
        let c = RunConfig::new(Task::Report { primes: vec![2, 3], max_n: 0, twists: vec![0] });
        let out = execute(&c).unwrap();
        assert_eq!(render(&out, Format::Json).unwrap(), "[]\n");
    }

    #[test]
    fn projective_line_dims() {
        let c = RunConfig::new(Task::Cohomology { p: 2, spec: SheafSpec::projective(1, 0, &[], -2) });
        let Output::Cohomology(r) = execute(&c).unwrap() else { panic!() };
        assert_eq!(r.dims, vec![0, 1]);
        assert_eq!(r.elapsed_ms, None);
        let text = render(&Output::Cohomology(r), Format::Csv).unwrap();
        assert_eq!(text.lines().next().unwrap(), "space,p,j,twist,log,degree,dim,truncated");
        assert_eq!(text.lines().nth(2).unwrap(), "P1,2,0,-2,[],1,1,false");
    }

    #[test]
    fn resource_cap_maps_to_two() {
        let mut c = RunConfig::new(Task::Cohomology { p: 2, spec: SheafSpec::projective(1, 0, &[], 0) });
        c.radius = Some(10);
        c.cap = 5;
        let e = execute(&c).unwrap_err();
        assert_eq!(exit_code(&e), 2);
    }
}
