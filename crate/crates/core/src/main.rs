use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use logpurity::cech::SheafSpec;
use logpurity::cli::{emit, execute, exit_code, render, thread_count, Format, RunConfig, Task};
use logpurity::suites::SuiteParams;
use logpurity::Error;

#[derive(Parser, Debug)]
#[command(name = "logpurity", version, about = "Log differential forms in characteristic p: cohomology, Cartier operator and purity checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
    /// Worker threads (default: $LOGPURITY_THREADS, else all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Record elapsed times (otherwise `elapsed_ms` is null and output is reproducible).
    #[arg(long)]
    timings: bool,
    /// Starting radius of the weight box.
    #[arg(long)]
    radius: Option<i32>,
    /// Largest radius tried before giving up with exit code 2.
    #[arg(long, default_value_t = 64)]
    cap: i32,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Čech cohomology of a twisted log-form sheaf on P^n or on a blowup of A^m.
    Cohomology {
        /// `P0` … `P6`, or `blowup`.
        #[arg(long)]
        space: String,
        /// Use the structure sheaf (form degree 0).
        #[arg(long, value_parser = ["O"], conflicts_with = "form_degree")]
        sheaf: Option<String>,
        /// Form degree j of Ω^j.
        #[arg(long, short = 'j')]
        form_degree: Option<usize>,
        #[arg(long, short = 'l', default_value_t = 0, allow_hyphen_values = true)]
        twist: i32,
        /// Homogeneous coordinates `X_s` whose hyperplanes are log poles.
        #[arg(long, value_delimiter = ',')]
        log: Vec<usize>,
        /// Ambient dimension of the blowup.
        #[arg(long)]
        m: Option<usize>,
        /// Codimension of the blown-up center.
        #[arg(long)]
        c: Option<usize>,
        /// Characteristic of the base field.
        #[arg(short, default_value_t = 2)]
        p: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Run a verification suite (or `all`), one line per check.
    Verify {
        /// Suite name, or `all`.
        suite: String,
        /// Restrict to these primes (repeatable or comma separated).
        #[arg(short, value_delimiter = ',')]
        p: Vec<u32>,
        /// Restrict to rings with this many variables.
        #[arg(short)]
        m: Option<usize>,
        /// Restrict to this form degree or projective dimension.
        #[arg(short)]
        n: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Projective cohomology table for a sweep of primes, dimensions and twists.
    Report {
        #[arg(short, value_delimiter = ',', default_values_t = [2, 3])]
        p: Vec<u32>,
        /// Largest projective dimension; 0 gives an empty sweep.
        #[arg(long, default_value_t = 2)]
        max_n: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0], allow_hyphen_values = true)]
        twists: Vec<i32>,
        #[command(flatten)]
        common: Common,
    },
}

fn config(cmd: Command) -> Result<RunConfig, Error> {
    let (task, common) = match cmd {
        Command::Cohomology { space, sheaf, form_degree, twist, log, m, c, p, common } => {
            let j = if sheaf.is_some() { 0 } else { form_degree.unwrap_or(0) };
            let spec = if space == "blowup" {
                let (Some(m), Some(c)) = (m, c) else {
                    return Err(Error::invalid("blowup needs --m and --c"));
                };
                let mut s = SheafSpec::blowup(m, c, j);
                s.log = log;
                s.twist = twist;
                s
            } else {
                let n = space
                    .strip_prefix('P')
                    .and_then(|d| d.parse::<usize>().ok())
                    .ok_or_else(|| Error::invalid(format!("unknown space '{space}' (expected P0..P6 or blowup)")))?;
                if m.is_some() || c.is_some() {
                    return Err(Error::invalid("--m and --c only apply to the blowup"));
                }
                SheafSpec::projective(n, j, &log, twist)
            };
            (Task::Cohomology { p, spec }, common)
        }
        Command::Verify { suite, p, m, n, common } => {
            let params = SuiteParams { primes: (!p.is_empty()).then_some(p), m, n };
            let suite = (suite != "all").then_some(suite);
            (Task::Verify { suite, params }, common)
        }
        Command::Report { p, max_n, twists, common } => (Task::Report { primes: p, max_n, twists }, common),
    };
    let mut cfg = RunConfig::new(task);
    cfg.radius = common.radius;
    cfg.cap = common.cap;
    cfg.output = common.output;
    cfg.format = common.format;
    cfg.threads = thread_count(common.threads)?;
    cfg.timings = common.timings;
    cfg.validate()?;
    Ok(cfg)
}

fn run(cmd: Command) -> Result<bool, Error> {
    let cfg = config(cmd)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Error::internal(e.to_string()))?;
    }
    let out = execute(&cfg)?;
    emit(&cfg, &render(&out, cfg.format)?)?;
    Ok(out.success())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("logpurity: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
