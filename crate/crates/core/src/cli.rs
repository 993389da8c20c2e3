//! Command-line front end. The binary is a thin wrapper around [`run`].

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::ensembles::{ginibre_with, GENERATOR_ID};
use crate::error::{Error, Result};
use crate::forms::EntrywiseForm;
use crate::matrix::singular_values;
use crate::ptrace::{search_counterexample, Question, SearchConfig, SearchResult};
use crate::report::{to_json_string, write_atomic, REPORT_SCHEMA, TOOL_VERSION};
use crate::suite::{
    reproduce_fan_counterexample, run_check, trial_stream, von_neumann_extremal, CheckReport, Factorization,
    FanCounterexample, InequalityId, KSelect, SuiteConfig, DEFAULT_TOLERANCE,
};

/// Environment variable that replaces the default seed.
pub const SEED_ENV: &str = "SVINEQ_SEED";

const DEFAULT_SEED: u64 = 0;

/// Exit status: the run completed and nothing was violated.
pub const EXIT_OK: i32 = 0;
/// Exit status: an error occurred, including usage errors.
pub const EXIT_ERROR: i32 = 1;
/// Exit status: violations or counterexample candidates were found.
pub const EXIT_VIOLATION: i32 = 2;

fn ineq_help() -> String {
    let mut s = String::from("Inequality ids:\n");
    for id in InequalityId::ALL {
        let _ = writeln!(s, "  {:<16} {}", id.as_str(), id.statement());
    }
    s.push_str("  all              every checker above, with ahj in both factorization modes\n");
    let _ = write!(
        s,
        "\nExit status: 0 = no violations, 2 = violations or counterexample found, 1 = error.\n\
         The default seed is {DEFAULT_SEED}, overridable through {SEED_ENV}."
    );
    s
}

#[derive(Debug, Parser)]
#[command(name = "svineq", version, about = "Randomized checks of singular value inequalities for Hadamard-type products", after_help = ineq_help())]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run randomized inequality checkers.
    Check(CheckArgs),
    /// Verify the rank-one equality case of the trace inequality on random matrices.
    Extremal(ExtremalArgs),
    /// Reproduce a fixed construction.
    Repro(ReproArgs),
    /// Search for counterexamples to one partial-trace question.
    Ptrace(PtraceArgs),
    /// Sweep the partial-trace counterexample search over both questions and a range of n.
    Search(SearchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IneqSelect {
    All,
    One(InequalityId),
}

impl FromStr for IneqSelect {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "all" {
            Ok(Self::All)
        } else {
            s.parse().map(Self::One)
        }
    }
}

impl std::fmt::Display for IneqSelect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::All => f.write_str("all"),
            Self::One(id) => id.fmt(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorizationArg {
    Given,
    Sqrt,
}

impl From<FactorizationArg> for Factorization {
    fn from(f: FactorizationArg) -> Self {
        match f {
            FactorizationArg::Given => Factorization::Given,
            FactorizationArg::Sqrt => Factorization::Sqrt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormArg {
    Hadamard,
    Fan,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Master seed [default: $SVINEQ_SEED, else 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the JSON report here (atomically).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// What to print on stdout.
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CheckArgs {
    /// Inequality id, or `all`.
    #[arg(long, value_parser = parse_ineq)]
    #[serde(serialize_with = "display")]
    pub ineq: IneqSelect,
    /// Dimension [default: every n in 2..=8].
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=64))]
    pub n: Option<u64>,
    /// `all` or a single k.
    #[arg(long, default_value = "all", value_parser = parse_k)]
    #[serde(serialize_with = "display")]
    pub k: KSelect,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE, value_parser = parse_tolerance)]
    pub tolerance: f64,
    /// How the factors X, Y are produced for `ahj` [default: both for `all`, else given].
    #[arg(long, value_enum)]
    pub factorization: Option<FactorizationArg>,
    /// Entrywise form used by `lemma31`.
    #[arg(long, value_enum, default_value = "hadamard")]
    pub form: FormArg,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExtremalArgs {
    /// Dimension [default: every n in 2..=8].
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=64))]
    pub n: Option<u64>,
    #[arg(long, default_value_t = 1_000)]
    pub trials: u64,
    /// Allowed `| |Tr(AB)| − σ_1(B) |`.
    #[arg(long, default_value_t = 1e-10, value_parser = parse_tolerance)]
    pub tolerance: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    /// Fan-product counterexample to the contraction lemma.
    FanCounterexample,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReproArgs {
    #[arg(value_enum)]
    pub what: Construction,
    /// Write the JSON report here (atomically).
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SearchOptions {
    /// `all` (worst k) or a single k.
    #[arg(long, default_value = "all", value_parser = parse_k)]
    #[serde(serialize_with = "display")]
    pub k: KSelect,
    /// Total margin evaluations per search.
    #[arg(long, default_value_t = 10_000)]
    pub budget: u64,
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    pub restarts: u64,
    /// Only search over commuting pairs.
    #[arg(long)]
    pub commuting: bool,
    /// Margins above this count as counterexample candidates.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE, value_parser = parse_tolerance)]
    pub tolerance: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PtraceArgs {
    #[arg(long, value_parser = parse_question)]
    #[serde(serialize_with = "display")]
    pub question: Question,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..=32))]
    pub n: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub search: SearchOptions,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SearchArgs {
    /// Largest n; the sweep covers 2..=max-n.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(2..=32))]
    pub max_n: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub search: SearchOptions,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

fn display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn parse_ineq(s: &str) -> std::result::Result<IneqSelect, String> {
    s.parse().map_err(|e: Error| {
        let ids: Vec<&str> = InequalityId::ALL.iter().map(|i| i.as_str()).collect();
        format!("{e}; expected one of: all, {}", ids.join(", "))
    })
}

fn parse_k(s: &str) -> std::result::Result<KSelect, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_question(s: &str) -> std::result::Result<Question, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_tolerance(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t.is_finite() && t >= 0.0 => Ok(t),
        _ => Err(format!("invalid tolerance {s:?} (expected a finite non-negative number)")),
    }
}

/// Where the seed came from, echoed into the report.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct SeedChoice {
    pub seed: u64,
    pub source: String,
}

/// Resolves the seed: the flag wins, then `$SVINEQ_SEED`, then the default.
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>) -> Result<SeedChoice> {
    if let Some(seed) = flag {
        return Ok(SeedChoice {
            seed,
            source: "flag".into(),
        });
    }
    match env {
        Some(v) => v
            .trim()
            .parse()
            .map(|seed| SeedChoice {
                seed,
                source: format!("env:{SEED_ENV}"),
            })
            .map_err(|_| Error::Parse(format!("{SEED_ENV}={v:?} is not an unsigned 64-bit integer"))),
        None => Ok(SeedChoice {
            seed: DEFAULT_SEED,
            source: "default".into(),
        }),
    }
}

/// Per-n result of the `extremal` command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalSummary {
    pub n: usize,
    pub trials: u64,
    /// Largest `| |Tr(AB)| − σ_1(B) |`.
    pub max_gap: f64,
    /// Largest deviation of `σ(A)` from `(1, 0, …, 0)`.
    pub max_rank_one_defect: f64,
    pub failures: u64,
}

/// Rank-one equality case on `trials` Ginibre matrices.
pub fn extremal_check(n: usize, trials: u64, seed: u64, tolerance: f64) -> Result<ExtremalSummary> {
    use rayon::prelude::*;
    let (gap, defect, failures) = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(f64, f64, u64)> {
            let b = ginibre_with(n, &mut trial_stream("extremal", n, seed, t).rng());
            let (a, value, sigma1) = von_neumann_extremal(&b)?;
            let gap = (value - sigma1).abs();
            let sa = singular_values(&a)?;
            let defect = sa
                .values()
                .iter()
                .enumerate()
                .map(|(i, s)| (s - if i == 0 { 1.0 } else { 0.0 }).abs())
                .fold(0.0, f64::max);
            Ok((gap, defect, u64::from(gap > tolerance)))
        })
        .try_reduce(|| (0.0, 0.0, 0), |x, y| Ok((x.0.max(y.0), x.1.max(y.1), x.2 + y.2)))?;
    Ok(ExtremalSummary {
        n,
        trials,
        max_gap: gap,
        max_rank_one_defect: defect,
        failures,
    })
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Results {
    Checks(Vec<CheckReport>),
    Extremal(Vec<ExtremalSummary>),
    Repro(Box<FanCounterexample>),
    Searches(Vec<SearchResult>),
}

/// The document written by every command.
#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub schema: String,
    pub tool_version: String,
    pub generator: String,
    pub command: String,
    pub config: serde_json::Value,
    pub seed: Option<SeedChoice>,
    pub exit_status: i32,
    pub results: Results,
    pub wall_time_seconds: f64,
}

impl ReportDocument {
    /// The JSON document with every wall-time field zeroed.
    pub fn body_json(&self) -> String {
        let mut d = self.clone();
        d.wall_time_seconds = 0.0;
        match &mut d.results {
            Results::Checks(v) => v.iter_mut().for_each(|r| r.elapsed_seconds = 0.0),
            Results::Searches(v) => v.iter_mut().for_each(|r| r.elapsed_seconds = 0.0),
            Results::Extremal(_) | Results::Repro(_) => {}
        }
        to_json_string(&d)
    }
}

fn n_range(n: Option<u64>) -> Vec<usize> {
    match n {
        Some(n) => vec![n as usize],
        None => (2..=8).collect(),
    }
}

fn run_checks(args: &CheckArgs, seed: u64) -> Result<Vec<CheckReport>> {
    let mut jobs: Vec<(InequalityId, Factorization)> = Vec::new();
    match args.ineq {
        IneqSelect::All => {
            for id in InequalityId::ALL {
                if id == InequalityId::Ahj && args.factorization.is_none() {
                    jobs.push((id, Factorization::Given));
                    jobs.push((id, Factorization::Sqrt));
                } else {
                    jobs.push((id, args.factorization.map_or(Factorization::Given, Into::into)));
                }
            }
        }
        IneqSelect::One(id) => jobs.push((id, args.factorization.map_or(Factorization::Given, Into::into))),
    }
    let mut reports = Vec::new();
    for n in n_range(args.n) {
        if let KSelect::Only(k) = args.k {
            if k > n {
                return Err(Error::domain(format!("k = {k} exceeds n = {n}")));
            }
        }
        let form = match args.form {
            FormArg::Hadamard => EntrywiseForm::hadamard(n),
            FormArg::Fan => EntrywiseForm::fan(n),
        };
        for &(id, factorization) in &jobs {
            let checker = id.checker(n, factorization, Some(&form))?;
            let cfg = SuiteConfig {
                n,
                trials: args.trials,
                seed,
                tolerance: args.tolerance,
                k: args.k,
            };
            reports.push(run_check(checker.as_ref(), &cfg)?);
        }
    }
    Ok(reports)
}

fn search_config(opts: &SearchOptions, question: Question, n: usize, seed: u64) -> SearchConfig {
    SearchConfig {
        question,
        n,
        k: opts.k,
        budget: opts.budget,
        restarts: opts.restarts,
        seed,
        commuting: opts.commuting,
        tolerance: opts.tolerance,
    }
}

fn check_k(k: KSelect, n: usize) -> Result<()> {
    match k {
        KSelect::Only(j) if j > n => Err(Error::domain(format!("k = {j} exceeds n = {n}"))),
        _ => Ok(()),
    }
}

/// Runs a parsed command. `env_seed` is the value of `$SVINEQ_SEED`.
pub fn execute(command: &Command, env_seed: Option<&str>) -> Result<ReportDocument> {
    let start = Instant::now();
    let (name, config, seed, results, exit_status) = match command {
        Command::Check(a) => {
            let seed = resolve_seed(a.common.seed, env_seed)?;
            let reports = run_checks(a, seed.seed)?;
            let bad = reports.iter().any(|r| !r.passed());
            (
                "check",
                serde_json::to_value(a),
                Some(seed),
                Results::Checks(reports),
                if bad { EXIT_VIOLATION } else { EXIT_OK },
            )
        }
        Command::Extremal(a) => {
            let seed = resolve_seed(a.common.seed, env_seed)?;
            let out = n_range(a.n)
                .into_iter()
                .map(|n| extremal_check(n, a.trials, seed.seed, a.tolerance))
                .collect::<Result<Vec<_>>>()?;
            let bad = out.iter().any(|s| s.failures > 0);
            (
                "extremal",
                serde_json::to_value(a),
                Some(seed),
                Results::Extremal(out),
                if bad { EXIT_VIOLATION } else { EXIT_OK },
            )
        }
        Command::Repro(a) => {
            let r = match a.what {
                Construction::FanCounterexample => reproduce_fan_counterexample()?,
            };
            let status = if r.sigma1 > 1.0 { EXIT_VIOLATION } else { EXIT_OK };
            ("repro", serde_json::to_value(a), None, Results::Repro(Box::new(r)), status)
        }
        Command::Ptrace(a) => {
            let seed = resolve_seed(a.common.seed, env_seed)?;
            let n = a.n as usize;
            check_k(a.search.k, n)?;
            let r = search_counterexample(&search_config(&a.search, a.question, n, seed.seed))?;
            let status = if r.found_candidate() { EXIT_VIOLATION } else { EXIT_OK };
            ("ptrace", serde_json::to_value(a), Some(seed), Results::Searches(vec![r]), status)
        }
        Command::Search(a) => {
            let seed = resolve_seed(a.common.seed, env_seed)?;
            check_k(a.search.k, a.max_n as usize)?;
            let mut out = Vec::new();
            for n in 2..=a.max_n as usize {
                if matches!(a.search.k, KSelect::Only(j) if j > n) {
                    continue;
                }
                for q in [Question::One, Question::Two] {
                    out.push(search_counterexample(&search_config(&a.search, q, n, seed.seed))?);
                }
            }
            let status = if out.iter().any(SearchResult::found_candidate) {
                EXIT_VIOLATION
            } else {
                EXIT_OK
            };
            ("search", serde_json::to_value(a), Some(seed), Results::Searches(out), status)
        }
    };
    Ok(ReportDocument {
        schema: REPORT_SCHEMA.into(),
        tool_version: TOOL_VERSION.into(),
        generator: GENERATOR_ID.into(),
        command: name.into(),
        config: config.map_err(|e| Error::Parse(e.to_string()))?,
        seed,
        exit_status,
        results,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    })
}

fn fmt_margin(m: f64) -> String {
    if m.is_finite() {
        format!("{m:+.6e}")
    } else {
        format!("{m}")
    }
}

/// Human-readable summary of a report.
pub fn render_table(doc: &ReportDocument) -> String {
    let mut s = String::new();
    match &doc.results {
        Results::Checks(reports) => {
            let _ = writeln!(s, "{:<16} {:>3} {:>8} {:>10} {:>14}  status", "inequality", "n", "trials", "violations", "worst margin");
            for r in reports {
                let _ = writeln!(
                    s,
                    "{:<16} {:>3} {:>8} {:>10} {:>14}  {}",
                    r.inequality_id,
                    r.n,
                    r.trials,
                    r.violations,
                    fmt_margin(r.worst_margin),
                    if r.passed() { "ok" } else { "VIOLATED" }
                );
                for p in &r.probes {
                    let _ = writeln!(s, "    probe {:<24} max ratio {:.12}  ({})", p.name, p.max_ratio, p.status);
                }
            }
        }
        Results::Extremal(rows) => {
            let _ = writeln!(s, "{:>3} {:>8} {:>14} {:>14} {:>8}", "n", "trials", "max gap", "rank-1 defect", "failures");
            for r in rows {
                let _ = writeln!(
                    s,
                    "{:>3} {:>8} {:>14.6e} {:>14.6e} {:>8}",
                    r.n, r.trials, r.max_gap, r.max_rank_one_defect, r.failures
                );
            }
        }
        Results::Repro(r) => {
            let _ = writeln!(s, "unitarity residual   {:.3e}", r.unitarity_residual);
            let _ = writeln!(s, "spectrum             {:?}", r.spectrum);
            let _ = writeln!(s, "sigma_1              {:.12}", r.sigma1);
            let _ = writeln!(s, "k = 1 margin         {:.12}", r.ahj_k1_margin);
        }
        Results::Searches(rows) => {
            let _ = writeln!(s, "{:>2} {:>3} {:>10} {:>14} {:>3}  outcome", "q", "n", "evals", "best margin", "k");
            for r in rows {
                let _ = writeln!(
                    s,
                    "{:>2} {:>3} {:>10} {:>14} {:>3}  {}",
                    r.question,
                    r.n,
                    r.evaluations,
                    fmt_margin(r.best_margin),
                    r.best_k,
                    r.outcome
                );
            }
        }
    }
    let _ = write!(s, "exit status {}, {:.2}s", doc.exit_status, doc.wall_time_seconds);
    s
}

/// Parses `argv`, runs the command, writes the report and returns the exit
/// status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let env_seed = std::env::var(SEED_ENV).ok();
    let doc = match execute(&cli.command, env_seed.as_deref()) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    let (output, format) = match &cli.command {
        Command::Check(a) => (&a.common.output, a.common.format),
        Command::Extremal(a) => (&a.common.output, a.common.format),
        Command::Repro(a) => (&a.output, a.format),
        Command::Ptrace(a) => (&a.common.output, a.common.format),
        Command::Search(a) => (&a.common.output, a.common.format),
    };
    let json = to_json_string(&doc);
    if let Some(path) = output {
        if let Err(e) = write_atomic(path, json.as_bytes()) {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    }
    let text = match format {
        Format::Json => json,
        Format::Table => render_table(&doc),
    };
    let mut stdout = std::io::stdout().lock();
    match writeln!(stdout, "{text}").and_then(|()| stdout.flush()) {
        Ok(()) => doc.exit_status,
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => doc.exit_status,
        Err(e) => {
            eprintln!("error: writing to stdout: {e}");
            EXIT_ERROR
        }
    }
}
