//! Command-line interface.
//!
//! Exit codes: 0 on success, 2 for bad arguments, 3 for unreadable or
//! unusable data, 4 when a requested confidence level is not attainable.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use mediancr_core::binom::{BinomialHalf, MAX_N};
use mediancr_core::classical::{bootstrap_medians, AccelerationFormula};
use mediancr_core::dist::DistributionSpec;
use mediancr_core::lk::{lk_exponential, lk_uniform, Ratios};
use mediancr_core::method::{evaluate, Method, MethodInputs, MethodOutput};
use mediancr_core::optimal::select_gamma0;
use mediancr_core::{Error, SortedSample};

use crate::data::{jitter_ties, DataFile};
use crate::format::{fmt_value, format_region, output_json};
use crate::sim::{
    run_simulation, write_csv, ReplicationKey, SimConfig, SimError, PURPOSE_BOOTSTRAP, PURPOSE_JITTER,
};

pub const SEED_ENV: &str = "MEDIANCR_SEED";
pub const DEFAULT_SEED: u64 = 20_240_917;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DATA: u8 = 3;
pub const EXIT_INFEASIBLE: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "mediancr", version, about = "Confidence regions for the median")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Focus {
    Exponential,
    Uniform,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Acceleration {
    Standard,
    AsPrinted,
}

impl From<Acceleration> for AccelerationFormula {
    fn from(a: Acceleration) -> Self {
        match a {
            Acceleration::Standard => AccelerationFormula::Standard,
            Acceleration::AsPrinted => AccelerationFormula::AsPrinted,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Confidence regions for the data in a file.
    Cr {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// `all` or a comma-separated list of method ids 1-13.
        #[arg(long, default_value = "all")]
        methods: String,
        /// Falls back to the MEDIANCR_SEED environment variable, then a fixed default.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 2000)]
        breps: usize,
        /// Perturb tied values by uniform(-J, J) noise before analysis.
        #[arg(long, value_name = "J")]
        jitter: Option<f64>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
        /// Print the randomizer, the index sets and both possible regions of randomized methods.
        #[arg(long)]
        explain: bool,
        #[arg(long, value_enum, default_value_t = Acceleration::Standard)]
        acceleration: Acceleration,
    },
    /// Monte Carlo coverage and content study.
    Simulate {
        /// Comma-separated families (`normal`, `cauchy`, `uniform`, `logistic`, `gamma`,
        /// `weibull`, `mixture`, `exponential`), optionally with parameters as in
        /// `gamma(3,1)`, or `all` for the seven study families.
        #[arg(long, default_value = "all")]
        dists: String,
        #[arg(long, default_value = "10,20,30,40,50")]
        sizes: String,
        #[arg(long, default_value_t = 10_000)]
        reps: usize,
        #[arg(long, default_value_t = 2000)]
        breps: usize,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value = "all")]
        methods: String,
        #[arg(long)]
        seed: Option<u64>,
        /// CSV destination; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; 0 uses all available cores.
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long, value_enum, default_value_t = Acceleration::Standard)]
        acceleration: Acceleration,
    },
    /// Ratios, binomial masses and the optimal index set for a focus profile.
    Table {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        focus: Focus,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
}

/// An error with the exit code it maps to.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    fn data(message: impl Into<String>) -> Self {
        Self { code: EXIT_DATA, message: message.into() }
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let mut stdout = std::io::stdout().lock();
    match execute(cli.command, &mut stdout) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn execute(command: Command, out: &mut impl std::io::Write) -> Result<u8, Failure> {
    match command {
        Command::Cr { input, alpha, methods, seed, breps, jitter, format, explain, acceleration } => {
            let opts = CrOptions {
                alpha,
                methods: parse_methods(&methods)?,
                seed: resolve_seed(seed)?,
                breps,
                jitter,
                acceleration: acceleration.into(),
            };
            let data = DataFile::read(&input).map_err(|e| Failure::data(e.to_string()))?;
            let report = compute_regions(&data.values, &opts)?;
            let text = match format {
                OutputFormat::Json => render_json(&report.outputs, explain),
                OutputFormat::Csv => render_csv(&report.outputs, explain),
            };
            write_out(out, &text)?;
            for (method, err) in &report.failures {
                eprintln!("error: method {} ({method}): {err}", method.id());
            }
            Ok(report.failures.first().map_or(EXIT_OK, |(_, e)| exit_code_for(e)))
        }
        Command::Simulate { dists, sizes, reps, breps, alpha, methods, seed, out: path, workers, acceleration } => {
            let config = SimConfig {
                distributions: parse_dists(&dists)?,
                sample_sizes: parse_list(&sizes, "sample size")?,
                alpha,
                reps,
                breps,
                methods: parse_methods(&methods)?,
                master_seed: resolve_seed(seed)?,
                workers,
                acceleration: acceleration.into(),
            };
            let results = run_simulation(&config).map_err(|e| match e {
                SimError::Config(c) => Failure::usage(c.to_string()),
                other => Failure::data(other.to_string()),
            })?;
            match path {
                Some(path) => {
                    let file = std::fs::File::create(&path)
                        .map_err(|e| Failure::data(format!("cannot write {}: {e}", path.display())))?;
                    write_csv(&results, std::io::BufWriter::new(file)).map_err(|e| Failure::data(e.to_string()))?;
                    write_out(out, &summary(&results))?;
                }
                None => write_csv(&results, out).map_err(|e| Failure::data(e.to_string()))?,
            }
            Ok(EXIT_OK)
        }
        Command::Table { n, focus, alpha } => {
            write_out(out, &table(n, focus, alpha)?)?;
            Ok(EXIT_OK)
        }
    }
}

fn write_out(out: &mut impl std::io::Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure::data(format!("cannot write output: {e}")))
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Infeasible { .. } => EXIT_INFEASIBLE,
        _ => EXIT_DATA,
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, Failure> {
    text.split(',')
        .map(|t| t.trim().parse().map_err(|_| Failure::usage(format!("invalid {what} {t:?}"))))
        .collect()
}

/// `all` or a comma-separated list of ids.
pub fn parse_methods_arg(text: &str) -> Result<Vec<Method>, String> {
    parse_methods(text).map_err(|f| f.message)
}

fn parse_methods(text: &str) -> Result<Vec<Method>, Failure> {
    if text.trim() == "all" {
        return Ok(Method::ALL.to_vec());
    }
    let ids: Vec<u8> = parse_list(text, "method id")?;
    let mut methods = Vec::new();
    for id in ids {
        let m = Method::from_id(id).map_err(|e| Failure::usage(e.to_string()))?;
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    Ok(methods)
}

/// Splits on commas that are not inside parentheses.
fn split_top_level(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

/// Parses `--dists`: `all`, family names, or `family(p1,...)`.
pub fn parse_dists_arg(text: &str) -> Result<Vec<DistributionSpec>, String> {
    parse_dists(text).map_err(|f| f.message)
}

fn parse_dists(text: &str) -> Result<Vec<DistributionSpec>, Failure> {
    let mut out = Vec::new();
    for token in split_top_level(text) {
        let token = token.trim();
        if token == "all" {
            out.extend(DistributionSpec::STUDY_FAMILIES);
            continue;
        }
        let spec = match token.split_once('(') {
            Some((family, rest)) => {
                let inner = rest
                    .strip_suffix(')')
                    .ok_or_else(|| Failure::usage(format!("unbalanced parentheses in {token:?}")))?;
                let params: Vec<f64> = parse_list(inner, "distribution parameter")?;
                DistributionSpec::from_parts(family.trim(), &params)
            }
            None => DistributionSpec::default_for(token),
        }
        .map_err(|e| Failure::usage(e.to_string()))?;
        if !out.contains(&spec) {
            out.push(spec);
        }
    }
    Ok(out)
}

/// Settings for [`compute_regions`].
#[derive(Debug, Clone, PartialEq)]
pub struct CrOptions {
    pub alpha: f64,
    pub methods: Vec<Method>,
    pub seed: u64,
    pub breps: usize,
    pub jitter: Option<f64>,
    pub acceleration: AccelerationFormula,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrReport {
    pub outputs: Vec<MethodOutput>,
    pub failures: Vec<(Method, Error)>,
}

/// Evaluates the selected methods on raw data. Randomness (jitter, bootstrap,
/// randomizers) comes from streams keyed by `seed` only.
pub fn compute_regions(values: &[f64], opts: &CrOptions) -> Result<CrReport, Failure> {
    if !(opts.alpha > 0.0 && opts.alpha < 1.0) {
        return Err(Failure::usage(format!("alpha must lie in (0, 1), got {}", opts.alpha)));
    }
    let key = ReplicationKey { master_seed: opts.seed, cell: 0, index: 0 };
    let values = match opts.jitter {
        Some(j) if j > 0.0 && j.is_finite() => jitter_ties(values, j, &mut key.stream(PURPOSE_JITTER)),
        Some(j) => return Err(Failure::usage(format!("jitter must be positive, got {j}"))),
        None => values.to_vec(),
    };
    let sample = SortedSample::new(&values).map_err(|e| Failure::data(e.to_string()))?;
    let boot = if opts.methods.iter().any(|m| m.is_bootstrap()) {
        if opts.breps < 2 {
            return Err(Failure::usage("bootstrap methods need --breps >= 2"));
        }
        Some(
            bootstrap_medians(&sample, opts.breps, &mut key.stream(PURPOSE_BOOTSTRAP))
                .map_err(|e| Failure::data(e.to_string()))?,
        )
    } else {
        None
    };
    let mut report = CrReport { outputs: Vec::new(), failures: Vec::new() };
    for &method in &opts.methods {
        let inputs = MethodInputs {
            boot: boot.as_ref(),
            u: method.is_randomized().then(|| key.randomizer(method)),
            acceleration: opts.acceleration,
        };
        match evaluate(method, &sample, opts.alpha, &inputs) {
            Ok(o) => report.outputs.push(o),
            Err(e) => report.failures.push((method, e)),
        }
    }
    Ok(report)
}

fn render_json(outputs: &[MethodOutput], explain: bool) -> String {
    let list: Vec<_> = outputs.iter().map(|o| output_json(o, explain)).collect();
    let mut s = serde_json::to_string_pretty(&list).expect("JSON values serialize");
    s.push('\n');
    s
}

fn render_csv(outputs: &[MethodOutput], explain: bool) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["method", "name", "region", "content", "u", "flags"];
    if explain {
        header.extend(["gamma", "region_without_tie", "region_with_tie"]);
    }
    w.write_record(&header).expect("in-memory write");
    for o in outputs {
        let mut row = vec![
            o.method.id().to_string(),
            o.method.name().to_string(),
            format_region(&o.region),
            fmt_value(o.region.content()),
            o.u.map(fmt_value).unwrap_or_default(),
            o.flags.join(";"),
        ];
        if explain {
            match &o.branches {
                Some(b) => row.extend([
                    fmt_value(b.selection.gamma),
                    format_region(&b.without_tie),
                    format_region(&b.with_tie),
                ]),
                None => row.extend([String::new(), String::new(), String::new()]),
            }
        }
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
}

fn summary(results: &[crate::sim::SimResult]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:>6} {:<14} {:>4} {:>9} {:>8} {:>12} {:>6}", "method", "dist", "n", "coverage", "mc_se", "std_content", "inf");
    for r in results {
        let _ = writeln!(
            s,
            "{:>6} {:<14} {:>4} {:>9.4} {:>8.4} {:>12.4} {:>6}",
            r.method.id(),
            r.dist,
            r.n,
            r.coverage,
            r.mc_se,
            r.std_content,
            r.infinite_count
        );
    }
    s
}

fn join(ks: &[usize]) -> String {
    ks.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",")
}

/// The reference table: `k`, `r(k)` and `P(B = k)`, then the optimal selection at `alpha`.
pub fn table_text(n: usize, exponential: bool, alpha: f64) -> Result<String, String> {
    table(n, if exponential { Focus::Exponential } else { Focus::Uniform }, alpha).map_err(|f| f.message)
}

fn table(n: usize, focus: Focus, alpha: f64) -> Result<String, Failure> {
    if n == 0 || n > MAX_N {
        return Err(Failure::usage(format!("--n must lie in 1..={MAX_N}, got {n}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Failure::usage(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let profile = match focus {
        Focus::Exponential => lk_exponential(n, 1.0),
        Focus::Uniform => lk_uniform(n, 1.0),
    }
    .map_err(|e| Failure::usage(e.to_string()))?;
    let binom = BinomialHalf::new(n).map_err(|e| Failure::usage(e.to_string()))?;
    let mut s = String::new();
    let _ = writeln!(s, "{:>5}  {:>40}  {:>14}", "k", "r(k)", "P(B=k)");
    for k in 0..=n {
        let r = match profile.ratios() {
            Ratios::Exact(v) => v[k].to_string(),
            Ratios::Floating(v) => format!("{:.10e}", v[k]),
        };
        let _ = writeln!(s, "{k:>5}  {r:>40}  {:>14.10}", binom.pmf_values()[k]);
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "alpha: {alpha}");
    match select_gamma0(&profile, alpha) {
        Ok(sel) => {
            let _ = writeln!(s, "included: {{{}}}", join(&sel.included));
            let _ = writeln!(s, "included mass: {:.10}", sel.included_mass);
            let _ = writeln!(s, "tie set: {{{}}}", join(&sel.tie_set));
            let _ = writeln!(s, "tie mass: {:.10}", sel.tie_mass);
            let _ = writeln!(s, "threshold c: {}", sel.threshold);
            let _ = writeln!(s, "gamma: {:.10}", sel.gamma);
        }
        Err(e) => {
            let _ = writeln!(s, "selection: {e}");
        }
    }
    Ok(s)
}
