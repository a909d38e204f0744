//! The `entroshrink` command line.
//!
//! Exit status: 0 success, 2 usage error, 3 input-format error, 4 numeric-domain error.
//! Data goes to standard output (or `--out`); diagnostics go to standard error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bench::{self, BenchConfig, ReportOptions, ScenarioKind, ScenarioSpec};
use crate::entropy::EstimatorKind;
use crate::error::Error;
use crate::freq::{estimate_shrink, CountVector, PriorSpec};
use crate::mi::{self, DiscretizationScheme, ExpressionMatrix};
use crate::network::{self, ExportFormat};
use crate::shrinkage;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FORMAT: i32 = 3;
pub const EXIT_DOMAIN: i32 = 4;

/// A failure with the exit status it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: msg.into(),
        }
    }

    fn format(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_FORMAT,
            message: msg.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Format(_) => EXIT_FORMAT,
            Error::Io(_) | Error::UnsupportedEstimator(_) => EXIT_USAGE,
            Error::InvalidInput(_) | Error::Domain(_) | Error::DegenerateData(_) => EXIT_DOMAIN,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "entroshrink",
    version,
    about = "Small-sample entropy and mutual information with James-Stein shrinkage"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate cell frequencies from a counts file
    Freqs(FreqsArgs),
    /// Estimate entropy (nats) from a counts file
    Entropy(EntropyArgs),
    /// Bin an expression matrix into discrete levels
    Discretize(DiscretizeArgs),
    /// Pairwise mutual information for every pair of variables
    Mi(MiArgs),
    /// Discretize, estimate MI, prune with the DPI rule and export the network
    Network(NetworkArgs),
    /// Monte Carlo comparison of entropy estimators
    Bench(BenchArgs),
    /// Risk of the James-Stein normal-mean estimators versus maximum likelihood
    JsDemo(JsDemoArgs),
}

fn parse_estimator(s: &str) -> Result<EstimatorKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_prior(s: &str) -> Result<PriorSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> Result<ExportFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_scenario(s: &str) -> Result<ScenarioKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Decimal places for printed values
    #[arg(long, default_value_t = 6)]
    pub precision: usize,
    /// Write output to this file instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FreqsArgs {
    /// Counts file: nonnegative integers, one per line or comma-separated
    pub counts: PathBuf,
    /// ml, bayes, or shrink
    #[arg(long, default_value = "shrink")]
    pub estimator: String,
    /// Dirichlet pseudocount for --estimator bayes: a number, jeffreys, laplace, perks or minimax
    #[arg(long, value_parser = parse_prior)]
    pub prior: Option<PriorSpec>,
    /// Shrinkage target; only `uniform` is supported
    #[arg(long, default_value = "uniform")]
    pub target: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    /// Counts file: nonnegative integers, one per line or comma-separated
    pub counts: PathBuf,
    /// ml, miller-madow, bayes, chao-shen or shrink
    #[arg(long, default_value = "shrink")]
    pub estimator: String,
    /// Dirichlet pseudocount for --estimator bayes
    #[arg(long, value_parser = parse_prior)]
    pub prior: Option<PriorSpec>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    /// Expression matrix CSV: variable name, then one column per sample
    #[arg(long)]
    pub input: PathBuf,
    /// The first CSV row is a header
    #[arg(long)]
    pub header: bool,
    /// Number of equal-width levels (default: Freedman-Diaconis)
    #[arg(long, conflicts_with = "fd")]
    pub levels: Option<usize>,
    /// Choose the number of levels with the Freedman-Diaconis rule over all values
    #[arg(long)]
    pub fd: bool,
}

#[derive(Debug, Args)]
pub struct DiscretizeArgs {
    #[command(flatten)]
    pub matrix: MatrixArgs,
    /// Write output to this file instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MiArgs {
    #[command(flatten)]
    pub matrix: MatrixArgs,
    /// ml, bayes-<prior> or shrink
    #[arg(long, default_value = "shrink", value_parser = parse_estimator)]
    pub estimator: EstimatorKind,
    /// Emit the full symmetric matrix instead of the upper-triangle pair list
    #[arg(long)]
    pub full: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct NetworkArgs {
    #[command(flatten)]
    pub matrix: MatrixArgs,
    #[arg(long, default_value = "shrink", value_parser = parse_estimator)]
    pub estimator: EstimatorKind,
    /// Tolerance for the triplet rule
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    /// dot, graphml or csv
    #[arg(long, default_value = "dot", value_parser = parse_format)]
    pub format: ExportFormat,
    /// Write output to this file instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Flat key=value config file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated scenarios: 1-4, dirichlet-sparse, dirichlet-uniform, half-zeros, zipf, zipf-<s>
    #[arg(long, value_delimiter = ',', value_parser = parse_scenario)]
    pub scenario: Option<Vec<ScenarioKind>>,
    /// Number of cells
    #[arg(long)]
    pub p: Option<usize>,
    /// Comma-separated sample sizes
    #[arg(long, value_delimiter = ',')]
    pub n_grid: Option<Vec<u64>>,
    /// Simulation runs per grid cell
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated estimators (default: the standard eight)
    #[arg(long, value_delimiter = ',', value_parser = parse_estimator)]
    pub estimators: Option<Vec<EstimatorKind>>,
    /// Exponent used for zipf scenarios given without one
    #[arg(long)]
    pub zipf_exponent: Option<f64>,
    /// Worker threads (1 = serial)
    #[arg(long)]
    pub threads: Option<usize>,
    /// Add wall-clock rows to the report
    #[arg(long)]
    pub timing: bool,
    /// Write the report to this file instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct JsDemoArgs {
    /// Dimension
    #[arg(long, default_value_t = 10)]
    pub p: usize,
    /// Common value of every component of the true mean
    #[arg(long, default_value_t = 0.0)]
    pub mu: f64,
    /// Number of simulated observations
    #[arg(long, default_value_t = 10000)]
    pub draws: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{e}");
                0
            };
            return code;
        }
    };
    match execute(cli.command) {
        Ok((text, out)) => match emit(&text, out.as_deref(), stdout) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(stderr, "error: {}", e.message);
                e.code
            }
        },
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::usage(e.to_string())),
    }
}

fn execute(command: Command) -> CliResult<(String, Option<PathBuf>)> {
    match command {
        Command::Freqs(a) => {
            let out = a.output.out.clone();
            Ok((cmd_freqs(&a)?, out))
        }
        Command::Entropy(a) => {
            let out = a.output.out.clone();
            Ok((cmd_entropy(&a)?, out))
        }
        Command::Discretize(a) => {
            let out = a.out.clone();
            Ok((cmd_discretize(&a)?, out))
        }
        Command::Mi(a) => {
            let out = a.output.out.clone();
            Ok((cmd_mi(&a)?, out))
        }
        Command::Network(a) => {
            let out = a.out.clone();
            Ok((cmd_network(&a)?, out))
        }
        Command::Bench(a) => {
            let out = a.out.clone();
            Ok((cmd_bench(&a)?, out))
        }
        Command::JsDemo(a) => {
            let out = a.output.out.clone();
            Ok((cmd_js_demo(&a)?, out))
        }
    }
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

/// Parses a counts file: integers separated by commas, whitespace or newlines.
pub fn parse_counts(text: &str) -> CliResult<CountVector> {
    let mut values = Vec::new();
    for tok in text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
    {
        let v: i64 = tok
            .parse()
            .map_err(|_| CliError::format(format!("`{tok}` is not an integer count")))?;
        if v < 0 {
            return Err(CliError::usage(format!("negative count {v}")));
        }
        values.push(v as u64);
    }
    if values.is_empty() {
        return Err(CliError::format("counts file is empty"));
    }
    Ok(CountVector::new(values)?)
}

fn resolve_estimator(name: &str, prior: Option<&PriorSpec>) -> CliResult<EstimatorKind> {
    if name.eq_ignore_ascii_case("bayes") {
        let prior = prior
            .cloned()
            .ok_or_else(|| CliError::usage("--estimator bayes needs --prior"))?;
        return Ok(EstimatorKind::Bayes(prior));
    }
    if prior.is_some() {
        return Err(CliError::usage("--prior only applies to --estimator bayes"));
    }
    name.parse().map_err(|e: Error| CliError::usage(e.to_string()))
}

pub fn cmd_freqs(a: &FreqsArgs) -> CliResult<String> {
    if !a.target.eq_ignore_ascii_case("uniform") {
        return Err(CliError::usage(format!("unsupported target `{}`", a.target)));
    }
    let counts = parse_counts(&read_file(&a.counts)?)?;
    let est = resolve_estimator(&a.estimator, a.prior.as_ref())?;
    let prec = a.output.precision;
    let mut out = String::new();
    let freqs = match est {
        EstimatorKind::Shrink => {
            let s = estimate_shrink(&counts, None)?;
            let _ = writeln!(out, "# lambda={:.prec$}", s.lambda);
            s.freqs
        }
        other if other.produces_frequencies() => other.frequencies(&counts)?,
        other => {
            return Err(CliError::usage(format!(
                "{other} does not estimate frequencies"
            )))
        }
    };
    out.push_str("cell,freq\n");
    for (k, f) in freqs.probs().iter().enumerate() {
        let _ = writeln!(out, "{k},{f:.prec$}");
    }
    Ok(out)
}

pub fn cmd_entropy(a: &EntropyArgs) -> CliResult<String> {
    let counts = parse_counts(&read_file(&a.counts)?)?;
    let est = resolve_estimator(&a.estimator, a.prior.as_ref())?;
    let h = est.entropy(&counts)?;
    Ok(format!("{h:.prec$}\n", prec = a.output.precision))
}

fn load_matrix(m: &MatrixArgs) -> CliResult<(ExpressionMatrix, DiscretizationScheme)> {
    let file = fs::File::open(&m.input)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", m.input.display())))?;
    let matrix = ExpressionMatrix::from_csv(file, m.header)?;
    let scheme = match m.levels {
        Some(k) => DiscretizationScheme::for_matrix(&matrix, k)?,
        None => mi::fd_bin_count(&matrix.pooled_values())?,
    };
    Ok((matrix, scheme))
}

pub fn cmd_discretize(a: &DiscretizeArgs) -> CliResult<String> {
    let (matrix, scheme) = load_matrix(&a.matrix)?;
    let d = mi::discretize(&matrix, &scheme);
    let mut out = format!("# levels={}\n", scheme.levels());
    for (name, row) in matrix.names().iter().zip(&d.rows) {
        out.push_str(name);
        for b in row {
            let _ = write!(out, ",{b}");
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn cmd_mi(a: &MiArgs) -> CliResult<String> {
    let (matrix, scheme) = load_matrix(&a.matrix)?;
    let graph = mi::mi_all_pairs(&matrix, &scheme, &a.estimator)?;
    let prec = a.output.precision;
    let names = graph.names();
    let mut out = String::new();
    if a.full {
        for n in names {
            let _ = write!(out, ",{n}");
        }
        out.push('\n');
        for (i, n) in names.iter().enumerate() {
            out.push_str(n);
            for j in 0..names.len() {
                let _ = write!(out, ",{:.prec$}", graph.weight(i, j));
            }
            out.push('\n');
        }
    } else {
        out.push_str("source,target,mi\n");
        for i in 0..names.len() {
            for j in i + 1..names.len() {
                let _ = writeln!(out, "{},{},{:.prec$}", names[i], names[j], graph.weight(i, j));
            }
        }
    }
    Ok(out)
}

pub fn cmd_network(a: &NetworkArgs) -> CliResult<String> {
    let (matrix, scheme) = load_matrix(&a.matrix)?;
    let graph = mi::mi_all_pairs(&matrix, &scheme, &a.estimator)?;
    let pruned = network::dpi_prune(&graph, a.epsilon)?;
    Ok(network::export_graph(&pruned, a.format))
}

/// Flat `key=value` bench settings; `#` starts a comment.
fn read_bench_file(path: &Path) -> CliResult<Vec<(String, String)>> {
    let text = read_file(path)?;
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::format(format!("config line {}: expected key=value", i + 1)))?;
        pairs.push((k.trim().replace('_', "-"), v.trim().to_string()));
    }
    Ok(pairs)
}

fn list<T, F>(v: &str, f: F) -> CliResult<Vec<T>>
where
    F: Fn(&str) -> CliResult<T>,
{
    v.split(',').map(|s| f(s.trim())).collect()
}

pub fn bench_config(a: &BenchArgs) -> CliResult<BenchConfig> {
    let mut scenarios: Vec<ScenarioKind> = vec![
        ScenarioKind::DirichletSparse,
        ScenarioKind::DirichletUniform,
        ScenarioKind::HalfStructuralZeros,
        ScenarioKind::ZipfPower { exponent: 1.0 },
    ];
    let mut p = 1000usize;
    let mut n_grid = bench::STANDARD_SAMPLE_SIZES.to_vec();
    let mut runs = 1000usize;
    let mut seed = 1u64;
    let mut estimators = EstimatorKind::standard_set();
    let mut zipf: Option<f64> = None;
    let mut threads: Option<usize> = None;

    let bad = |k: &str, v: &str| CliError::format(format!("config: bad value `{v}` for `{k}`"));
    if let Some(path) = &a.config {
        for (k, v) in read_bench_file(path)? {
            match k.as_str() {
                "scenario" => {
                    scenarios = list(&v, |s| s.parse().map_err(|_| bad(&k, s)))?;
                }
                "p" => p = v.parse().map_err(|_| bad(&k, &v))?,
                "n-grid" => n_grid = list(&v, |s| s.parse().map_err(|_| bad(&k, s)))?,
                "runs" => runs = v.parse().map_err(|_| bad(&k, &v))?,
                "seed" => seed = v.parse().map_err(|_| bad(&k, &v))?,
                "estimators" => estimators = list(&v, |s| s.parse().map_err(|_| bad(&k, s)))?,
                "zipf-exponent" => zipf = Some(v.parse().map_err(|_| bad(&k, &v))?),
                "threads" => threads = Some(v.parse().map_err(|_| bad(&k, &v))?),
                other => return Err(CliError::format(format!("config: unknown key `{other}`"))),
            }
        }
    }
    if let Some(s) = &a.scenario {
        scenarios = s.clone();
    }
    p = a.p.unwrap_or(p);
    if let Some(g) = &a.n_grid {
        n_grid = g.clone();
    }
    runs = a.runs.unwrap_or(runs);
    seed = a.seed.unwrap_or(seed);
    if let Some(e) = &a.estimators {
        estimators = e.clone();
    }
    zipf = a.zipf_exponent.or(zipf);
    threads = a.threads.or(threads);

    let scenarios = scenarios
        .into_iter()
        .map(|k| {
            let k = match (k, zipf) {
                (ScenarioKind::ZipfPower { exponent }, Some(s)) if exponent == 1.0 => {
                    ScenarioKind::ZipfPower { exponent: s }
                }
                (k, _) => k,
            };
            ScenarioSpec::new(k, p).map_err(|e| CliError::usage(e.to_string()))
        })
        .collect::<CliResult<Vec<_>>>()?;
    if runs == 0 {
        return Err(CliError::usage("--runs must be >= 1"));
    }
    if n_grid.contains(&0) {
        return Err(CliError::usage("sample sizes must be >= 1"));
    }
    if threads == Some(0) {
        return Err(CliError::usage("--threads must be >= 1"));
    }
    Ok(BenchConfig {
        scenarios,
        sample_sizes: n_grid,
        runs,
        estimators,
        seed,
        threads,
    })
}

pub fn cmd_bench(a: &BenchArgs) -> CliResult<String> {
    let config = bench_config(a)?;
    let result = bench::run_bench(&config)?;
    Ok(bench::write_report_with(
        &result,
        ReportOptions { timing: a.timing },
    ))
}

pub fn cmd_js_demo(a: &JsDemoArgs) -> CliResult<String> {
    let mean = vec![a.mu; a.p];
    let r = shrinkage::simulate_risk(&mean, a.draws, a.seed)?;
    let prec = a.output.precision;
    let mut out = String::from("estimator,mse\n");
    let _ = writeln!(out, "ml,{:.prec$}", r.ml);
    let _ = writeln!(out, "james-stein-zero,{:.prec$}", r.zero_target);
    if let Some(m) = r.mean_target {
        let _ = writeln!(out, "james-stein-mean,{m:.prec$}");
    }
    Ok(out)
}
