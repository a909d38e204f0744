//! Monte Carlo comparison of entropy and frequency estimators.
//!
//! For each scenario and sample size, every run draws fresh true frequencies,
//! samples multinomial counts from them, and scores all configured estimators
//! on the same counts. Each run has its own random stream derived from
//! `(seed, scenario, n, run)`, so results do not depend on thread scheduling.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Gamma};
use rayon::prelude::*;

use crate::entropy::{entropy_plugin, EstimatorKind};
use crate::error::{invalid, Error, Result};
use crate::freq::{CountVector, FrequencyVector};

/// Identifier of the random number generation scheme, written into reports.
pub const RNG_ALGORITHM: &str = "chacha8+splitmix64-substreams";

/// Dirichlet parameter of the sparse scenario.
pub const SPARSE_DIRICHLET_A: f64 = 0.0007;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScenarioKind {
    /// Symmetric Dirichlet with `a = 0.0007`: few cells carry the mass.
    DirichletSparse,
    /// Symmetric Dirichlet with `a = 1`.
    DirichletUniform,
    /// Dirichlet(1) on the first `p/2` cells, exact zeros on the rest.
    HalfStructuralZeros,
    /// Deterministic `θ_k ∝ k^{-s}`.
    ZipfPower { exponent: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub p: usize,
}

impl ScenarioSpec {
    pub fn new(kind: ScenarioKind, p: usize) -> Result<Self> {
        if p < 2 {
            return Err(invalid("scenario dimension must be >= 2"));
        }
        match kind {
            ScenarioKind::HalfStructuralZeros if !p.is_multiple_of(2) => {
                return Err(invalid("structural-zero scenario needs even p"))
            }
            ScenarioKind::ZipfPower { exponent } if !(exponent > 0.0) || !exponent.is_finite() => {
                return Err(invalid("Zipf exponent must be positive"))
            }
            _ => {}
        }
        Ok(Self { kind, p })
    }

    /// The four standard scenarios at dimension `p` (Zipf exponent 1).
    pub fn standard(p: usize) -> Result<Vec<Self>> {
        [
            ScenarioKind::DirichletSparse,
            ScenarioKind::DirichletUniform,
            ScenarioKind::HalfStructuralZeros,
            ScenarioKind::ZipfPower { exponent: 1.0 },
        ]
        .into_iter()
        .map(|k| Self::new(k, p))
        .collect()
    }

    pub fn label(&self) -> String {
        match self.kind {
            ScenarioKind::DirichletSparse => "dirichlet-sparse".into(),
            ScenarioKind::DirichletUniform => "dirichlet-uniform".into(),
            ScenarioKind::HalfStructuralZeros => "half-zeros".into(),
            ScenarioKind::ZipfPower { exponent } if exponent == 1.0 => "zipf".into(),
            ScenarioKind::ZipfPower { exponent } => format!("zipf-{exponent}"),
        }
    }

    fn stream_id(&self) -> u64 {
        let kind = match self.kind {
            ScenarioKind::DirichletSparse => 1,
            ScenarioKind::DirichletUniform => 2,
            ScenarioKind::HalfStructuralZeros => 3,
            ScenarioKind::ZipfPower { exponent } => 4 ^ exponent.to_bits().rotate_left(8),
        };
        splitmix(kind ^ (self.p as u64).rotate_left(32))
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    /// `1`/`dirichlet-sparse`, `2`/`dirichlet-uniform`, `3`/`half-zeros`,
    /// `4`/`zipf`, or `zipf-<s>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        Ok(match s.as_str() {
            "1" | "dirichlet-sparse" | "sparse" => ScenarioKind::DirichletSparse,
            "2" | "dirichlet-uniform" | "uniform" => ScenarioKind::DirichletUniform,
            "3" | "half-zeros" => ScenarioKind::HalfStructuralZeros,
            "4" | "zipf" => ScenarioKind::ZipfPower { exponent: 1.0 },
            other => match other.strip_prefix("zipf-").map(str::parse::<f64>) {
                Some(Ok(exponent)) => ScenarioKind::ZipfPower { exponent },
                _ => return Err(invalid(format!("unknown scenario `{s}`"))),
            },
        })
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random stream for one run, derived from the seed and the run's coordinates.
pub fn run_rng(seed: u64, scenario: &ScenarioSpec, n: u64, run: u64) -> ChaCha8Rng {
    let mut s = splitmix(seed);
    for part in [scenario.stream_id(), n, run] {
        s = splitmix(s ^ part);
    }
    ChaCha8Rng::seed_from_u64(s)
}

/// A symmetric Dirichlet draw plus the number of cells that underflowed to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletDraw {
    pub freqs: FrequencyVector,
    pub underflow_cells: usize,
}

/// Symmetric Dirichlet(a) over `p` cells via normalized Gamma variates.
///
/// Gammas are generated in log space: for `a < 1`, `log G = log G(a+1) + log(U)/a`,
/// which stays accurate for tiny shapes where the variate itself underflows.
/// Cells whose normalized weight is below the smallest normal double are set
/// to zero and counted.
pub fn sample_dirichlet<R: Rng + ?Sized>(a: f64, p: usize, rng: &mut R) -> Result<DirichletDraw> {
    if !(a > 0.0) || !a.is_finite() || p == 0 {
        return Err(invalid("Dirichlet needs a > 0 and p >= 1"));
    }
    let boosted = a < 1.0;
    let gamma = Gamma::new(if boosted { a + 1.0 } else { a }, 1.0)
        .map_err(|e| Error::Domain(e.to_string()))?;
    let logs: Vec<f64> = (0..p)
        .map(|_| {
            let g: f64 = gamma.sample(rng);
            if boosted {
                let u: f64 = 1.0 - rng.random::<f64>();
                g.ln() + u.ln() / a
            } else {
                g.ln()
            }
        })
        .collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut w: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let mut underflow_cells = 0;
    for x in w.iter_mut() {
        if *x < f64::MIN_POSITIVE {
            *x = 0.0;
            underflow_cells += 1;
        }
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    Ok(DirichletDraw {
        freqs: FrequencyVector::from_raw(w),
        underflow_cells,
    })
}

/// True frequencies for one run, with the underflow count from Dirichlet sampling.
pub fn draw_true_freqs_counted<R: Rng + ?Sized>(
    scenario: &ScenarioSpec,
    rng: &mut R,
) -> Result<DirichletDraw> {
    let p = scenario.p;
    match scenario.kind {
        ScenarioKind::DirichletSparse => sample_dirichlet(SPARSE_DIRICHLET_A, p, rng),
        ScenarioKind::DirichletUniform => sample_dirichlet(1.0, p, rng),
        ScenarioKind::HalfStructuralZeros => {
            let half = sample_dirichlet(1.0, p / 2, rng)?;
            let mut probs = half.freqs.into_vec();
            probs.resize(p, 0.0);
            Ok(DirichletDraw {
                freqs: FrequencyVector::from_raw(probs),
                underflow_cells: half.underflow_cells,
            })
        }
        ScenarioKind::ZipfPower { exponent } => {
            let w: Vec<f64> = (1..=p).map(|k| (k as f64).powf(-exponent)).collect();
            let total: f64 = w.iter().sum();
            Ok(DirichletDraw {
                freqs: FrequencyVector::from_raw(w.into_iter().map(|x| x / total).collect()),
                underflow_cells: 0,
            })
        }
    }
}

pub fn draw_true_freqs<R: Rng + ?Sized>(scenario: &ScenarioSpec, rng: &mut R) -> Result<FrequencyVector> {
    Ok(draw_true_freqs_counted(scenario, rng)?.freqs)
}

/// Multinomial draw of `n` items by sequential conditional binomials.
pub fn draw_counts<R: Rng + ?Sized>(theta: &FrequencyVector, n: u64, rng: &mut R) -> CountVector {
    let probs = theta.probs();
    let mut suffix = vec![0.0; probs.len() + 1];
    for k in (0..probs.len()).rev() {
        suffix[k] = suffix[k + 1] + probs[k];
    }
    let last = probs.iter().rposition(|&t| t > 0.0).unwrap_or(probs.len() - 1);
    let mut counts = vec![0u64; probs.len()];
    let mut left = n;
    for k in 0..probs.len() {
        if left == 0 {
            break;
        }
        if k == last {
            counts[k] = left;
            break;
        }
        if probs[k] <= 0.0 {
            continue;
        }
        let q = (probs[k] / suffix[k]).min(1.0);
        let y = if q >= 1.0 {
            left
        } else {
            Binomial::new(left, q).expect("q in [0, 1)").sample(rng)
        };
        counts[k] = y;
        left -= y;
    }
    CountVector::new(counts).expect("theta is nonempty")
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub scenarios: Vec<ScenarioSpec>,
    pub sample_sizes: Vec<u64>,
    pub runs: usize,
    pub estimators: Vec<EstimatorKind>,
    pub seed: u64,
    /// Worker threads; `Some(1)` runs serially, `None` uses the global pool.
    pub threads: Option<usize>,
}

/// The sample-size grid of the standard study.
pub const STANDARD_SAMPLE_SIZES: [u64; 7] = [10, 30, 100, 300, 1000, 3000, 10000];

impl BenchConfig {
    /// The standard study: four scenarios at `p = 1000`, seven sample sizes,
    /// eight estimators, 1000 runs per grid cell.
    pub fn standard(seed: u64) -> Result<Self> {
        Ok(Self {
            scenarios: ScenarioSpec::standard(1000)?,
            sample_sizes: STANDARD_SAMPLE_SIZES.to_vec(),
            runs: 1000,
            estimators: EstimatorKind::standard_set(),
            seed,
            threads: None,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(invalid("runs must be >= 1"));
        }
        if self.sample_sizes.contains(&0) {
            return Err(invalid("sample sizes must be >= 1"));
        }
        if self.threads == Some(0) {
            return Err(invalid("threads must be >= 1"));
        }
        Ok(())
    }
}

/// Aggregates for one (scenario, n, estimator) cell. Metrics are NaN when every run failed.
#[derive(Debug, Clone)]
pub struct CellResult {
    pub scenario: String,
    pub n: u64,
    pub estimator: String,
    /// Mean of `Σ_k (θ_k - θ̂_k)²`; `None` for estimators without frequencies.
    pub freq_mse: Option<f64>,
    pub entropy_mse: f64,
    pub entropy_bias: f64,
    pub runs_ok: usize,
    pub runs_failed: usize,
}

impl PartialEq for CellResult {
    /// Bitwise on the metrics, so NaN cells compare equal to themselves.
    fn eq(&self, o: &Self) -> bool {
        self.scenario == o.scenario
            && self.n == o.n
            && self.estimator == o.estimator
            && self.freq_mse.map(f64::to_bits) == o.freq_mse.map(f64::to_bits)
            && self.entropy_mse.to_bits() == o.entropy_mse.to_bits()
            && self.entropy_bias.to_bits() == o.entropy_bias.to_bits()
            && self.runs_ok == o.runs_ok
            && self.runs_failed == o.runs_failed
    }
}

/// True-entropy summary for one (scenario, n) grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthSummary {
    pub scenario: String,
    pub n: u64,
    pub mean_entropy: f64,
    pub underflow_cells: usize,
}

#[derive(Debug, Clone)]
pub struct BenchResult {
    pub seed: u64,
    pub runs: usize,
    pub cells: Vec<CellResult>,
    pub truth: Vec<TruthSummary>,
    /// Wall-clock time summed over runs, parallel to `cells`.
    pub timings: Vec<Duration>,
}

impl PartialEq for BenchResult {
    /// Timings are excluded.
    fn eq(&self, other: &Self) -> bool {
        self.seed == other.seed
            && self.runs == other.runs
            && self.cells == other.cells
            && self.truth == other.truth
    }
}

struct RunOutcome {
    true_entropy: f64,
    underflow: usize,
    // per estimator: Ok((sq freq error, entropy error)) or Err
    scores: Vec<std::result::Result<(Option<f64>, f64), ()>>,
    elapsed: Vec<Duration>,
}

fn one_run(
    scenario: &ScenarioSpec,
    n: u64,
    run: u64,
    config: &BenchConfig,
) -> Result<RunOutcome> {
    let mut rng = run_rng(config.seed, scenario, n, run);
    let draw = draw_true_freqs_counted(scenario, &mut rng)?;
    let theta = draw.freqs;
    let truth = entropy_plugin(&theta);
    let counts = draw_counts(&theta, n, &mut rng);
    let mut scores = Vec::with_capacity(config.estimators.len());
    let mut elapsed = Vec::with_capacity(config.estimators.len());
    for est in &config.estimators {
        let start = Instant::now();
        let score = score_estimator(est, &counts, &theta, truth);
        elapsed.push(start.elapsed());
        scores.push(score.map_err(|_| ()));
    }
    Ok(RunOutcome {
        true_entropy: truth,
        underflow: draw.underflow_cells,
        scores,
        elapsed,
    })
}

fn score_estimator(
    est: &EstimatorKind,
    counts: &CountVector,
    theta: &FrequencyVector,
    truth: f64,
) -> Result<(Option<f64>, f64)> {
    if est.produces_frequencies() {
        let f = est.frequencies(counts)?;
        let sq = theta
            .probs()
            .iter()
            .zip(f.probs())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        Ok((Some(sq), entropy_plugin(&f) - truth))
    } else {
        Ok((None, est.entropy(counts)? - truth))
    }
}

/// Runs the full grid.
pub fn run_bench(config: &BenchConfig) -> Result<BenchResult> {
    config.validate()?;
    match config.threads {
        Some(t) if t > 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Domain(e.to_string()))?
            .install(|| run_grid(config, true)),
        Some(_) => run_grid(config, false),
        None => run_grid(config, true),
    }
}

fn run_grid(config: &BenchConfig, parallel: bool) -> Result<BenchResult> {
    let mut cells = Vec::new();
    let mut truth = Vec::new();
    let mut timings = Vec::new();
    if config.estimators.is_empty() {
        return Ok(BenchResult {
            seed: config.seed,
            runs: config.runs,
            cells,
            truth,
            timings,
        });
    }
    for scenario in &config.scenarios {
        for &n in &config.sample_sizes {
            let run = |r: usize| one_run(scenario, n, r as u64, config);
            let outcomes: Vec<RunOutcome> = if parallel {
                (0..config.runs).into_par_iter().map(run).collect::<Result<_>>()?
            } else {
                (0..config.runs).map(run).collect::<Result<_>>()?
            };
            truth.push(TruthSummary {
                scenario: scenario.label(),
                n,
                mean_entropy: outcomes.iter().map(|o| o.true_entropy).sum::<f64>()
                    / outcomes.len() as f64,
                underflow_cells: outcomes.iter().map(|o| o.underflow).sum(),
            });
            for (e, est) in config.estimators.iter().enumerate() {
                let mut sq_freq = 0.0;
                let mut sq_h = 0.0;
                let mut sum_h = 0.0;
                let mut ok = 0usize;
                let mut time = Duration::ZERO;
                for o in &outcomes {
                    time += o.elapsed[e];
                    if let Ok((f, dh)) = o.scores[e] {
                        sq_freq += f.unwrap_or(0.0);
                        sq_h += dh * dh;
                        sum_h += dh;
                        ok += 1;
                    }
                }
                let denom = ok.max(1) as f64;
                let value = |s: f64| if ok == 0 { f64::NAN } else { s / denom };
                cells.push(CellResult {
                    scenario: scenario.label(),
                    n,
                    estimator: est.label(),
                    freq_mse: est.produces_frequencies().then(|| value(sq_freq)),
                    entropy_mse: value(sq_h),
                    entropy_bias: value(sum_h),
                    runs_ok: ok,
                    runs_failed: outcomes.len() - ok,
                });
                timings.push(time);
            }
        }
    }
    Ok(BenchResult {
        seed: config.seed,
        runs: config.runs,
        cells,
        truth,
        timings,
    })
}

impl BenchResult {
    pub fn cell(&self, scenario: &str, n: u64, estimator: &str) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.scenario == scenario && c.n == n && c.estimator == estimator)
    }
}

fn fmt12(v: f64) -> String {
    format!("{v:.11e}")
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReportOptions {
    /// Adds `seconds` rows with wall-clock totals. Makes the report nondeterministic.
    pub timing: bool,
}

/// Long-format CSV: `scenario,n,estimator,metric,value`, preceded by `#` lines
/// recording the seed and RNG algorithm. Values carry 12 significant digits.
pub fn write_report(result: &BenchResult) -> String {
    write_report_with(result, ReportOptions::default())
}

pub fn write_report_with(result: &BenchResult, options: ReportOptions) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# seed={}", result.seed);
    let _ = writeln!(out, "# rng={RNG_ALGORITHM}");
    let _ = writeln!(out, "# runs={}", result.runs);
    out.push_str("scenario,n,estimator,metric,value\n");
    for t in &result.truth {
        let _ = writeln!(out, "{},{},truth,mean_entropy,{}", t.scenario, t.n, fmt12(t.mean_entropy));
        if t.underflow_cells > 0 {
            let _ = writeln!(out, "{},{},truth,underflow_cells,{}", t.scenario, t.n, t.underflow_cells);
        }
    }
    for (c, time) in result.cells.iter().zip(&result.timings) {
        let prefix = format!("{},{},{}", c.scenario, c.n, c.estimator);
        if let Some(f) = c.freq_mse {
            let _ = writeln!(out, "{prefix},freq_mse,{}", fmt12(f));
        }
        let _ = writeln!(out, "{prefix},entropy_mse,{}", fmt12(c.entropy_mse));
        let _ = writeln!(out, "{prefix},entropy_bias,{}", fmt12(c.entropy_bias));
        if c.runs_failed > 0 {
            let _ = writeln!(out, "{prefix},failed_runs,{}", c.runs_failed);
        }
        if options.timing {
            let _ = writeln!(out, "{prefix},seconds,{}", fmt12(time.as_secs_f64()));
        }
    }
    out
}

/// One parsed data row of a report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub scenario: String,
    pub n: u64,
    pub estimator: String,
    pub metric: String,
    pub value: f64,
}

pub fn parse_report(text: &str) -> Result<Vec<ReportRow>> {
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() != 5 {
            return Err(Error::Format("report rows need five fields".into()));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Format(format!("bad number `{s}`")));
        rows.push(ReportRow {
            scenario: rec[0].to_string(),
            n: rec[1].parse().map_err(|_| Error::Format(format!("bad n `{}`", &rec[1])))?,
            estimator: rec[2].to_string(),
            metric: rec[3].to_string(),
            value: num(&rec[4])?,
        });
    }
    Ok(rows)
}
