//! Monte Carlo coverage and content study.
//!
//! Each (distribution, n) cell gets a key derived from its label and size, and
//! replication `r` of that cell draws from streams keyed by `(purpose, cell, r)`.
//! Results therefore do not depend on the order of the configuration lists
//! or on the number of worker threads.

use std::io::Write;

use mediancr_core::classical::{bootstrap_medians, AccelerationFormula};
use mediancr_core::dist::DistributionSpec;
use mediancr_core::method::{evaluate, Method, MethodInputs};
use mediancr_core::rng::{RngStream, StreamKey};
use mediancr_core::{Error, RandomizerDraw, SortedSample};
use rayon::prelude::*;

use crate::format::fmt_sig10;

/// Stream purposes. Randomizers use `PURPOSE_RANDOMIZER_BASE + method id`.
pub const PURPOSE_DATA: u64 = 1;
pub const PURPOSE_BOOTSTRAP: u64 = 2;
pub const PURPOSE_JITTER: u64 = 3;
pub const PURPOSE_RANDOMIZER_BASE: u64 = 100;

pub const CSV_HEADER: [&str; 12] = [
    "method",
    "dist",
    "n",
    "alpha",
    "reps",
    "breps",
    "coverage",
    "mc_se",
    "mean_content",
    "std_content",
    "infinite_count",
    "failures",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub distributions: Vec<DistributionSpec>,
    pub sample_sizes: Vec<usize>,
    pub alpha: f64,
    pub reps: usize,
    pub breps: usize,
    pub methods: Vec<Method>,
    pub master_seed: u64,
    /// Worker threads; 0 lets the thread pool decide.
    pub workers: usize,
    pub acceleration: AccelerationFormula,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid simulation configuration: {}", .0.join("; "))]
pub struct ConfigError(pub Vec<String>);

impl SimConfig {
    /// Lists every problem with the configuration at once.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut problems = Vec::new();
        if self.distributions.is_empty() {
            problems.push("no distributions given".to_string());
        }
        for d in &self.distributions {
            if let Err(e) = d.validate() {
                problems.push(format!("{d}: {e}"));
            }
        }
        if self.sample_sizes.is_empty() {
            problems.push("no sample sizes given".to_string());
        }
        if let Some(n) = self.sample_sizes.iter().find(|&&n| n < 3) {
            problems.push(format!("sample sizes must be at least 3, got {n}"));
        }
        if let Some(n) = self.sample_sizes.iter().find(|&&n| n > mediancr_core::binom::MAX_N) {
            problems.push(format!("sample sizes are supported up to {}, got {n}", mediancr_core::binom::MAX_N));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            problems.push(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if self.reps == 0 {
            problems.push("reps must be at least 1".to_string());
        }
        if self.methods.is_empty() {
            problems.push("no methods given".to_string());
        }
        if self.methods.iter().any(|m| m.is_bootstrap()) && self.breps < 2 {
            problems.push(format!("bootstrap methods need breps >= 2, got {}", self.breps));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(ConfigError(problems))
        }
    }
}

/// Short label for a distribution: the family name for the study
/// parameterization, the full `family(params)` form otherwise.
pub fn dist_label(dist: &DistributionSpec) -> String {
    match DistributionSpec::default_for(dist.family()) {
        Ok(d) if d == *dist => dist.family().to_string(),
        _ => dist.to_string(),
    }
}

/// FNV-1a over the cell label; stable across platforms and releases.
pub fn cell_key(dist: &DistributionSpec, n: usize) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in format!("{dist}|{n}").bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// The streams one replication draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplicationKey {
    pub master_seed: u64,
    pub cell: u64,
    pub index: u64,
}

impl ReplicationKey {
    pub fn stream(&self, purpose: u64) -> RngStream {
        RngStream::new(self.master_seed, StreamKey::new(purpose, self.cell, self.index))
    }

    /// The single randomizer draw for a randomized method.
    pub fn randomizer(&self, method: Method) -> RandomizerDraw {
        let u = self.stream(PURPOSE_RANDOMIZER_BASE + method.id() as u64).uniform();
        RandomizerDraw::new(u).expect("uniform lies in (0, 1)")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodOutcome {
    pub method: Method,
    /// `(covered, content)` or the reason the method could not run.
    pub result: Result<(bool, f64), Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Replication {
    /// The sample every method saw, in draw order.
    pub sample: Vec<f64>,
    pub outcomes: Vec<MethodOutcome>,
}

/// Draws one sample and evaluates every requested method on it.
///
/// Bootstrap methods share one resampling distribution; each randomized method
/// gets its own randomizer stream.
pub fn replicate(
    dist: &DistributionSpec,
    n: usize,
    alpha: f64,
    methods: &[Method],
    breps: usize,
    acceleration: AccelerationFormula,
    key: ReplicationKey,
) -> Result<Replication, Error> {
    let raw = dist.sample(n, &mut key.stream(PURPOSE_DATA))?;
    let sample = SortedSample::new(&raw)?;
    let truth = dist.true_median();
    let boot = if methods.iter().any(|m| m.is_bootstrap()) {
        Some(bootstrap_medians(&sample, breps, &mut key.stream(PURPOSE_BOOTSTRAP))?)
    } else {
        None
    };
    let outcomes = methods
        .iter()
        .map(|&method| {
            let inputs = MethodInputs {
                boot: boot.as_ref(),
                u: method.is_randomized().then(|| key.randomizer(method)),
                acceleration,
            };
            let result = evaluate(method, &sample, alpha, &inputs)
                .map(|out| (out.region.contains(truth), out.region.content()));
            MethodOutcome { method, result }
        })
        .collect();
    Ok(Replication { sample: raw, outcomes })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub method: Method,
    pub dist: String,
    pub n: usize,
    pub alpha: f64,
    pub reps: usize,
    pub breps: usize,
    /// Over replications where the method ran; NaN when it never did.
    pub coverage: f64,
    pub mc_se: f64,
    /// Mean of the finite contents.
    pub mean_content: f64,
    /// `mean_content * sqrt(n)`.
    pub std_content: f64,
    pub infinite_count: usize,
    pub failures: usize,
}

impl SimResult {
    pub fn csv_record(&self) -> [String; 12] {
        [
            self.method.id().to_string(),
            self.dist.clone(),
            self.n.to_string(),
            fmt_sig10(self.alpha),
            self.reps.to_string(),
            self.breps.to_string(),
            fmt_sig10(self.coverage),
            fmt_sig10(self.mc_se),
            fmt_sig10(self.mean_content),
            fmt_sig10(self.std_content),
            self.infinite_count.to_string(),
            self.failures.to_string(),
        ]
    }
}

#[derive(Default)]
struct Tally {
    ran: usize,
    covered: usize,
    finite: usize,
    content_sum: f64,
    infinite: usize,
    failures: usize,
}

fn summarize(config: &SimConfig, dist: &DistributionSpec, n: usize, reps: &[Replication]) -> Vec<SimResult> {
    let mut tallies: Vec<Tally> = config.methods.iter().map(|_| Tally::default()).collect();
    for rep in reps {
        for (t, o) in tallies.iter_mut().zip(&rep.outcomes) {
            match o.result {
                Ok((covered, content)) => {
                    t.ran += 1;
                    t.covered += covered as usize;
                    if content.is_finite() {
                        t.finite += 1;
                        t.content_sum += content;
                    } else {
                        t.infinite += 1;
                    }
                }
                Err(_) => t.failures += 1,
            }
        }
    }
    config
        .methods
        .iter()
        .zip(tallies)
        .map(|(&method, t)| {
            let coverage = t.covered as f64 / t.ran as f64;
            let mean_content = t.content_sum / t.finite as f64;
            SimResult {
                method,
                dist: dist_label(dist),
                n,
                alpha: config.alpha,
                reps: config.reps,
                breps: config.breps,
                coverage,
                mc_se: (coverage * (1.0 - coverage) / t.ran as f64).sqrt(),
                mean_content,
                std_content: mean_content * (n as f64).sqrt(),
                infinite_count: t.infinite,
                failures: t.failures,
            }
        })
        .collect()
}

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{dist}, n = {n}: {source}")]
    Sampling {
        dist: String,
        n: usize,
        #[source]
        source: Error,
    },
    #[error("cannot start worker threads: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

fn run_cell(config: &SimConfig, dist: &DistributionSpec, n: usize) -> Result<Vec<SimResult>, SimError> {
    let cell = cell_key(dist, n);
    let reps = (0..config.reps as u64)
        .into_par_iter()
        .map(|index| {
            let key = ReplicationKey { master_seed: config.master_seed, cell, index };
            replicate(dist, n, config.alpha, &config.methods, config.breps, config.acceleration, key)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|source| SimError::Sampling { dist: dist_label(dist), n, source })?;
    Ok(summarize(config, dist, n, &reps))
}

/// Runs every (distribution, n) cell; rows come out in configuration order,
/// distributions outermost, then sizes, then methods.
pub fn run_simulation(config: &SimConfig) -> Result<Vec<SimResult>, SimError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(config.workers).build()?;
    pool.install(|| {
        let mut rows = Vec::new();
        for dist in &config.distributions {
            for &n in &config.sample_sizes {
                rows.extend(run_cell(config, dist, n)?);
            }
        }
        Ok(rows)
    })
}

pub fn write_csv<W: Write>(results: &[SimResult], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in results {
        w.write_record(r.csv_record())?;
    }
    w.flush()?;
    Ok(())
}
