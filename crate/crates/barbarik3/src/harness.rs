//! Benchmark descriptors, trial orchestration, and report emission.
//!
//! A benchmark is a JSON descriptor naming a distribution family and its
//! parameters. The harness builds the target P from the descriptor, derives
//! the sampler under test Q by applying a fault model, runs one or more
//! seeded test runs, and emits reports as JSON or CSV.
//!
//! Trial `i` of a run with base seed `s` is fully determined by `s + i`:
//! fault construction draws from stream 1 of that seed and the test run
//! itself from stream 0, so a sweep is reproducible end to end.

use std::path::Path;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::bucketing::compute_k;
use crate::distributions::{
    Assignment, DynDistribution, ExplicitDistribution, LogLinearDistribution,
    ProductDistribution, UnionOfProducts,
};
use crate::error::{Error, Result};
use crate::oracles::{
    make_faulty_sampler, DualOracle, FaultModel, PcondMode, SamplerUnderTest,
    DEFAULT_SAMPLER_BUDGET,
};
use crate::tester::{barbarik3, outside_sample_count, TestParams, TestReport, Verdict};

// ---------------------------------------------------------------------------
// Benchmark descriptors
// ---------------------------------------------------------------------------

/// A distribution family with its parameters, as stored in benchmark
/// descriptor files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum FamilyDescriptor {
    /// Mixture of an all-ones-forced block and a 3/4-weighted block over
    /// n = 3k+1 variables.
    UnionOfProducts { k: usize },
    /// Full probability table; assignments are fixed-width binary strings.
    Explicit { n: usize, table: Vec<(String, f64)> },
    /// Independent bits with per-bit marginals.
    Product { marginals: Vec<f64> },
    /// exp(Σ θ_i σ_i) / Z over the full cube.
    #[serde(rename = "loglinear")]
    LogLinear { theta: Vec<f64> },
}

impl FamilyDescriptor {
    pub fn family_name(&self) -> &'static str {
        match self {
            FamilyDescriptor::UnionOfProducts { .. } => "union_of_products",
            FamilyDescriptor::Explicit { .. } => "explicit",
            FamilyDescriptor::Product { .. } => "product",
            FamilyDescriptor::LogLinear { .. } => "loglinear",
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            FamilyDescriptor::UnionOfProducts { k } => 3 * k + 1,
            FamilyDescriptor::Explicit { n, .. } => *n,
            FamilyDescriptor::Product { marginals } => marginals.len(),
            FamilyDescriptor::LogLinear { theta } => theta.len(),
        }
    }

    pub fn build(&self) -> Result<DynDistribution> {
        match self {
            FamilyDescriptor::UnionOfProducts { k } => {
                Ok(std::sync::Arc::new(UnionOfProducts::new(*k)?))
            }
            FamilyDescriptor::Explicit { n, table } => {
                let entries: Result<Vec<(Assignment, f64)>> = table
                    .iter()
                    .map(|(bits, p)| Ok((Assignment::from_bit_str(bits)?, *p)))
                    .collect();
                Ok(std::sync::Arc::new(ExplicitDistribution::new(*n, entries?)?))
            }
            FamilyDescriptor::Product { marginals } => {
                Ok(std::sync::Arc::new(ProductDistribution::new(marginals.clone())?))
            }
            FamilyDescriptor::LogLinear { theta } => {
                Ok(std::sync::Arc::new(LogLinearDistribution::new(theta.clone())?))
            }
        }
    }
}

/// A benchmark: a family plus the seed associated with the instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkDescriptor {
    #[serde(flatten)]
    pub family: FamilyDescriptor,
    pub seed: u64,
}

impl BenchmarkDescriptor {
    pub fn label(&self) -> String {
        format!("{}_n{}", self.family.family_name(), self.family.dimension())
    }

    pub fn dimension(&self) -> usize {
        self.family.dimension()
    }

    pub fn build(&self) -> Result<DynDistribution> {
        self.family.build()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// One benchmark per requested dimension: the union-of-products family over
/// n = 3k+1 variables, with the dimension doubling as the instance seed.
pub fn generate_setting_a(n_list: &[usize]) -> Result<Vec<BenchmarkDescriptor>> {
    n_list
        .iter()
        .map(|&n| {
            if n < 4 || n % 3 != 1 {
                return Err(Error::InvalidParams(format!(
                    "dimension must be 3k+1 with k ≥ 1, got {n}"
                )));
            }
            Ok(BenchmarkDescriptor {
                family: FamilyDescriptor::UnionOfProducts { k: (n - 1) / 3 },
                seed: n as u64,
            })
        })
        .collect()
}

/// The default sweep: n = 4, 7, …, 118 — thirty-nine instances.
pub fn default_setting_a_dimensions() -> Vec<usize> {
    (0..39).map(|i| 4 + 3 * i).collect()
}

// ---------------------------------------------------------------------------
// Trial orchestration
// ---------------------------------------------------------------------------

/// Everything a sweep needs: the benchmark, the injected fault, test
/// parameters, seeding, and the sampler-query budget.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub descriptor: BenchmarkDescriptor,
    pub fault: FaultModel,
    pub params: TestParams,
    pub seed: u64,
    pub trials: u64,
    pub budget: u64,
    pub pcond_mode: PcondMode,
}

impl RunConfig {
    pub fn new(descriptor: BenchmarkDescriptor) -> Self {
        Self {
            descriptor,
            fault: FaultModel::Ideal,
            params: TestParams::default(),
            seed: 0,
            trials: 1,
            budget: DEFAULT_SAMPLER_BUDGET,
            pcond_mode: PcondMode::Exact,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.trials < 1 {
            return Err(Error::InvalidParams("trials must be at least 1".into()));
        }
        if self.budget < 1 {
            return Err(Error::InvalidParams("sampler budget must be at least 1".into()));
        }
        Ok(())
    }
}

/// Runs trial `index` of a config: builds fresh oracles, applies the fault
/// with stream-1 randomness of seed+index, and tests with seed+index.
pub fn run_single(config: &RunConfig, index: u64) -> Result<TestReport> {
    config.validate()?;
    let trial_seed = config.seed.wrapping_add(index);
    let p = config.descriptor.build()?;
    let mut fault_rng = ChaCha12Rng::seed_from_u64(trial_seed);
    fault_rng.set_stream(1);
    let q = make_faulty_sampler(&p, &config.fault, &mut fault_rng)?;
    let dual = DualOracle::new(p);
    let sampler = SamplerUnderTest::new(q)
        .with_mode(config.pcond_mode)
        .with_budget(config.budget);
    barbarik3(&dual, &sampler, &config.params, trial_seed)
}

/// Aggregate of a trial sweep. The three verdict counts always sum to
/// `trials`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialSummary {
    pub benchmark: String,
    pub n: usize,
    pub trials: u64,
    pub accepts: u64,
    pub rejects: u64,
    pub budget_exceeded: u64,
    pub mean_sampler_queries: f64,
    pub max_sampler_queries: u64,
    /// Informational; excluded from determinism comparisons.
    pub wall_clock_secs: f64,
    pub reports: Vec<TestReport>,
}

/// Runs `config.trials` independent tests with seeds seed, seed+1, ….
pub fn run_trials(config: &RunConfig) -> Result<TrialSummary> {
    config.validate()?;
    let start = std::time::Instant::now();
    let mut reports = Vec::with_capacity(config.trials as usize);
    for index in 0..config.trials {
        reports.push(run_single(config, index)?);
    }
    let mut accepts = 0;
    let mut rejects = 0;
    let mut budget_exceeded = 0;
    let mut total_queries = 0u64;
    let mut max_queries = 0u64;
    for r in &reports {
        match r.verdict {
            Verdict::Accept => accepts += 1,
            Verdict::Reject => rejects += 1,
            Verdict::BudgetExceeded => budget_exceeded += 1,
        }
        let q = r.ledger.samp_q + r.ledger.pcond;
        total_queries += q;
        max_queries = max_queries.max(q);
    }
    Ok(TrialSummary {
        benchmark: config.descriptor.label(),
        n: config.descriptor.dimension(),
        trials: config.trials,
        accepts,
        rejects,
        budget_exceeded,
        mean_sampler_queries: total_queries as f64 / config.trials as f64,
        max_sampler_queries: max_queries,
        wall_clock_secs: start.elapsed().as_secs_f64(),
        reports,
    })
}

// ---------------------------------------------------------------------------
// Sample-budget reporting
// ---------------------------------------------------------------------------

/// One row of the phase-1 budget table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleBudgetRow {
    pub n: usize,
    pub k: usize,
    /// Exact per-side sample count of the across-bucket phase.
    pub samples: u64,
    /// `samples` rounded up to the nearest 1000.
    pub rounded_to_thousand: u64,
}

/// The exact phase-1 per-side sample count for dimension n, without running
/// the test: k = compute_k(n, η), θ = η/20, confidence δ/2.
pub fn report_sample_budget(n: usize, eta: f64, delta: f64) -> Result<SampleBudgetRow> {
    // ε = 0 is always admissible; this validates η and δ alone.
    TestParams::new(0.0, eta, delta)?;
    let k = compute_k(n, eta);
    let samples = outside_sample_count(k, eta / 20.0, delta / 2.0);
    Ok(SampleBudgetRow { n, k, samples, rounded_to_thousand: samples.div_ceil(1000) * 1000 })
}

// ---------------------------------------------------------------------------
// CSV emission
// ---------------------------------------------------------------------------

pub const CSV_HEADER: &str = "benchmark,n,verdict,phase,d_hat,samp_q,pcond_q,samp_p,dual_q,seed";

/// One CSV row per report. `phase` is `none` for non-rejecting runs and
/// `d_hat` is empty when phase 1 did not finish.
pub fn csv_row(benchmark: &str, report: &TestReport) -> String {
    let phase = report
        .reject_phase
        .map(|p| p.to_string())
        .unwrap_or_else(|| "none".to_string());
    let d_hat = report.d_hat.map(|d| d.to_string()).unwrap_or_default();
    format!(
        "{benchmark},{n},{verdict},{phase},{d_hat},{samp_q},{pcond},{samp_p},{dual},{seed}",
        n = report.n,
        verdict = report.verdict,
        samp_q = report.ledger.samp_q,
        pcond = report.ledger.pcond,
        samp_p = report.ledger.samp_p,
        dual = report.ledger.dual_prob,
        seed = report.seed,
    )
}

/// The full CSV document for a sweep: header plus one row per trial.
pub fn csv_document(summary: &TrialSummary) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for report in &summary.reports {
        out.push_str(&csv_row(&summary.benchmark, report));
        out.push('\n');
    }
    out
}
