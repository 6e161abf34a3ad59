//! The sampler closeness test.
//!
//! Given dual access to a target P and SAMP+PCOND access to a sampler Q over
//! {0,1}^n, [`barbarik3`] decides between
//!
//! - **Accept** when the multiplicative distance d∞(P,Q) is at most ε, and
//! - **Reject** when the total-variation distance d_TV(P,Q) exceeds η,
//!
//! each with probability at least 1 − δ. Instances between the two
//! thresholds may be answered either way.
//!
//! The test runs in two phases over the dyadic bucketing of P:
//!
//! 1. **Across buckets** ([`outside_bucket`]): estimate the TV distance
//!    between the two bucket-index distributions to within θ = η/20 by
//!    drawing enough samples from each side, and reject if the estimate is
//!    already incompatible with closeness.
//! 2. **Within buckets** ([`inside_bucket`]): repeatedly partition fresh
//!    samples from both sides by bucket; whenever a bucket is hit from both
//!    sides, pick one sample from each and estimate the conditional
//!    probability Q(p)/(Q(p)+Q(q)) with PCOND queries ([`bias`]). A close
//!    sampler keeps that bias above a threshold derived from the exact
//!    probabilities P(p), P(q); an estimate at or below the midpoint between
//!    the close and far thresholds is a witness for rejection.
//!
//! All randomness flows from a single seed, so a report is a deterministic
//! function of (target, sampler, parameters, seed).

use std::time::Instant;

use rand::{Rng, RngCore};
use rand_chacha::ChaCha12Rng;
use rand_chacha::rand_core::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::bucketing::{bucket_of_prob, compute_k, BucketDistribution, BucketHistogram, BucketingContext, sample_bucket};
use crate::distributions::Assignment;
use crate::error::{Error, Result};
use crate::oracles::{DualOracle, LedgerCounts, QueryLedger, SampSource, SamplerUnderTest};

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

/// Closeness/farness thresholds and failure probability.
///
/// Admissible ranges: 0 ≤ ε < η/11.6, η ∈ (0,1], δ ∈ (0, 0.5].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestParams {
    /// Multiplicative closeness threshold ε.
    pub epsilon: f64,
    /// Total-variation farness threshold η.
    pub eta: f64,
    /// Failure probability δ.
    pub delta: f64,
}

impl TestParams {
    pub fn new(epsilon: f64, eta: f64, delta: f64) -> Result<Self> {
        let params = Self { epsilon, eta, delta };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { epsilon, eta, delta } = *self;
        if !eta.is_finite() || eta <= 0.0 || eta > 1.0 {
            return Err(Error::InvalidParams(format!(
                "farness threshold eta must lie in (0,1], got {eta}"
            )));
        }
        if !delta.is_finite() || delta <= 0.0 || delta > 0.5 {
            return Err(Error::InvalidParams(format!(
                "failure probability delta must lie in (0,0.5], got {delta}"
            )));
        }
        if !epsilon.is_finite() || epsilon < 0.0 || epsilon >= eta / 11.6 {
            return Err(Error::InvalidParams(format!(
                "closeness threshold epsilon must satisfy 0 ≤ epsilon < eta/11.6 \
                 (= {}), got {epsilon}",
                eta / 11.6
            )));
        }
        Ok(())
    }
}

impl Default for TestParams {
    fn default() -> Self {
        Self { epsilon: 0.05, eta: 0.9, delta: 0.2 }
    }
}

/// Parameters of the within-bucket phase, derived from (ε, ε₂, η, δ, k).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InsideParams {
    /// Separation parameter ε₁.
    pub epsilon1: f64,
    /// Far-side threshold parameter α = (ε₁ + 2ε/(1−ε)) / 2.
    pub alpha: f64,
    /// Samples drawn per side per iteration.
    pub m: u64,
    /// Number of iterations.
    pub t: u64,
}

/// Derives the within-bucket parameters.
///
/// ε₁ = (0.99η − 3.25ε₂ − 2ε/(1−ε)) / 1.05 + 2ε/(1−ε),
/// m = ⌈√k / (0.99η − 3.25ε₂ − ε₁)⌉,
/// α = (ε₁ + 2ε/(1−ε)) / 2,
/// t = ⌈ln(4/δ) / ln(10/(10 − ε₁ + α))⌉.
///
/// Fails when 0.99η − 3.25ε₂ leaves no room above 2ε/(1−ε); admissible
/// top-level parameters always leave room for every reachable ε₂.
pub fn derive_inside_params(
    epsilon: f64,
    epsilon2: f64,
    eta: f64,
    delta: f64,
    k: usize,
) -> Result<InsideParams> {
    if !(epsilon >= 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParams(format!("epsilon must lie in [0,1), got {epsilon}")));
    }
    if !(epsilon2 >= 0.0) || !epsilon2.is_finite() {
        return Err(Error::InvalidParams(format!("epsilon2 must be non-negative, got {epsilon2}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParams(format!("delta must lie in (0,1), got {delta}")));
    }
    if k == 0 {
        return Err(Error::InvalidParams("bucket count k must be positive".into()));
    }
    let g = 2.0 * epsilon / (1.0 - epsilon);
    let headroom = 0.99 * eta - 3.25 * epsilon2 - g;
    if headroom <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "across-bucket distance estimate leaves no separation: \
             0.99·{eta} − 3.25·{epsilon2} − {g} = {headroom}"
        )));
    }
    let epsilon1 = headroom / 1.05 + g;
    let alpha = (epsilon1 + g) / 2.0;
    let denom = 0.99 * eta - 3.25 * epsilon2 - epsilon1;
    debug_assert!(denom > 0.0, "positive headroom implies a positive m denominator");
    let m = ((k as f64).sqrt() / denom).ceil() as u64;
    let t = ((4.0 / delta).ln() / (10.0 / (10.0 - epsilon1 + alpha)).ln()).ceil() as u64;
    Ok(InsideParams { epsilon1, alpha, m, t })
}

/// Close/far bias thresholds for a pair with target probabilities
/// (p_p, p_q): h = p_p/(p_p + p_q·(1 + 2ε/(1−ε))), ℓ = p_p/(p_p + p_q·(1+α)).
pub fn pair_thresholds(p_p: f64, p_q: f64, epsilon: f64, alpha: f64) -> (f64, f64) {
    let g = 2.0 * epsilon / (1.0 - epsilon);
    let h = p_p / (p_p + p_q * (1.0 + g));
    let l = p_p / (p_p + p_q * (1.0 + alpha));
    (h, l)
}

/// PCOND queries needed to separate the thresholds (h, ℓ) with per-pair
/// failure probability δ/(4mt): r = ⌈2·ln(4mt/δ) / (h−ℓ)²⌉.
pub fn bias_trial_count(h: f64, l: f64, m: u64, t: u64, delta: f64) -> u64 {
    assert!(h > l, "close threshold must exceed far threshold, got h={h}, l={l}");
    let gap = h - l;
    (2.0 * (4.0 * m as f64 * t as f64 / delta).ln() / (gap * gap)).ceil() as u64
}

/// Per-side sample count of the across-bucket phase:
/// ⌈max(4(k+1)/θ², 8·ln(4/δ)/θ²)⌉.
pub fn outside_sample_count(k: usize, theta: f64, delta: f64) -> u64 {
    let t2 = theta * theta;
    let learning = 4.0 * (k as f64 + 1.0) / t2;
    let tail = 8.0 * (4.0 / delta).ln() / t2;
    let raw = learning.max(tail);
    // Rational quantities like 4(k+1)·400/η² pick up float noise of relative
    // size ~1e-16; snap before ceiling so an exact integer stays itself.
    let snapped = raw.round();
    let n = if (raw - snapped).abs() <= 1e-9 * raw.max(1.0) { snapped } else { raw.ceil() };
    n as u64
}

// ---------------------------------------------------------------------------
// Across-bucket phase
// ---------------------------------------------------------------------------

/// A stream of bucket indices: an oracle being bucketed, or a synthetic
/// bucket distribution in reference checks.
pub trait BucketSource {
    fn draw_bucket(&mut self, rng: &mut dyn RngCore) -> Result<usize>;
}

/// Buckets draws from a SAMP source against the target's dual oracle.
pub struct OracleBucketSource<'a> {
    ctx: &'a BucketingContext<'a>,
    source: &'a dyn SampSource,
    ledger: &'a QueryLedger,
}

impl<'a> OracleBucketSource<'a> {
    pub fn new(
        ctx: &'a BucketingContext<'a>,
        source: &'a dyn SampSource,
        ledger: &'a QueryLedger,
    ) -> Self {
        Self { ctx, source, ledger }
    }
}

impl BucketSource for OracleBucketSource<'_> {
    fn draw_bucket(&mut self, rng: &mut dyn RngCore) -> Result<usize> {
        sample_bucket(self.ctx, self.source, rng, self.ledger)
    }
}

impl BucketSource for BucketDistribution {
    fn draw_bucket(&mut self, rng: &mut dyn RngCore) -> Result<usize> {
        Ok(self.sample(rng))
    }
}

/// Builds the empirical distribution of a batch of bucket samples.
pub fn empirical_distribution(samples: &[usize], k: usize) -> Result<BucketHistogram> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut hist = BucketHistogram::new(k);
    for &s in samples {
        if s > k {
            return Err(Error::InvalidParams(format!(
                "bucket index {s} out of range 0..={k}"
            )));
        }
        hist.record(s);
    }
    Ok(hist)
}

/// Estimates the TV distance between two bucket-index distributions to
/// within θ (with probability ≥ 1 − δ) by drawing
/// max(4(k+1)/θ², 8·ln(4/δ)/θ²) samples from each side and returning the
/// exact TV distance between the two empirical distributions.
pub fn outside_bucket(
    bp: &mut dyn BucketSource,
    bq: &mut dyn BucketSource,
    k: usize,
    theta: f64,
    delta: f64,
    rng: &mut dyn RngCore,
) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidParams(format!("theta must lie in (0,1), got {theta}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParams(format!("delta must lie in (0,1), got {delta}")));
    }
    let n = outside_sample_count(k, theta, delta);
    let mut hist_p = BucketHistogram::new(k);
    for _ in 0..n {
        hist_p.record(bp.draw_bucket(rng)?);
    }
    let mut hist_q = BucketHistogram::new(k);
    for _ in 0..n {
        hist_q.record(bq.draw_bucket(rng)?);
    }
    hist_p.tv_distance(&hist_q)
}

// ---------------------------------------------------------------------------
// Within-bucket phase
// ---------------------------------------------------------------------------

/// Estimates the conditional probability Q(a)/(Q(a)+Q(b)) from r PCOND
/// draws. An identical pair is trivially unbiased: returns 0.5 without
/// spending any queries.
pub fn bias(
    q: &SamplerUnderTest,
    a: &Assignment,
    b: &Assignment,
    r: u64,
    rng: &mut dyn RngCore,
    ledger: &QueryLedger,
) -> Result<f64> {
    if a == b {
        return Ok(0.5);
    }
    if r == 0 {
        return Err(Error::InvalidParams("bias estimation needs at least one draw".into()));
    }
    let mut hits = 0u64;
    for _ in 0..r {
        if q.pcond(a, b, rng, ledger)? == *a {
            hits += 1;
        }
    }
    Ok(hits as f64 / r as f64)
}

/// The rejecting pair of a within-bucket iteration, kept as evidence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairEvidence {
    /// Iteration (1-based) in which the rejection fired.
    pub iteration: u64,
    /// Bucket index shared by the pair.
    pub bucket: usize,
    /// Target-side assignment.
    pub p: String,
    /// Sampler-side assignment.
    pub q: String,
    pub p_prob: f64,
    pub q_prob: f64,
    pub h: f64,
    pub l: f64,
    pub r: u64,
    pub c_hat: f64,
}

/// Outcome of the within-bucket phase.
#[derive(Clone, Debug, PartialEq)]
pub struct InsideOutcome {
    pub accepted: bool,
    pub params: InsideParams,
    /// Iterations actually executed (equals `params.t` on acceptance).
    pub iterations: u64,
    pub evidence: Option<PairEvidence>,
}

/// Runs the within-bucket phase: t iterations of m samples per side,
/// pair-bias checks in every bucket hit from both sides.
#[allow(clippy::too_many_arguments)]
pub fn inside_bucket(
    dual: &DualOracle,
    sampler: &SamplerUnderTest,
    k: usize,
    epsilon: f64,
    epsilon2: f64,
    eta: f64,
    delta: f64,
    rng: &mut dyn RngCore,
    ledger: &QueryLedger,
) -> Result<InsideOutcome> {
    let params = derive_inside_params(epsilon, epsilon2, eta, delta, k)?;
    let mut bins_p: Vec<Vec<(Assignment, f64)>> = vec![Vec::new(); k + 1];
    let mut bins_q: Vec<Vec<(Assignment, f64)>> = vec![Vec::new(); k + 1];
    for iteration in 1..=params.t {
        for bin in bins_p.iter_mut().chain(bins_q.iter_mut()) {
            bin.clear();
        }
        for _ in 0..params.m {
            let a = dual.sample(rng, ledger);
            let p = dual.prob(&a, ledger)?;
            bins_p[bucket_of_prob(p, k)].push((a, p));
        }
        for _ in 0..params.m {
            let a = sampler.samp(rng, ledger)?;
            let p = dual.prob(&a, ledger)?;
            bins_q[bucket_of_prob(p, k)].push((a, p));
        }
        // Bucket 0 collects the target's negligible tail; pairs are only
        // examined in the real buckets 1..=k.
        for bucket in 1..=k {
            if bins_p[bucket].is_empty() || bins_q[bucket].is_empty() {
                continue;
            }
            let (pa, p_prob) = bins_p[bucket][rng.gen_range(0..bins_p[bucket].len())];
            let (qa, q_prob) = bins_q[bucket][rng.gen_range(0..bins_q[bucket].len())];
            let (h, l) = pair_thresholds(p_prob, q_prob, epsilon, params.alpha);
            let r = bias_trial_count(h, l, params.m, params.t, delta);
            let c_hat = bias(sampler, &pa, &qa, r, rng, ledger)?;
            if c_hat <= (h + l) / 2.0 {
                return Ok(InsideOutcome {
                    accepted: false,
                    params,
                    iterations: iteration,
                    evidence: Some(PairEvidence {
                        iteration,
                        bucket,
                        p: pa.to_bit_str(),
                        q: qa.to_bit_str(),
                        p_prob,
                        q_prob,
                        h,
                        l,
                        r,
                        c_hat,
                    }),
                });
            }
        }
    }
    Ok(InsideOutcome { accepted: true, params, iterations: params.t, evidence: None })
}

// ---------------------------------------------------------------------------
// The full test
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accept,
    Reject,
    /// The sampler-query budget ran out before a verdict was reached.
    BudgetExceeded,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Accept => write!(f, "accept"),
            Verdict::Reject => write!(f, "reject"),
            Verdict::BudgetExceeded => write!(f, "budget_exceeded"),
        }
    }
}

/// Which phase produced a rejection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectPhase {
    Outside,
    Inside,
}

impl std::fmt::Display for RejectPhase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RejectPhase::Outside => write!(f, "outside"),
            RejectPhase::Inside => write!(f, "inside"),
        }
    }
}

/// Everything a single run decides and measures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub verdict: Verdict,
    /// `None` for accepting or budget-limited runs.
    pub reject_phase: Option<RejectPhase>,
    pub n: usize,
    pub k: usize,
    /// Across-bucket estimation accuracy θ = η/20.
    pub theta: f64,
    /// Across-bucket distance estimate (absent if the budget ran out first).
    pub d_hat: Option<f64>,
    /// ε₂ = d̂ + θ, the across-bucket allowance fed to the within phase.
    pub epsilon2: Option<f64>,
    /// Derived within-bucket parameters, when that phase was configured.
    pub inside: Option<InsideParams>,
    /// Within-bucket iterations executed.
    pub inside_iterations: u64,
    /// The rejecting pair, for inside-phase rejections.
    pub evidence: Option<PairEvidence>,
    pub params: TestParams,
    pub budget: u64,
    pub seed: u64,
    pub ledger: LedgerCounts,
    /// Wall-clock seconds; informational only, excluded from determinism
    /// comparisons.
    pub wall_clock_secs: f64,
}

/// Runs the full closeness test: bucket the space, estimate the
/// across-bucket distance, then probe within buckets. All randomness is
/// derived from `seed`; identical inputs yield identical reports (up to
/// wall-clock time).
pub fn barbarik3(
    dual: &DualOracle,
    sampler: &SamplerUnderTest,
    params: &TestParams,
    seed: u64,
) -> Result<TestReport> {
    params.validate()?;
    let n = dual.dimension();
    if sampler.dimension() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: sampler.dimension() });
    }
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let k = compute_k(n, params.eta);
    let theta = params.eta / 20.0;
    let ledger = QueryLedger::new();
    let ctx = BucketingContext::new(dual, k);

    let report = |verdict: Verdict,
                  reject_phase: Option<RejectPhase>,
                  d_hat: Option<f64>,
                  epsilon2: Option<f64>,
                  inside: Option<InsideParams>,
                  inside_iterations: u64,
                  evidence: Option<PairEvidence>,
                  ledger: &QueryLedger,
                  start: Instant| TestReport {
        verdict,
        reject_phase,
        n,
        k,
        theta,
        d_hat,
        epsilon2,
        inside,
        inside_iterations,
        evidence,
        params: *params,
        budget: sampler.budget(),
        seed,
        ledger: ledger.snapshot(),
        wall_clock_secs: start.elapsed().as_secs_f64(),
    };

    // Phase 1: across-bucket distance estimate, accurate to θ w.p. ≥ 1−δ/2.
    let mut bp = OracleBucketSource::new(&ctx, dual, &ledger);
    let mut bq = OracleBucketSource::new(&ctx, sampler, &ledger);
    let d_hat = match outside_bucket(&mut bp, &mut bq, k, theta, params.delta / 2.0, &mut rng) {
        Ok(d) => d,
        Err(Error::BudgetExhausted { .. }) => {
            return Ok(report(
                Verdict::BudgetExceeded,
                None,
                None,
                None,
                None,
                0,
                None,
                &ledger,
                start,
            ))
        }
        Err(e) => return Err(e),
    };
    if d_hat > params.epsilon / 2.0 + theta {
        return Ok(report(
            Verdict::Reject,
            Some(RejectPhase::Outside),
            Some(d_hat),
            None,
            None,
            0,
            None,
            &ledger,
            start,
        ));
    }

    // Phase 2: within-bucket pair biases, failure probability δ/2.
    let epsilon2 = d_hat + theta;
    match inside_bucket(
        dual,
        sampler,
        k,
        params.epsilon,
        epsilon2,
        params.eta,
        params.delta / 2.0,
        &mut rng,
        &ledger,
    ) {
        Ok(outcome) => {
            let verdict = if outcome.accepted { Verdict::Accept } else { Verdict::Reject };
            let phase = if outcome.accepted { None } else { Some(RejectPhase::Inside) };
            Ok(report(
                verdict,
                phase,
                Some(d_hat),
                Some(epsilon2),
                Some(outcome.params),
                outcome.iterations,
                outcome.evidence,
                &ledger,
                start,
            ))
        }
        Err(Error::BudgetExhausted { .. }) => {
            let inside =
                derive_inside_params(params.epsilon, epsilon2, params.eta, params.delta / 2.0, k)
                    .ok();
            Ok(report(
                Verdict::BudgetExceeded,
                None,
                Some(d_hat),
                Some(epsilon2),
                inside,
                0,
                None,
                &ledger,
                start,
            ))
        }
        Err(e) => Err(e),
    }
}
