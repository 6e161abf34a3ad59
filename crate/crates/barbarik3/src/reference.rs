//! Independent reference computations and property suites.
//!
//! Everything here recomputes a quantity the test relies on by a slower,
//! more obviously correct route — exhaustive enumeration, linear scans,
//! closed-form bounds — so the fast paths can be checked against it. The
//! `check` CLI subcommand and the acceptance suite both run the shipped
//! suites with fixed seeds.

use rand::{Rng, RngCore};
use rand_chacha::ChaCha12Rng;
use rand_chacha::rand_core::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::bucketing::{bucket_of_prob, exp2i, BucketDistribution, BucketHistogram};
use crate::distributions::{
    mult_distance, tv_distance, tv_distance_within, Assignment, Distribution, DynDistribution,
    ExplicitDistribution,
};
use crate::error::{Error, Result};
use crate::oracles::{make_faulty_sampler, FaultModel};

/// Seed of the shipped property suites. Fixed so that `check` output is
/// reproducible from a clean checkout.
pub const DEFAULT_SUITE_SEED: u64 = 1789;

// ---------------------------------------------------------------------------
// Reference oracles
// ---------------------------------------------------------------------------

/// The exact bucket distribution B_P of an enumerable distribution,
/// computed point by point.
pub fn bruteforce_bucket_distribution(
    dist: &dyn Distribution,
    k: usize,
) -> Result<BucketDistribution> {
    let mut probs = vec![0.0; k + 1];
    let mut mass = 0.0;
    for a in dist.support()? {
        let p = dist.prob(&a)?;
        probs[bucket_of_prob(p, k)] += p;
        mass += p;
    }
    // Distributions carry all their mass on their support; guard against
    // float crumbs so BucketDistribution's sum check stays happy.
    if mass < 1.0 {
        probs[0] += 1.0 - mass;
    }
    BucketDistribution::new(probs)
}

/// Bucket lookup by scanning the k+1 intervals one by one — the slow
/// counterpart of [`bucket_of_prob`]'s logarithm-seeded search.
pub fn bucket_index_linear_scan(p: f64, k: usize) -> usize {
    if !(p > 0.0) {
        return 0;
    }
    for i in 1..=k {
        if exp2i(-(i as i32)) < p && p <= exp2i(-(i as i32) + 1) {
            return i;
        }
    }
    0
}

// ---------------------------------------------------------------------------
// Property checks
// ---------------------------------------------------------------------------

/// Outcome of a property check: a single instance or an aggregated suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyCheckResult {
    pub name: String,
    pub trials: u64,
    pub violations: u64,
    /// The extreme value observed — minimum slack for inequality checks,
    /// the pass rate for statistical checks.
    pub worst: f64,
    pub passed: bool,
    pub detail: String,
}

impl PropertyCheckResult {
    fn single(name: &str, passed: bool, worst: f64, detail: String) -> Self {
        Self {
            name: name.to_string(),
            trials: 1,
            violations: u64::from(!passed),
            worst,
            passed,
            detail,
        }
    }
}

impl std::fmt::Display for PropertyCheckResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{:<24} {}  trials={} violations={} worst={:+.3e}  {}",
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.trials,
            self.violations,
            self.worst,
            self.detail
        )
    }
}

/// Verifies the overlap lower bound on a subset S:
///
///   Σ_{σ∈S} D1(σ)·D2(σ) ≥ (D1(S) + D2(S) − 2·d_TV^S(D1,D2))² / (4|S|),
///
/// where d_TV^S is the TV distance restricted to S. The slack is zero
/// exactly when D1 = D2 is uniform on S.
pub fn check_overlap_bound(
    d1: &dyn Distribution,
    d2: &dyn Distribution,
    subset: &[Assignment],
) -> Result<PropertyCheckResult> {
    if subset.is_empty() {
        return Err(Error::InvalidParams("overlap bound needs a nonempty subset".into()));
    }
    let distinct: std::collections::HashSet<&Assignment> = subset.iter().collect();
    if distinct.len() != subset.len() {
        return Err(Error::InvalidParams("overlap bound subset contains duplicates".into()));
    }
    let mut lhs = 0.0;
    let mut mass1 = 0.0;
    let mut mass2 = 0.0;
    for a in subset {
        let p1 = d1.prob(a)?;
        let p2 = d2.prob(a)?;
        lhs += p1 * p2;
        mass1 += p1;
        mass2 += p2;
    }
    let tv_s = tv_distance_within(d1, d2, subset)?;
    let numerator = mass1 + mass2 - 2.0 * tv_s;
    let bound = numerator * numerator / (4.0 * subset.len() as f64);
    let slack = lhs - bound;
    Ok(PropertyCheckResult::single(
        "overlap_lower_bound",
        slack >= -1e-12,
        slack,
        format!("|S|={} lhs={lhs:.6e} bound={bound:.6e}", subset.len()),
    ))
}

/// Verifies the close-side threshold inequality: whenever d∞(P,Q) < ε,
/// every ordered support pair (p,q) satisfies
///
///   Q(p)/(Q(p)+Q(q)) ≥ P(p)/(P(p) + (1 + 2ε/(1−ε))·P(q)).
///
/// For ε = 0 the hypothesis forces Q = P and the inequality holds with
/// equality, so the precondition is d∞ = 0 in that case.
pub fn check_threshold_prop(
    p: &dyn Distribution,
    q: &dyn Distribution,
    epsilon: f64,
) -> Result<PropertyCheckResult> {
    if !(epsilon >= 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParams(format!("epsilon must lie in [0,1), got {epsilon}")));
    }
    let d_inf = mult_distance(p, q)?;
    let precondition_ok = if epsilon > 0.0 { d_inf < epsilon } else { d_inf == 0.0 };
    if !precondition_ok {
        return Err(Error::InvalidParams(format!(
            "threshold check requires d∞(P,Q) < ε, got d∞ = {d_inf} with ε = {epsilon}"
        )));
    }
    let g = 2.0 * epsilon / (1.0 - epsilon);
    let support = p.support()?;
    let mut worst = f64::INFINITY;
    let mut violations = 0;
    let mut pairs = 0u64;
    for a in &support {
        let pa = p.prob(a)?;
        let qa = q.prob(a)?;
        for b in &support {
            let pb = p.prob(b)?;
            let qb = q.prob(b)?;
            let lhs = qa / (qa + qb);
            let rhs = pa / (pa + (1.0 + g) * pb);
            let slack = lhs - rhs;
            if slack < -1e-12 {
                violations += 1;
            }
            worst = worst.min(slack);
            pairs += 1;
        }
    }
    Ok(PropertyCheckResult {
        name: "pair_threshold".to_string(),
        trials: pairs,
        violations,
        worst,
        passed: violations == 0,
        detail: format!("d∞={d_inf:.4e} ε={epsilon}"),
    })
}

/// Verifies the empirical-learning sample bound: with
/// N = max(⌈(k+1)/η²⌉, ⌈2·ln(2/δ)/η²⌉) samples, the empirical distribution
/// lands within TV distance η of the truth in at least a (1−δ) fraction of
/// trials, up to 3σ of binomial slack.
pub fn check_learning_bound(
    d: &BucketDistribution,
    eta: f64,
    delta: f64,
    trials: u64,
    rng: &mut dyn RngCore,
) -> Result<PropertyCheckResult> {
    let k = d.k();
    if k > 64 {
        return Err(Error::InvalidParams(format!("learning check supports k ≤ 64, got {k}")));
    }
    if trials < 100 {
        return Err(Error::InvalidParams(format!(
            "learning check needs ≥ 100 trials for the binomial band, got {trials}"
        )));
    }
    if !(eta > 0.0 && eta < 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParams(format!(
            "learning check needs eta, delta in (0,1), got eta={eta}, delta={delta}"
        )));
    }
    let e2 = eta * eta;
    let n = (((k as f64 + 1.0) / e2).ceil() as u64).max((2.0 * (2.0 / delta).ln() / e2).ceil() as u64);
    let mut successes = 0u64;
    for _ in 0..trials {
        let mut hist = BucketHistogram::new(k);
        for _ in 0..n {
            hist.record(d.sample(rng));
        }
        if hist.tv_to_exact(d)? <= eta + 1e-12 {
            successes += 1;
        }
    }
    let rate = successes as f64 / trials as f64;
    let sigma = (delta * (1.0 - delta) / trials as f64).sqrt();
    let threshold = (1.0 - delta) - 3.0 * sigma;
    Ok(PropertyCheckResult {
        name: "empirical_learning".to_string(),
        trials,
        violations: trials - successes,
        worst: rate,
        passed: rate >= threshold,
        detail: format!("N={n} rate={rate:.4} threshold={threshold:.4}"),
    })
}

// ---------------------------------------------------------------------------
// Random instance generation
// ---------------------------------------------------------------------------

/// A full-support random distribution over {0,1}^n: i.i.d. exponential
/// weights, normalized — the flat-Dirichlet law on the simplex.
pub fn random_explicit_distribution(n: usize, rng: &mut dyn RngCore) -> Result<ExplicitDistribution> {
    let weights: Vec<(Assignment, f64)> = Assignment::all(n)?
        .map(|a| {
            let u: f64 = rng.gen::<f64>().max(1e-12);
            (a, -u.ln())
        })
        .collect();
    ExplicitDistribution::from_weights(n, weights)
}

fn random_subset(n: usize, rng: &mut dyn RngCore) -> Result<Vec<Assignment>> {
    let all: Vec<Assignment> = Assignment::all(n)?.collect();
    let mut subset: Vec<Assignment> = all.iter().copied().filter(|_| rng.gen::<bool>()).collect();
    if subset.is_empty() {
        subset.push(all[rng.gen_range(0..all.len())]);
    }
    Ok(subset)
}

// ---------------------------------------------------------------------------
// Shipped suites
// ---------------------------------------------------------------------------

const SUITE_N: usize = 6;

/// 1000 random (D1, D2, S) instances of the overlap lower bound.
pub fn run_overlap_suite(seed: u64) -> Result<PropertyCheckResult> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    let trials = 1000;
    for _ in 0..trials {
        let d1 = random_explicit_distribution(SUITE_N, &mut rng)?;
        let d2 = random_explicit_distribution(SUITE_N, &mut rng)?;
        let subset = random_subset(SUITE_N, &mut rng)?;
        let r = check_overlap_bound(&d1, &d2, &subset)?;
        violations += r.violations;
        worst = worst.min(r.worst);
    }
    Ok(PropertyCheckResult {
        name: "overlap_lower_bound".to_string(),
        trials,
        violations,
        worst,
        passed: violations == 0,
        detail: format!("random pairs over n={SUITE_N}, random subsets"),
    })
}

/// 100 multiplicatively-perturbed samplers (d∞ ≤ 0.04) checked against the
/// pair-threshold inequality at ε = 0.05.
pub fn run_threshold_suite(seed: u64) -> Result<PropertyCheckResult> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut violations = 0;
    let mut pairs = 0;
    let mut worst = f64::INFINITY;
    for _ in 0..100 {
        let p: DynDistribution =
            std::sync::Arc::new(random_explicit_distribution(SUITE_N, &mut rng)?);
        let q = make_faulty_sampler(&p, &FaultModel::MultNoise { epsilon: 0.04 }, &mut rng)?;
        let r = check_threshold_prop(p.as_ref(), q.as_ref(), 0.05)?;
        violations += r.violations;
        pairs += r.trials;
        worst = worst.min(r.worst);
    }
    Ok(PropertyCheckResult {
        name: "pair_threshold".to_string(),
        trials: pairs,
        violations,
        worst,
        passed: violations == 0,
        detail: format!("100 perturbed samplers over n={SUITE_N}, ε=0.05, d∞≤0.04"),
    })
}

/// 1000 random pairs checked against the distance identity 2·d_TV ≤ d∞.
pub fn run_distance_identity_suite(seed: u64) -> Result<PropertyCheckResult> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    let trials = 1000;
    for _ in 0..trials {
        let d1 = random_explicit_distribution(SUITE_N, &mut rng)?;
        let d2 = random_explicit_distribution(SUITE_N, &mut rng)?;
        let tv = tv_distance(&d1, &d2)?;
        let d_inf = mult_distance(&d1, &d2)?;
        let slack = d_inf - 2.0 * tv;
        if slack < -1e-12 {
            violations += 1;
        }
        worst = worst.min(slack);
    }
    Ok(PropertyCheckResult {
        name: "tv_vs_mult_identity".to_string(),
        trials,
        violations,
        worst,
        passed: violations == 0,
        detail: format!("2·d_TV ≤ d∞ over random pairs, n={SUITE_N}"),
    })
}

/// Learning bound on the uniform bucket distribution over 8 buckets at
/// η = 0.1, δ = 0.1, 500 trials.
pub fn run_learning_suite(seed: u64) -> Result<PropertyCheckResult> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let uniform = BucketDistribution::new(vec![0.125; 8])?;
    check_learning_bound(&uniform, 0.1, 0.1, 500, &mut rng)
}

/// Runs every shipped suite in a fixed order with per-suite seeds derived
/// from `seed`.
pub fn run_all_suites(seed: u64) -> Result<Vec<PropertyCheckResult>> {
    Ok(vec![
        run_overlap_suite(seed)?,
        run_threshold_suite(seed.wrapping_add(1))?,
        run_distance_identity_suite(seed.wrapping_add(2))?,
        run_learning_suite(seed.wrapping_add(3))?,
    ])
}
