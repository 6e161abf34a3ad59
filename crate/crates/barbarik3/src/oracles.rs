//! Oracle wrappers and query accounting.
//!
//! The tester sees two objects:
//!
//! - a [`DualOracle`] for the target P — draws samples and answers exact
//!   point-probability queries;
//! - a [`SamplerUnderTest`] for the candidate Q — draws samples (SAMP) and
//!   answers pair-conditional draws (PCOND): given assignments (a, b), it
//!   returns a with probability Q(a)/(Q(a)+Q(b)).
//!
//! Every oracle call increments exactly one counter on the caller's
//! [`QueryLedger`]. Sampler-side queries (SAMP from Q, PCOND) are capped by a
//! configurable budget; target-side queries are counted but unbounded.
//!
//! [`make_faulty_sampler`] builds the candidate distributions used in
//! experiments: an exact copy, a multiplicative perturbation with verified
//! d∞ bound, and far-in-total-variation constructions with verified d_TV.

use std::cell::Cell;
use std::str::FromStr;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::distributions::{
    mult_distance, tv_distance, Assignment, DynDistribution, ExplicitDistribution,
};
use crate::error::{Error, Result};

/// Default cap on sampler queries (SAMP from Q plus PCOND) per run.
pub const DEFAULT_SAMPLER_BUDGET: u64 = 100_000_000;

/// Default cap on internal draws per rejection-mode PCOND query.
pub const DEFAULT_PCOND_REJECTION_CAP: u64 = 1_000_000;

// ---------------------------------------------------------------------------
// Query accounting
// ---------------------------------------------------------------------------

/// Per-run query counters. Single-writer: one ledger belongs to one run.
#[derive(Debug, Default)]
pub struct QueryLedger {
    samp_p: Cell<u64>,
    samp_q: Cell<u64>,
    pcond: Cell<u64>,
    dual_prob: Cell<u64>,
    pcond_rejection_attempts: Cell<u64>,
}

/// A plain snapshot of ledger counters, as embedded in reports.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerCounts {
    /// SAMP draws from the target P.
    pub samp_p: u64,
    /// SAMP draws from the sampler Q under test.
    pub samp_q: u64,
    /// Pair-conditional draws from Q.
    pub pcond: u64,
    /// Point-probability lookups on the target's dual oracle.
    pub dual_prob: u64,
    /// Diagnostic only: internal draws spent by rejection-mode PCOND.
    pub pcond_rejection_attempts: u64,
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Queries charged against the sampler budget: SAMP from Q plus PCOND.
    pub fn sampler_queries(&self) -> u64 {
        self.samp_q.get() + self.pcond.get()
    }

    /// Queries against the target: SAMP from P plus probability lookups.
    pub fn target_queries(&self) -> u64 {
        self.samp_p.get() + self.dual_prob.get()
    }

    pub fn snapshot(&self) -> LedgerCounts {
        LedgerCounts {
            samp_p: self.samp_p.get(),
            samp_q: self.samp_q.get(),
            pcond: self.pcond.get(),
            dual_prob: self.dual_prob.get(),
            pcond_rejection_attempts: self.pcond_rejection_attempts.get(),
        }
    }

    fn bump(cell: &Cell<u64>) {
        cell.set(cell.get() + 1);
    }
}

// ---------------------------------------------------------------------------
// Target-side access: SAMP + exact probabilities
// ---------------------------------------------------------------------------

/// Dual access to the target distribution P.
pub struct DualOracle {
    dist: DynDistribution,
}

impl DualOracle {
    pub fn new(dist: DynDistribution) -> Self {
        Self { dist }
    }

    pub fn dimension(&self) -> usize {
        self.dist.dimension()
    }

    /// One SAMP draw from P.
    pub fn sample(&self, rng: &mut dyn RngCore, ledger: &QueryLedger) -> Assignment {
        QueryLedger::bump(&ledger.samp_p);
        self.dist.sample(rng)
    }

    /// One exact probability lookup P(a).
    pub fn prob(&self, a: &Assignment, ledger: &QueryLedger) -> Result<f64> {
        QueryLedger::bump(&ledger.dual_prob);
        self.dist.prob(a)
    }

    /// The underlying distribution, for reference computations that need to
    /// enumerate P outside the query model.
    pub fn distribution(&self) -> &DynDistribution {
        &self.dist
    }
}

// ---------------------------------------------------------------------------
// Sampler-side access: SAMP + PCOND
// ---------------------------------------------------------------------------

/// How pair-conditional draws are realized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum PcondMode {
    /// Draw a Bernoulli with the exact conditional probability
    /// Q(a)/(Q(a)+Q(b)). One internal random number per query.
    Exact,
    /// Draw from Q until the sample lands in {a, b}, up to `max_attempts`
    /// draws. Validates that the exact mode is faithful to an actual
    /// conditional sampler.
    Rejection { max_attempts: u64 },
}

impl Default for PcondMode {
    fn default() -> Self {
        PcondMode::Exact
    }
}

impl FromStr for PcondMode {
    type Err = Error;

    /// Accepts `exact`, `rejection` (default attempt cap), and
    /// `rejection:CAP`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split(':').collect::<Vec<_>>().as_slice() {
            ["exact"] => Ok(PcondMode::Exact),
            ["rejection"] => {
                Ok(PcondMode::Rejection { max_attempts: DEFAULT_PCOND_REJECTION_CAP })
            }
            ["rejection", cap] => {
                let max_attempts = cap.parse::<u64>().map_err(|_| {
                    Error::InvalidParams(format!("invalid rejection attempt cap: {cap}"))
                })?;
                if max_attempts == 0 {
                    return Err(Error::InvalidParams(
                        "rejection attempt cap must be positive".into(),
                    ));
                }
                Ok(PcondMode::Rejection { max_attempts })
            }
            _ => Err(Error::InvalidParams(format!(
                "unknown pcond mode `{s}` (expected `exact` or `rejection[:CAP]`)"
            ))),
        }
    }
}

impl std::fmt::Display for PcondMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PcondMode::Exact => write!(f, "exact"),
            PcondMode::Rejection { max_attempts } => write!(f, "rejection:{max_attempts}"),
        }
    }
}

/// SAMP + PCOND access to the sampler under test, with budget enforcement.
pub struct SamplerUnderTest {
    dist: DynDistribution,
    mode: PcondMode,
    budget: u64,
}

impl SamplerUnderTest {
    pub fn new(dist: DynDistribution) -> Self {
        Self { dist, mode: PcondMode::Exact, budget: DEFAULT_SAMPLER_BUDGET }
    }

    pub fn with_mode(mut self, mode: PcondMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn dimension(&self) -> usize {
        self.dist.dimension()
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn distribution(&self) -> &DynDistribution {
        &self.dist
    }

    fn charge(&self, ledger: &QueryLedger, cell: &Cell<u64>) -> Result<()> {
        if ledger.sampler_queries() >= self.budget {
            return Err(Error::BudgetExhausted { budget: self.budget });
        }
        QueryLedger::bump(cell);
        Ok(())
    }

    /// One SAMP draw from Q. Fails once the sampler budget is exhausted.
    pub fn samp(&self, rng: &mut dyn RngCore, ledger: &QueryLedger) -> Result<Assignment> {
        self.charge(ledger, &ledger.samp_q)?;
        Ok(self.dist.sample(rng))
    }

    /// One PCOND draw: returns `a` with probability Q(a)/(Q(a)+Q(b)),
    /// otherwise `b`. A query on a pair with Q(a)+Q(b) = 0 is an error.
    /// Identical pairs return `a` without consuming randomness.
    pub fn pcond(
        &self,
        a: &Assignment,
        b: &Assignment,
        rng: &mut dyn RngCore,
        ledger: &QueryLedger,
    ) -> Result<Assignment> {
        let wa = self.dist.prob(a)?;
        let wb = self.dist.prob(b)?;
        if wa + wb <= 0.0 {
            return Err(Error::ZeroMassPair);
        }
        self.charge(ledger, &ledger.pcond)?;
        if a == b {
            return Ok(*a);
        }
        match self.mode {
            PcondMode::Exact => {
                if rng.gen::<f64>() < wa / (wa + wb) {
                    Ok(*a)
                } else {
                    Ok(*b)
                }
            }
            PcondMode::Rejection { max_attempts } => {
                for _ in 0..max_attempts {
                    QueryLedger::bump(&ledger.pcond_rejection_attempts);
                    let x = self.dist.sample(rng);
                    if x == *a {
                        return Ok(*a);
                    }
                    if x == *b {
                        return Ok(*b);
                    }
                }
                Err(Error::PcondCapExhausted { cap: max_attempts })
            }
        }
    }
}

/// Anything the bucketing layer can draw assignments from while logging the
/// right counter: the target-side oracle or the sampler under test.
pub trait SampSource {
    fn dimension(&self) -> usize;
    fn draw(&self, rng: &mut dyn RngCore, ledger: &QueryLedger) -> Result<Assignment>;
}

impl SampSource for DualOracle {
    fn dimension(&self) -> usize {
        DualOracle::dimension(self)
    }

    fn draw(&self, rng: &mut dyn RngCore, ledger: &QueryLedger) -> Result<Assignment> {
        Ok(self.sample(rng, ledger))
    }
}

impl SampSource for SamplerUnderTest {
    fn dimension(&self) -> usize {
        SamplerUnderTest::dimension(self)
    }

    fn draw(&self, rng: &mut dyn RngCore, ledger: &QueryLedger) -> Result<Assignment> {
        self.samp(rng, ledger)
    }
}

// ---------------------------------------------------------------------------
// Fault injection
// ---------------------------------------------------------------------------

/// Far-in-total-variation constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TvFarMode {
    /// Q is uniform over the full cube.
    Uniform,
    /// Q permutes P's probabilities, heaviest point taking the lightest mass.
    Reversed,
}

/// Deviation injected between the target and the sampler under test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum FaultModel {
    /// Q = P exactly.
    Ideal,
    /// Per-point multiplicative noise with verified d∞(P,Q) ≤ epsilon.
    MultNoise { epsilon: f64 },
    /// A named far construction with verified d_TV(P,Q) ≥ min_tv.
    TvFar { mode: TvFarMode, min_tv: f64 },
    /// Moves `fraction` of the total mass off the heaviest points, yielding
    /// verified d_TV(P,Q) ≥ fraction.
    MassSwap { fraction: f64 },
}

impl FromStr for FaultModel {
    type Err = Error;

    /// Accepts `ideal`, `mult-noise:EPS`, `mass-swap:FRAC`, and
    /// `tv-far:uniform:MIN` / `tv-far:reversed:MIN`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidParams(msg);
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["ideal"] => Ok(FaultModel::Ideal),
            ["mult-noise", eps] => {
                let epsilon: f64 = eps
                    .parse()
                    .map_err(|_| bad(format!("bad mult-noise bound {eps:?}")))?;
                Ok(FaultModel::MultNoise { epsilon })
            }
            ["mass-swap", f] => {
                let fraction: f64 =
                    f.parse().map_err(|_| bad(format!("bad mass-swap fraction {f:?}")))?;
                Ok(FaultModel::MassSwap { fraction })
            }
            ["tv-far", mode, min] => {
                let mode = match *mode {
                    "uniform" => TvFarMode::Uniform,
                    "reversed" => TvFarMode::Reversed,
                    other => return Err(bad(format!("unknown tv-far mode {other:?}"))),
                };
                let min_tv: f64 =
                    min.parse().map_err(|_| bad(format!("bad tv-far bound {min:?}")))?;
                Ok(FaultModel::TvFar { mode, min_tv })
            }
            _ => Err(bad(format!(
                "unknown sampler spec {s:?}; expected ideal, mult-noise:EPS, \
                 mass-swap:FRACTION, or tv-far:MODE:MIN_TV"
            ))),
        }
    }
}

impl std::fmt::Display for FaultModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FaultModel::Ideal => write!(f, "ideal"),
            FaultModel::MultNoise { epsilon } => write!(f, "mult-noise:{epsilon}"),
            FaultModel::MassSwap { fraction } => write!(f, "mass-swap:{fraction}"),
            FaultModel::TvFar { mode, min_tv } => {
                let m = match mode {
                    TvFarMode::Uniform => "uniform",
                    TvFarMode::Reversed => "reversed",
                };
                write!(f, "tv-far:{m}:{min_tv}")
            }
        }
    }
}

/// Builds the sampler distribution Q for a fault model applied to target P.
///
/// Every non-ideal construction enumerates P's support, so those require an
/// enumerable target. The declared distance bound is verified exactly before
/// the distribution is returned; a construction that cannot realize its bound
/// fails rather than silently weakening it.
pub fn make_faulty_sampler(
    p: &DynDistribution,
    fault: &FaultModel,
    rng: &mut dyn RngCore,
) -> Result<DynDistribution> {
    match *fault {
        FaultModel::Ideal => Ok(p.clone()),
        FaultModel::MultNoise { epsilon } => mult_noise(p, epsilon, rng),
        FaultModel::MassSwap { fraction } => mass_swap(p, fraction),
        FaultModel::TvFar { mode, min_tv } => tv_far(p, mode, min_tv),
    }
}

fn support_probs(p: &DynDistribution) -> Result<Vec<(Assignment, f64)>> {
    p.support()?
        .into_iter()
        .map(|a| p.prob(&a).map(|pr| (a, pr)))
        .collect()
}

/// Scales every point probability by an independent factor, renormalizes,
/// and verifies d∞(P,Q) ≤ epsilon exactly. Renormalization can push the
/// realized ratio slightly past the bound, so the factor width shrinks and
/// the draw repeats — up to 10 retries — until verification passes.
fn mult_noise(p: &DynDistribution, epsilon: f64, rng: &mut dyn RngCore) -> Result<DynDistribution> {
    if !epsilon.is_finite() || epsilon <= 0.0 || epsilon >= 1.0 {
        return Err(Error::InvalidParams(format!(
            "mult-noise bound must lie in (0,1), got {epsilon}"
        )));
    }
    let base = support_probs(p)?;
    let mut width = epsilon / 2.0;
    for _attempt in 0..=10 {
        let weights: Vec<(Assignment, f64)> = base
            .iter()
            .map(|&(a, pr)| {
                let factor = 1.0 + rng.gen_range(-width..=width);
                (a, pr * factor)
            })
            .collect();
        let q: DynDistribution =
            std::sync::Arc::new(ExplicitDistribution::from_weights(p.dimension(), weights)?);
        if mult_distance(p.as_ref(), q.as_ref())? <= epsilon {
            return Ok(q);
        }
        width /= 2.0;
    }
    Err(Error::FaultConstruction(format!(
        "could not realize d∞ ≤ {epsilon} after 10 retries"
    )))
}

/// Removes `fraction` of the total mass from the heaviest points and places
/// it on zero-probability points (if the cube has any) or on the lightest
/// untouched support points. Sources and destinations are disjoint, so the
/// construction realizes d_TV(P,Q) = fraction exactly; this is verified
/// before returning.
fn mass_swap(p: &DynDistribution, fraction: f64) -> Result<DynDistribution> {
    if !fraction.is_finite() || fraction <= 0.0 || fraction > 1.0 {
        return Err(Error::InvalidParams(format!(
            "mass-swap fraction must lie in (0,1], got {fraction}"
        )));
    }
    let mut points = support_probs(p)?;
    // Heaviest first; ties broken by assignment order for determinism.
    points.sort_by(|(a1, p1), (a2, p2)| {
        p2.partial_cmp(p1).unwrap().then_with(|| a1.cmp(a2))
    });

    let mut moved = 0.0f64;
    let mut entries: Vec<(Assignment, f64)> = Vec::with_capacity(points.len());
    let mut untouched: Vec<(Assignment, f64)> = Vec::new();
    for &(a, pr) in &points {
        let remaining = fraction - moved;
        if remaining > 1e-15 {
            let take = pr.min(remaining);
            moved += take;
            entries.push((a, pr - take));
        } else {
            untouched.push((a, pr));
            entries.push((a, pr));
        }
    }
    if moved < fraction - 1e-12 {
        return Err(Error::FaultConstruction(format!(
            "support mass {moved} is smaller than the requested fraction {fraction}"
        )));
    }

    let n = p.dimension();
    let in_support: std::collections::HashSet<Assignment> =
        points.iter().map(|&(a, _)| a).collect();
    let zeros: Vec<Assignment> =
        Assignment::all(n)?.filter(|a| !in_support.contains(a)).collect();
    let destinations: Vec<Assignment> = if !zeros.is_empty() {
        zeros
    } else {
        // Lightest untouched points first.
        untouched.sort_by(|(a1, p1), (a2, p2)| {
            p1.partial_cmp(p2).unwrap().then_with(|| a1.cmp(a2))
        });
        untouched.iter().map(|&(a, _)| a).collect()
    };
    if destinations.is_empty() {
        return Err(Error::FaultConstruction(
            "no destination points remain; lower the swap fraction".into(),
        ));
    }

    let share = moved / destinations.len() as f64;
    let dest_set: std::collections::HashSet<Assignment> = destinations.iter().copied().collect();
    let mut table: Vec<(Assignment, f64)> = entries
        .into_iter()
        .map(|(a, pr)| if dest_set.contains(&a) { (a, pr + share) } else { (a, pr) })
        .collect();
    for a in &destinations {
        if !in_support.contains(a) {
            table.push((*a, share));
        }
    }

    let q: DynDistribution = std::sync::Arc::new(ExplicitDistribution::new(n, table)?);
    let achieved = tv_distance(p.as_ref(), q.as_ref())?;
    if achieved < fraction - 1e-9 {
        return Err(Error::FaultConstruction(format!(
            "mass swap achieved d_TV = {achieved}, below the declared {fraction}"
        )));
    }
    Ok(q)
}

fn tv_far(p: &DynDistribution, mode: TvFarMode, min_tv: f64) -> Result<DynDistribution> {
    if !min_tv.is_finite() || min_tv <= 0.0 || min_tv >= 1.0 {
        return Err(Error::InvalidParams(format!(
            "tv-far bound must lie in (0,1), got {min_tv}"
        )));
    }
    let n = p.dimension();
    let q: DynDistribution = match mode {
        TvFarMode::Uniform => std::sync::Arc::new(ExplicitDistribution::uniform(n)?),
        TvFarMode::Reversed => {
            let mut points = support_probs(p)?;
            points.sort_by(|(a1, p1), (a2, p2)| {
                p1.partial_cmp(p2).unwrap().then_with(|| a1.cmp(a2))
            });
            let reversed: Vec<f64> = points.iter().rev().map(|&(_, pr)| pr).collect();
            let table: Vec<(Assignment, f64)> = points
                .iter()
                .map(|&(a, _)| a)
                .zip(reversed)
                .collect();
            std::sync::Arc::new(ExplicitDistribution::new(n, table)?)
        }
    };
    let achieved = tv_distance(p.as_ref(), q.as_ref())?;
    if achieved < min_tv {
        return Err(Error::FaultConstruction(format!(
            "tv-far construction achieved d_TV = {achieved}, below the declared {min_tv}"
        )));
    }
    Ok(q)
}
