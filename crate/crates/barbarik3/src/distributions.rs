//! Synthetic distributions over {0,1}^n with exact probability evaluation.
//!
//! Every family implements [`Distribution`]: a point-probability oracle
//! (`prob`), a seeded sampler (`sample`), and — when the support is small
//! enough to list — exhaustive enumeration (`support`). Exact total-variation
//! and multiplicative distances are computed from enumerated supports, so the
//! same objects serve both as test targets and as ground truth for the
//! statistical machinery built on top of them.
//!
//! Conventions:
//! - An [`Assignment`] stores its bits in a `u128`; variable `i` (0-based) is
//!   bit `i`. The string form writes variable 0 leftmost, so `"1101"` assigns
//!   variable 0 ↦ 1, variable 1 ↦ 1, variable 2 ↦ 0, variable 3 ↦ 1.
//! - Dimensions up to 128 are supported by the parametric families; anything
//!   that must enumerate its support is capped at 2^24 points.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};

/// Largest dimension for which a distribution may be stored as an explicit
/// table or enumerated point by point.
pub const MAX_ENUMERABLE_N: usize = 24;

/// Largest support size an enumeration is allowed to materialize.
pub const MAX_SUPPORT_POINTS: u64 = 1 << 24;

/// Constructors reject families whose smallest positive probability falls
/// below 2^-1000; bucket arithmetic relies on probabilities staying well
/// clear of the double-precision underflow cliff.
const MIN_POSITIVE_PROB_LOG2: f64 = -1000.0;

// ---------------------------------------------------------------------------
// Assignments
// ---------------------------------------------------------------------------

/// One assignment to n boolean variables, n ≤ 128.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    n: usize,
    bits: u128,
}

impl Assignment {
    /// Builds an assignment from a raw bit word. Bits at positions ≥ n must
    /// be zero.
    pub fn new(bits: u128, n: usize) -> Result<Self> {
        if n == 0 || n > 128 {
            return Err(Error::InvalidParams(format!(
                "assignment dimension must be in 1..=128, got {n}"
            )));
        }
        if n < 128 && (bits >> n) != 0 {
            return Err(Error::InvalidParams(format!(
                "assignment word has bits set beyond variable {}",
                n - 1
            )));
        }
        Ok(Self { n, bits })
    }

    /// Parses the string form: one '0'/'1' per variable, variable 0 first.
    pub fn from_bit_str(s: &str) -> Result<Self> {
        let n = s.len();
        if n == 0 || n > 128 {
            return Err(Error::InvalidParams(format!(
                "assignment string must have 1..=128 characters, got {n}"
            )));
        }
        let mut bits = 0u128;
        for (i, c) in s.chars().enumerate() {
            match c {
                '1' => bits |= 1u128 << i,
                '0' => {}
                other => {
                    return Err(Error::InvalidParams(format!(
                        "assignment string may only contain '0'/'1', got {other:?}"
                    )))
                }
            }
        }
        Ok(Self { n, bits })
    }

    /// String form: variable 0 leftmost.
    pub fn to_bit_str(&self) -> String {
        (0..self.n).map(|i| if self.bit(i) { '1' } else { '0' }).collect()
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn bit(&self, i: usize) -> bool {
        debug_assert!(i < self.n);
        (self.bits >> i) & 1 == 1
    }

    pub fn raw_bits(&self) -> u128 {
        self.bits
    }

    /// Number of ones among variables `lo..hi`.
    pub fn ones_in_range(&self, lo: usize, hi: usize) -> u32 {
        debug_assert!(lo <= hi && hi <= self.n);
        if lo == hi {
            return 0;
        }
        let width = hi - lo;
        let mask = if width == 128 { u128::MAX } else { (1u128 << width) - 1 };
        ((self.bits >> lo) & mask).count_ones()
    }

    /// All 2^n assignments of dimension n, in increasing word order.
    /// Only small dimensions may be enumerated.
    pub fn all(n: usize) -> Result<impl Iterator<Item = Assignment>> {
        if n == 0 || n > MAX_ENUMERABLE_N {
            return Err(Error::NotEnumerable(format!(
                "cannot enumerate {{0,1}}^{n}; enumeration is capped at n = {MAX_ENUMERABLE_N}"
            )));
        }
        Ok((0..1u128 << n).map(move |bits| Assignment { n, bits }))
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_str())
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Assignment({})", self.to_bit_str())
    }
}

// ---------------------------------------------------------------------------
// The distribution interface
// ---------------------------------------------------------------------------

/// A probability distribution over {0,1}^n with exact point probabilities.
pub trait Distribution {
    /// Number of boolean variables n.
    fn dimension(&self) -> usize;

    /// Exact probability of one assignment. Deterministic; never samples.
    fn prob(&self, a: &Assignment) -> Result<f64>;

    /// Draws one assignment using the caller's random stream.
    fn sample(&self, rng: &mut dyn RngCore) -> Assignment;

    /// Lists every assignment with positive probability, or fails with
    /// [`Error::NotEnumerable`] when the support is too large to list.
    fn support(&self) -> Result<Vec<Assignment>>;
}

/// Shared handle to a distribution, as passed between oracles and the harness.
pub type DynDistribution = Arc<dyn Distribution + Send + Sync>;

fn check_dimension(expected: usize, a: &Assignment) -> Result<()> {
    if a.dimension() != expected {
        return Err(Error::DimensionMismatch { expected, actual: a.dimension() });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Explicit tables
// ---------------------------------------------------------------------------

/// A distribution given by an explicit table of point probabilities.
///
/// Tables are limited to n ≤ 24. Zero-probability entries are accepted and
/// dropped; the remaining probabilities must sum to 1 within 1e-9.
pub struct ExplicitDistribution {
    n: usize,
    /// Support points sorted by bit word, with their probabilities.
    points: Vec<(Assignment, f64)>,
    /// Cumulative sums over `points`, used for inverse-CDF sampling.
    cumulative: Vec<f64>,
    index: HashMap<Assignment, usize>,
}

impl ExplicitDistribution {
    pub fn new(n: usize, probs: impl IntoIterator<Item = (Assignment, f64)>) -> Result<Self> {
        if n == 0 || n > MAX_ENUMERABLE_N {
            return Err(Error::InvalidParams(format!(
                "explicit tables support 1..={MAX_ENUMERABLE_N} variables, got {n}"
            )));
        }
        let mut seen = HashSet::new();
        let mut points = Vec::new();
        let mut total = 0.0f64;
        for (a, p) in probs {
            check_dimension(n, &a)?;
            if !seen.insert(a) {
                return Err(Error::InvalidParams(format!(
                    "duplicate table entry for assignment {a}"
                )));
            }
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidParams(format!(
                    "probability of {a} must be finite and non-negative, got {p}"
                )));
            }
            total += p;
            if p > 0.0 {
                points.push((a, p));
            }
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParams(format!(
                "table probabilities must sum to 1 within 1e-9, got {total}"
            )));
        }
        if points.is_empty() {
            return Err(Error::InvalidParams("table has no positive-probability entry".into()));
        }
        points.sort_by_key(|(a, _)| a.raw_bits());
        let mut cumulative = Vec::with_capacity(points.len());
        let mut acc = 0.0;
        for (_, p) in &points {
            acc += p;
            cumulative.push(acc);
        }
        let index = points.iter().enumerate().map(|(i, (a, _))| (*a, i)).collect();
        Ok(Self { n, points, cumulative, index })
    }

    /// The uniform distribution over all of {0,1}^n.
    pub fn uniform(n: usize) -> Result<Self> {
        let p = 0.5f64.powi(n as i32);
        Self::new(n, Assignment::all(n)?.map(|a| (a, p)))
    }

    /// All mass on a single assignment.
    pub fn point_mass(a: Assignment) -> Result<Self> {
        Self::new(a.dimension(), [(a, 1.0)])
    }

    /// Normalizes arbitrary non-negative weights into a table.
    pub fn from_weights(n: usize, weights: impl IntoIterator<Item = (Assignment, f64)>) -> Result<Self> {
        let entries: Vec<(Assignment, f64)> = weights.into_iter().collect();
        for (a, w) in &entries {
            if !w.is_finite() || *w < 0.0 {
                return Err(Error::InvalidParams(format!(
                    "weight of {a} must be finite and non-negative, got {w}"
                )));
            }
        }
        let total: f64 = entries.iter().map(|(_, w)| w).sum();
        if total <= 0.0 {
            return Err(Error::InvalidParams("weights must have positive total".into()));
        }
        Self::new(n, entries.into_iter().map(|(a, w)| (a, w / total)))
    }
}

impl Distribution for ExplicitDistribution {
    fn dimension(&self) -> usize {
        self.n
    }

    fn prob(&self, a: &Assignment) -> Result<f64> {
        check_dimension(self.n, a)?;
        Ok(self.index.get(a).map_or(0.0, |&i| self.points[i].1))
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Assignment {
        let u: f64 = rng.gen();
        let idx = self.cumulative.partition_point(|&c| c <= u);
        self.points[idx.min(self.points.len() - 1)].0
    }

    fn support(&self) -> Result<Vec<Assignment>> {
        Ok(self.points.iter().map(|(a, _)| *a).collect())
    }
}

// ---------------------------------------------------------------------------
// Product distributions
// ---------------------------------------------------------------------------

/// Independent bits: variable i is 1 with probability `marginals[i]`.
pub struct ProductDistribution {
    marginals: Vec<f64>,
}

impl ProductDistribution {
    pub fn new(marginals: Vec<f64>) -> Result<Self> {
        let n = marginals.len();
        if n == 0 || n > 128 {
            return Err(Error::InvalidParams(format!(
                "product distributions support 1..=128 variables, got {n}"
            )));
        }
        let mut min_log2 = 0.0f64;
        for (i, &m) in marginals.iter().enumerate() {
            if !m.is_finite() || !(0.0..=1.0).contains(&m) {
                return Err(Error::InvalidParams(format!(
                    "marginal {i} must lie in [0,1], got {m}"
                )));
            }
            if m > 0.0 && m < 1.0 {
                min_log2 += m.min(1.0 - m).log2();
            }
        }
        if min_log2 < MIN_POSITIVE_PROB_LOG2 {
            return Err(Error::InvalidParams(
                "smallest positive point probability would fall below 2^-1000".into(),
            ));
        }
        Ok(Self { marginals })
    }

    pub fn marginals(&self) -> &[f64] {
        &self.marginals
    }
}

impl Distribution for ProductDistribution {
    fn dimension(&self) -> usize {
        self.marginals.len()
    }

    fn prob(&self, a: &Assignment) -> Result<f64> {
        check_dimension(self.marginals.len(), a)?;
        let mut p = 1.0;
        for (i, &m) in self.marginals.iter().enumerate() {
            p *= if a.bit(i) { m } else { 1.0 - m };
        }
        Ok(p)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Assignment {
        let mut bits = 0u128;
        for (i, &m) in self.marginals.iter().enumerate() {
            if rng.gen::<f64>() < m {
                bits |= 1u128 << i;
            }
        }
        Assignment { n: self.marginals.len(), bits }
    }

    fn support(&self) -> Result<Vec<Assignment>> {
        let free: Vec<usize> = (0..self.marginals.len())
            .filter(|&i| self.marginals[i] > 0.0 && self.marginals[i] < 1.0)
            .collect();
        if free.len() > MAX_ENUMERABLE_N {
            return Err(Error::NotEnumerable(format!(
                "product support has 2^{} points",
                free.len()
            )));
        }
        let mut fixed = 0u128;
        for (i, &m) in self.marginals.iter().enumerate() {
            if m == 1.0 {
                fixed |= 1u128 << i;
            }
        }
        let mut out = Vec::with_capacity(1 << free.len());
        for combo in 0..1u64 << free.len() {
            let mut bits = fixed;
            for (j, &i) in free.iter().enumerate() {
                if (combo >> j) & 1 == 1 {
                    bits |= 1u128 << i;
                }
            }
            out.push(Assignment { n: self.marginals.len(), bits });
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Union-of-products family
// ---------------------------------------------------------------------------

/// The skewed two-branch family over n = 3k+1 variables.
///
/// Variable 3k is a branch selector. With the selector off, variables
/// 0..2k are forced to 1 and the k "weighted" variables 2k..3k are free;
/// with the selector on, the weighted block is forced to 1 and variables
/// 0..2k are free. Satisfying assignments carry weight 3^(#ones in the
/// weighted block), which makes the normalizer 4^k · (1 + 3^k) and the
/// support size 2^k + 2^(2k).
pub struct UnionOfProducts {
    k: usize,
    n: usize,
    pow3k: f64,
    normalizer: f64,
}

impl UnionOfProducts {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 || 3 * k + 1 > 128 {
            return Err(Error::InvalidParams(format!(
                "union-of-products block count must be in 1..=42, got {k}"
            )));
        }
        let pow3k = 3.0f64.powi(k as i32);
        let normalizer = 4.0f64.powi(k as i32) * (1.0 + pow3k);
        Ok(Self { k, n: 3 * k + 1, pow3k, normalizer })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Total weight 4^k · (1 + 3^k).
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// Number of satisfying assignments, 2^k + 2^(2k). Up to 2^84 + 2^42
    /// at the largest admissible k, hence the wide integer.
    pub fn support_size(&self) -> u128 {
        (1u128 << self.k) + (1u128 << (2 * self.k))
    }

    fn low_mask(&self) -> u128 {
        (1u128 << (2 * self.k)) - 1
    }

    fn weighted_mask(&self) -> u128 {
        ((1u128 << self.k) - 1) << (2 * self.k)
    }

    fn selector_bit(&self) -> u128 {
        1u128 << (3 * self.k)
    }
}

impl Distribution for UnionOfProducts {
    fn dimension(&self) -> usize {
        self.n
    }

    fn prob(&self, a: &Assignment) -> Result<f64> {
        check_dimension(self.n, a)?;
        let bits = a.raw_bits();
        if bits & self.selector_bit() == 0 {
            // Selector off: the low block must be all ones.
            if bits & self.low_mask() != self.low_mask() {
                return Ok(0.0);
            }
            let ones = a.ones_in_range(2 * self.k, 3 * self.k);
            Ok(3.0f64.powi(ones as i32) / self.normalizer)
        } else {
            // Selector on: the weighted block must be all ones.
            if bits & self.weighted_mask() != self.weighted_mask() {
                return Ok(0.0);
            }
            Ok(self.pow3k / self.normalizer)
        }
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Assignment {
        // The selector-on branch carries mass 3^k / (1 + 3^k).
        let p_on = self.pow3k / (1.0 + self.pow3k);
        let mut bits;
        if rng.gen::<f64>() < p_on {
            bits = self.weighted_mask() | self.selector_bit();
            for i in 0..2 * self.k {
                if rng.gen::<f64>() < 0.5 {
                    bits |= 1u128 << i;
                }
            }
        } else {
            bits = self.low_mask();
            // Weight 3 per set bit makes each weighted bit Bernoulli(3/4).
            for i in 2 * self.k..3 * self.k {
                if rng.gen::<f64>() < 0.75 {
                    bits |= 1u128 << i;
                }
            }
        }
        Assignment { n: self.n, bits }
    }

    fn support(&self) -> Result<Vec<Assignment>> {
        if self.support_size() > MAX_SUPPORT_POINTS as u128 {
            return Err(Error::NotEnumerable(format!(
                "union-of-products support has {} points",
                self.support_size()
            )));
        }
        let mut out = Vec::with_capacity(self.support_size() as usize);
        for w in 0..1u128 << self.k {
            out.push(Assignment { n: self.n, bits: self.low_mask() | (w << (2 * self.k)) });
        }
        for v in 0..1u128 << (2 * self.k) {
            out.push(Assignment {
                n: self.n,
                bits: v | self.weighted_mask() | self.selector_bit(),
            });
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Log-linear distributions
// ---------------------------------------------------------------------------

/// Membership test for a constrained support.
pub type SupportPredicate = Arc<dyn Fn(&Assignment) -> bool + Send + Sync>;

/// Exponential-family distribution: P(σ) ∝ exp(Σ_i σ_i θ_i) on its support.
///
/// With the full cube as support the normalizer is Π_i (1 + e^θi) and bits
/// are sampled independently; a constrained support is materialized as an
/// explicit table, which caps those instances at n ≤ 24.
pub struct LogLinearDistribution {
    theta: Vec<f64>,
    log_norm: f64,
    table: Option<ExplicitDistribution>,
}

impl LogLinearDistribution {
    fn validate_theta(theta: &[f64]) -> Result<()> {
        let n = theta.len();
        if n == 0 || n > 128 {
            return Err(Error::InvalidParams(format!(
                "log-linear distributions support 1..=128 variables, got {n}"
            )));
        }
        for (i, &t) in theta.iter().enumerate() {
            if !t.is_finite() || t <= 0.0 {
                return Err(Error::InvalidParams(format!(
                    "theta[{i}] must be a positive real, got {t}"
                )));
            }
        }
        Ok(())
    }

    /// Full-support instance.
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        Self::validate_theta(&theta)?;
        // ln(1 + e^t) evaluated stably for large t.
        let log_norm: f64 = theta.iter().map(|&t| t + (-t).exp().ln_1p()).sum();
        if log_norm > -MIN_POSITIVE_PROB_LOG2 * std::f64::consts::LN_2 {
            return Err(Error::InvalidParams(
                "smallest positive point probability would fall below 2^-1000".into(),
            ));
        }
        Ok(Self { theta, log_norm, table: None })
    }

    /// Instance restricted to the assignments satisfying `support`.
    /// The normalizer is found by enumeration, so n is capped at 24.
    pub fn with_support(theta: Vec<f64>, support: SupportPredicate) -> Result<Self> {
        Self::validate_theta(&theta)?;
        let n = theta.len();
        if n > MAX_ENUMERABLE_N {
            return Err(Error::NotEnumerable(format!(
                "constrained log-linear instances are capped at n = {MAX_ENUMERABLE_N}, got {n}"
            )));
        }
        let max_score: f64 = theta.iter().sum();
        let mut weights = Vec::new();
        for a in Assignment::all(n)? {
            if support(&a) {
                let score: f64 = (0..n).filter(|&i| a.bit(i)).map(|i| theta[i]).sum();
                weights.push((a, (score - max_score).exp()));
            }
        }
        if weights.is_empty() {
            return Err(Error::InvalidParams("support predicate admits no assignment".into()));
        }
        let table = ExplicitDistribution::from_weights(n, weights)?;
        Ok(Self { theta, log_norm: 0.0, table: Some(table) })
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }
}

impl Distribution for LogLinearDistribution {
    fn dimension(&self) -> usize {
        self.theta.len()
    }

    fn prob(&self, a: &Assignment) -> Result<f64> {
        if let Some(table) = &self.table {
            return table.prob(a);
        }
        check_dimension(self.theta.len(), a)?;
        let score: f64 = (0..self.theta.len()).filter(|&i| a.bit(i)).map(|i| self.theta[i]).sum();
        Ok((score - self.log_norm).exp())
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Assignment {
        if let Some(table) = &self.table {
            return table.sample(rng);
        }
        let mut bits = 0u128;
        for (i, &t) in self.theta.iter().enumerate() {
            // Bit i is independently 1 with probability e^θi/(1+e^θi).
            let p = 1.0 / (1.0 + (-t).exp());
            if rng.gen::<f64>() < p {
                bits |= 1u128 << i;
            }
        }
        Assignment { n: self.theta.len(), bits }
    }

    fn support(&self) -> Result<Vec<Assignment>> {
        if let Some(table) = &self.table {
            return table.support();
        }
        Ok(Assignment::all(self.theta.len())?.collect())
    }
}

// ---------------------------------------------------------------------------
// Distances
// ---------------------------------------------------------------------------

fn support_union(d1: &dyn Distribution, d2: &dyn Distribution) -> Result<Vec<Assignment>> {
    if d1.dimension() != d2.dimension() {
        return Err(Error::DimensionMismatch {
            expected: d1.dimension(),
            actual: d2.dimension(),
        });
    }
    let mut seen: HashSet<Assignment> = d1.support()?.into_iter().collect();
    for a in d2.support()? {
        seen.insert(a);
    }
    let mut points: Vec<Assignment> = seen.into_iter().collect();
    points.sort();
    Ok(points)
}

/// Exact total-variation distance ½ Σ_σ |D1(σ) − D2(σ)|.
///
/// Requires both supports to be enumerable.
pub fn tv_distance(d1: &dyn Distribution, d2: &dyn Distribution) -> Result<f64> {
    let points = support_union(d1, d2)?;
    let mut acc = 0.0;
    for a in &points {
        acc += (d1.prob(a)? - d2.prob(a)?).abs();
    }
    Ok(acc / 2.0)
}

/// Total-variation distance restricted to a subset S:
/// ½ Σ_{σ ∈ S} |D1(σ) − D2(σ)|.
pub fn tv_distance_within(
    d1: &dyn Distribution,
    d2: &dyn Distribution,
    subset: &[Assignment],
) -> Result<f64> {
    if d1.dimension() != d2.dimension() {
        return Err(Error::DimensionMismatch {
            expected: d1.dimension(),
            actual: d2.dimension(),
        });
    }
    let mut acc = 0.0;
    for a in subset {
        acc += (d1.prob(a)? - d2.prob(a)?).abs();
    }
    Ok(acc / 2.0)
}

/// Exact multiplicative distance d∞ = max_σ |D2(σ)/D1(σ) − 1|.
///
/// Points outside both supports contribute nothing; a point with D1 = 0 but
/// D2 > 0 makes the distance infinite.
pub fn mult_distance(d1: &dyn Distribution, d2: &dyn Distribution) -> Result<f64> {
    let points = support_union(d1, d2)?;
    let mut worst = 0.0f64;
    for a in &points {
        let p1 = d1.prob(a)?;
        let p2 = d2.prob(a)?;
        if p1 == 0.0 {
            if p2 > 0.0 {
                return Ok(f64::INFINITY);
            }
        } else {
            worst = worst.max((p2 / p1 - 1.0).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn asg(s: &str) -> Assignment {
        Assignment::from_bit_str(s).unwrap()
    }

    /// Brute-force evaluation of the union-of-products weight function,
    /// used as an independent oracle against the closed-form implementation.
    fn union_weight(k: usize, a: &Assignment) -> f64 {
        let selector = a.bit(3 * k);
        let low_ok = (0..2 * k).all(|i| a.bit(i));
        let weighted_ok = (2 * k..3 * k).all(|i| a.bit(i));
        let satisfied = (selector || low_ok) && (!selector || weighted_ok);
        if !satisfied {
            return 0.0;
        }
        let ones = (2 * k..3 * k).filter(|&i| a.bit(i)).count() as i32;
        3.0f64.powi(ones)
    }

    #[test]
    fn assignment_round_trip_and_errors() {
        let a = asg("1101");
        assert_eq!(a.dimension(), 4);
        assert!(a.bit(0) && a.bit(1) && !a.bit(2) && a.bit(3));
        assert_eq!(a.to_bit_str(), "1101");
        assert!(Assignment::from_bit_str("").is_err());
        assert!(Assignment::from_bit_str("10x1").is_err());
        assert!(Assignment::new(0b100, 2).is_err());
        assert_eq!(Assignment::new(0b10, 2).unwrap().to_bit_str(), "01");
    }

    #[test]
    fn explicit_uniform_probabilities() {
        let d = ExplicitDistribution::uniform(2).unwrap();
        assert_eq!(d.prob(&asg("00")).unwrap(), 0.25);
        assert_eq!(d.prob(&asg("11")).unwrap(), 0.25);
        assert_eq!(d.support().unwrap().len(), 4);
    }

    #[test]
    fn explicit_rejects_bad_tables() {
        // Sum far from one.
        assert!(ExplicitDistribution::new(1, [(asg("0"), 0.7), (asg("1"), 0.2)]).is_err());
        // Negative probability.
        assert!(ExplicitDistribution::new(1, [(asg("0"), 1.2), (asg("1"), -0.2)]).is_err());
        // Duplicate entry.
        assert!(ExplicitDistribution::new(1, [(asg("0"), 0.5), (asg("0"), 0.5)]).is_err());
        // Dimension mismatch inside the table.
        assert!(ExplicitDistribution::new(2, [(asg("0"), 1.0)]).is_err());
        // Too many variables for a table.
        assert!(ExplicitDistribution::uniform(25).is_err());
    }

    #[test]
    fn explicit_prob_errors_on_dimension_mismatch() {
        let d = ExplicitDistribution::uniform(3).unwrap();
        assert!(matches!(
            d.prob(&asg("01")),
            Err(Error::DimensionMismatch { expected: 3, actual: 2 })
        ));
    }

    #[test]
    fn point_mass_sampling_is_constant() {
        let d = ExplicitDistribution::point_mass(asg("0110")).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(d.sample(&mut rng), asg("0110"));
        }
    }

    #[test]
    fn uniform_single_bit_frequency() {
        let d = ExplicitDistribution::uniform(1).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let ones: u32 = (0..10_000).map(|_| d.sample(&mut rng).bit(0) as u32).sum();
        let frac = f64::from(ones) / 10_000.0;
        assert!((0.47..=0.53).contains(&frac), "fraction of ones was {frac}");
    }

    #[test]
    fn product_prob_and_degenerate_bits() {
        let d = ProductDistribution::new(vec![1.0, 1.0, 0.0]).unwrap();
        assert_eq!(d.prob(&asg("110")).unwrap(), 1.0);
        assert_eq!(d.prob(&asg("111")).unwrap(), 0.0);
        assert_eq!(d.support().unwrap(), vec![asg("110")]);

        let mut rng = ChaCha12Rng::seed_from_u64(3);
        assert_eq!(d.sample(&mut rng), asg("110"));
    }

    #[test]
    fn product_rejects_out_of_range_marginals() {
        assert!(ProductDistribution::new(vec![0.5, 1.1]).is_err());
        assert!(ProductDistribution::new(vec![]).is_err());
        // 2000 coins of bias 1e-4 would drive the minimum probability
        // below 2^-1000 — but length alone (>128) already fails.
        assert!(ProductDistribution::new(vec![0.5; 129]).is_err());
        // 70 extremely skewed bits underflow the minimum-probability floor:
        // log2(1e-5) ≈ -16.6, times 70 ≈ -1163 < -1000.
        assert!(ProductDistribution::new(vec![1e-5; 70]).is_err());
        assert!(ProductDistribution::new(vec![1e-5; 50]).is_ok());
    }

    #[test]
    fn union_matches_bruteforce_enumeration_small_k() {
        for k in 1..=3 {
            let d = UnionOfProducts::new(k).unwrap();
            let n = 3 * k + 1;
            let mut z = 0.0;
            for a in Assignment::all(n).unwrap() {
                z += union_weight(k, &a);
            }
            assert_eq!(z, d.normalizer(), "normalizer mismatch at k={k}");
            assert_eq!(d.normalizer(), 4.0f64.powi(k as i32) * (1.0 + 3.0f64.powi(k as i32)));
            let mut support_count = 0u64;
            let mut total = 0.0;
            for a in Assignment::all(n).unwrap() {
                let expected = union_weight(k, &a) / z;
                let got = d.prob(&a).unwrap();
                assert!(
                    (expected - got).abs() < 1e-15,
                    "prob mismatch at k={k}, σ={a}: {expected} vs {got}"
                );
                if got > 0.0 {
                    support_count += 1;
                }
                total += got;
            }
            assert_eq!(support_count, (1 << k) + (1 << (2 * k)));
            assert_eq!(u128::from(support_count), d.support_size());
            assert!((total - 1.0).abs() < 1e-9);
            let mut support = d.support().unwrap();
            support.sort();
            assert_eq!(support.len() as u128, d.support_size());
        }
    }

    #[test]
    fn union_k1_specific_points() {
        let d = UnionOfProducts::new(1).unwrap();
        assert_eq!(d.normalizer(), 16.0);
        // Selector on but weighted bit unset: unsatisfied, zero probability.
        assert_eq!(d.prob(&asg("1101")).unwrap(), 0.0);
        // Selector off, low block forced on, weighted bit free.
        assert_eq!(d.prob(&asg("1100")).unwrap(), 1.0 / 16.0);
        assert_eq!(d.prob(&asg("1110")).unwrap(), 3.0 / 16.0);
        // Selector on, weighted bit forced on, low bits free.
        assert_eq!(d.prob(&asg("0011")).unwrap(), 3.0 / 16.0);
        assert_eq!(d.prob(&asg("1011")).unwrap(), 3.0 / 16.0);
    }

    #[test]
    fn union_sampling_converges_in_tv() {
        let d = UnionOfProducts::new(1).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let mut counts: HashMap<Assignment, u64> = HashMap::new();
        let draws = 100_000u64;
        for _ in 0..draws {
            *counts.entry(d.sample(&mut rng)).or_default() += 1;
        }
        let mut tv = 0.0;
        for a in Assignment::all(4).unwrap() {
            let emp = *counts.get(&a).unwrap_or(&0) as f64 / draws as f64;
            tv += (emp - d.prob(&a).unwrap()).abs();
        }
        tv /= 2.0;
        assert!(tv <= 0.02, "empirical TV after {draws} draws was {tv}");
    }

    #[test]
    fn union_large_k_closed_form_still_works() {
        // n = 127 — far beyond anything enumerable.
        let d = UnionOfProducts::new(42).unwrap();
        assert_eq!(d.dimension(), 127);
        let all_ones = Assignment::new((1u128 << 127) - 1, 127).unwrap();
        let p = d.prob(&all_ones).unwrap();
        // All-ones satisfies the selector-on branch: weight 3^42.
        let expected = 3.0f64.powi(42) / (4.0f64.powi(42) * (1.0 + 3.0f64.powi(42)));
        assert!((p - expected).abs() < 1e-60);
        assert!(d.support().is_err(), "support of 2^84 points must refuse to enumerate");
        assert!(UnionOfProducts::new(43).is_err());
    }

    #[test]
    fn loglinear_full_support_matches_enumeration() {
        let theta = vec![0.3, 1.1, 2.0];
        let d = LogLinearDistribution::new(theta.clone()).unwrap();
        let mut z = 0.0;
        for a in Assignment::all(3).unwrap() {
            let score: f64 = (0..3).filter(|&i| a.bit(i)).map(|i| theta[i]).sum();
            z += score.exp();
        }
        for a in Assignment::all(3).unwrap() {
            let score: f64 = (0..3).filter(|&i| a.bit(i)).map(|i| theta[i]).sum();
            let expected = score.exp() / z;
            assert!((d.prob(&a).unwrap() - expected).abs() < 1e-12);
        }
        let total: f64 = Assignment::all(3)
            .unwrap()
            .map(|a| d.prob(&a).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn loglinear_constrained_support() {
        // Restrict to even-weight assignments of 4 bits.
        let pred: SupportPredicate = Arc::new(|a: &Assignment| a.ones_in_range(0, 4) % 2 == 0);
        let d = LogLinearDistribution::with_support(vec![0.5; 4], pred).unwrap();
        assert_eq!(d.support().unwrap().len(), 8);
        assert_eq!(d.prob(&asg("1000")).unwrap(), 0.0);
        let total: f64 = d
            .support()
            .unwrap()
            .iter()
            .map(|a| d.prob(a).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-9);
        // Constrained instances beyond n = 24 are rejected outright.
        let wide: SupportPredicate = Arc::new(|_| true);
        assert!(LogLinearDistribution::with_support(vec![0.5; 25], wide).is_err());
    }

    #[test]
    fn loglinear_rejects_non_positive_theta() {
        assert!(LogLinearDistribution::new(vec![0.5, 0.0]).is_err());
        assert!(LogLinearDistribution::new(vec![0.5, -1.0]).is_err());
        assert!(LogLinearDistribution::new(vec![f64::NAN]).is_err());
        // Normalizer would push the all-zero assignment below 2^-1000.
        assert!(LogLinearDistribution::new(vec![10.0; 128]).is_err());
    }

    #[test]
    fn tv_distance_known_values() {
        let u2 = ExplicitDistribution::uniform(1).unwrap();
        assert_eq!(tv_distance(&u2, &u2).unwrap(), 0.0);

        let skew = ExplicitDistribution::new(1, [(asg("0"), 1.0)]).unwrap();
        assert_eq!(tv_distance(&u2, &skew).unwrap(), 0.5);

        let a = ExplicitDistribution::point_mass(asg("00")).unwrap();
        let b = ExplicitDistribution::point_mass(asg("11")).unwrap();
        assert_eq!(tv_distance(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn tv_distance_checks_dimensions() {
        let a = ExplicitDistribution::uniform(2).unwrap();
        let b = ExplicitDistribution::uniform(3).unwrap();
        assert!(tv_distance(&a, &b).is_err());
    }

    #[test]
    fn mult_distance_known_values() {
        let u = ExplicitDistribution::uniform(1).unwrap();
        assert_eq!(mult_distance(&u, &u).unwrap(), 0.0);

        let skew = ExplicitDistribution::new(1, [(asg("0"), 0.6), (asg("1"), 0.4)]).unwrap();
        let d = mult_distance(&u, &skew).unwrap();
        assert!((d - 0.2).abs() < 1e-12);

        // Mass outside the reference support → infinite ratio.
        let narrow = ExplicitDistribution::point_mass(asg("0")).unwrap();
        assert_eq!(mult_distance(&narrow, &u).unwrap(), f64::INFINITY);
        // The reverse direction stays finite: |0/p − 1| = 1.
        assert_eq!(mult_distance(&u, &narrow).unwrap(), 1.0);
    }

    #[test]
    fn tv_at_most_half_mult_distance_randomized() {
        // 2·dTV(P,Q) ≤ d∞(P,Q) on shared supports, checked over 1000
        // random table pairs.
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        for round in 0..1000 {
            let n = 1 + (round % 6);
            let points: Vec<Assignment> = Assignment::all(n).unwrap().collect();
            let w1: Vec<f64> = points.iter().map(|_| rng.gen::<f64>() + 1e-3).collect();
            let w2: Vec<f64> = points.iter().map(|_| rng.gen::<f64>() + 1e-3).collect();
            let d1 = ExplicitDistribution::from_weights(
                n,
                points.iter().copied().zip(w1.iter().copied()),
            )
            .unwrap();
            let d2 = ExplicitDistribution::from_weights(
                n,
                points.iter().copied().zip(w2.iter().copied()),
            )
            .unwrap();
            let tv = tv_distance(&d1, &d2).unwrap();
            let inf = mult_distance(&d1, &d2).unwrap();
            assert!(
                2.0 * tv <= inf + 1e-12,
                "round {round}: 2·tv = {} exceeded d∞ = {}",
                2.0 * tv,
                inf
            );
        }
    }

    #[test]
    fn sampling_converges_for_all_families() {
        // 10^6 draws per family, empirical TV against the exact table ≤ 0.01.
        let mut rng = ChaCha12Rng::seed_from_u64(40);
        let union = UnionOfProducts::new(3).unwrap();
        let product = ProductDistribution::new(vec![
            0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95,
        ])
        .unwrap();
        let loglin = LogLinearDistribution::new(vec![2.0; 10]).unwrap();
        let weights: Vec<(Assignment, f64)> = Assignment::all(8)
            .unwrap()
            .map(|a| (a, rng.gen::<f64>().max(1e-6)))
            .collect();
        let explicit = ExplicitDistribution::from_weights(8, weights).unwrap();

        let cases: [(&str, &dyn Distribution); 4] = [
            ("union_of_products k=3", &union),
            ("product n=10", &product),
            ("loglinear n=10", &loglin),
            ("explicit n=8", &explicit),
        ];
        for (name, d) in cases {
            let draws = 1_000_000u64;
            let mut counts: HashMap<Assignment, u64> = HashMap::new();
            for _ in 0..draws {
                *counts.entry(d.sample(&mut rng)).or_default() += 1;
            }
            let mut tv = 0.0;
            for a in Assignment::all(d.dimension()).unwrap() {
                let emp = *counts.get(&a).unwrap_or(&0) as f64 / draws as f64;
                tv += (emp - d.prob(&a).unwrap()).abs();
            }
            tv /= 2.0;
            assert!(tv <= 0.01, "{name}: empirical TV after {draws} draws was {tv}");
        }
    }
}
