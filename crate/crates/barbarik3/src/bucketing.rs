//! Dyadic probability buckets.
//!
//! Bucket i (for i in 1..=k) holds the assignments whose target probability
//! lies in (2^-i, 2^-i+1]; bucket 0 is the catch-all for probability at most
//! 2^-k (including zero). The bucket count k = n + ⌈log2(100/η)⌉ is chosen so
//! the catch-all carries at most η/100 of the target's mass.
//!
//! Boundary rule: an exact power of two belongs to the higher-index bucket —
//! p = 2^-i+1 lands in bucket i. Bucket search therefore compares against
//! exact powers of two; a logarithm only seeds the search and is always
//! corrected by direct comparison, so no assignment is ever misfiled by
//! floating-point rounding of the log.

use rand::{Rng, RngCore};

use crate::distributions::Assignment;
use crate::error::{Error, Result};
use crate::oracles::{DualOracle, QueryLedger, SampSource};

/// Number of buckets k = n + c where c is the smallest integer with
/// 2^c ≥ 100/η. This makes 2^(n-k) ≤ η/100.
pub fn compute_k(n: usize, eta: f64) -> usize {
    assert!(
        eta.is_finite() && eta > 0.0 && eta <= 1.0,
        "farness parameter must lie in (0,1], got {eta}"
    );
    let target = 100.0 / eta;
    let mut c = target.log2().ceil() as i32;
    // The logarithm is a seed; settle the boundary by exact comparison.
    while c > 0 && exp2i(c - 1) >= target {
        c -= 1;
    }
    while exp2i(c) < target {
        c += 1;
    }
    n + c as usize
}

/// 2^i as an exact f64 (exact for |i| ≤ 1022).
pub fn exp2i(i: i32) -> f64 {
    2.0f64.powi(i)
}

/// Maps a point probability to its bucket index in 0..=k.
///
/// Returns the unique i in 1..=k with 2^-i < p ≤ 2^-i+1, or 0 when p ≤ 2^-k.
pub fn bucket_of_prob(p: f64, k: usize) -> usize {
    if !(p > 0.0) {
        return 0;
    }
    if p <= exp2i(-(k as i32)) {
        return 0;
    }
    if p >= 1.0 {
        return 1;
    }
    let mut i = (-p.log2()).floor() as i64 + 1;
    i = i.clamp(1, k as i64);
    while i > 1 && p > exp2i(1 - i as i32) {
        i -= 1;
    }
    while i < k as i64 && p <= exp2i(-(i as i32)) {
        i += 1;
    }
    i as usize
}

/// The target's dual oracle together with a bucket count.
pub struct BucketingContext<'a> {
    k: usize,
    dual: &'a DualOracle,
}

impl<'a> BucketingContext<'a> {
    pub fn new(dual: &'a DualOracle, k: usize) -> Self {
        Self { k, dual }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Bucket of one assignment; costs one dual probability query.
    pub fn bucket_index(&self, a: &Assignment, ledger: &QueryLedger) -> Result<usize> {
        let p = self.dual.prob(a, ledger)?;
        Ok(bucket_of_prob(p, self.k))
    }
}

/// Draws one assignment from `source` and buckets it by target probability.
/// Costs one SAMP query (on whichever counter the source logs) plus one dual
/// probability query.
pub fn sample_bucket(
    ctx: &BucketingContext<'_>,
    source: &dyn SampSource,
    rng: &mut dyn RngCore,
    ledger: &QueryLedger,
) -> Result<usize> {
    let a = source.draw(rng, ledger)?;
    ctx.bucket_index(&a, ledger)
}

// ---------------------------------------------------------------------------
// Distributions over bucket indices
// ---------------------------------------------------------------------------

/// An exact distribution over bucket indices 0..=k.
#[derive(Clone, Debug, PartialEq)]
pub struct BucketDistribution {
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl BucketDistribution {
    /// `probs[i]` is the mass of bucket i; the vector covers 0..=k.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidParams("bucket distribution needs at least bucket 0".into()));
        }
        let mut total = 0.0;
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidParams(format!(
                    "bucket {i} has invalid probability {p}"
                )));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParams(format!(
                "bucket probabilities must sum to 1 within 1e-9, got {total}"
            )));
        }
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for &p in &probs {
            acc += p;
            cumulative.push(acc);
        }
        Ok(Self { probs, cumulative })
    }

    pub fn k(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn prob(&self, i: usize) -> f64 {
        self.probs.get(i).copied().unwrap_or(0.0)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Draws a bucket index.
    pub fn sample(&self, rng: &mut dyn RngCore) -> usize {
        let u: f64 = rng.gen();
        let idx = self.cumulative.partition_point(|&c| c <= u);
        idx.min(self.probs.len() - 1)
    }

    /// Exact total-variation distance to another bucket distribution.
    pub fn tv_distance(&self, other: &BucketDistribution) -> Result<f64> {
        if self.probs.len() != other.probs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.probs.len(),
                actual: other.probs.len(),
            });
        }
        let sum: f64 = self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .sum();
        Ok(sum / 2.0)
    }
}

/// Empirical counts over bucket indices 0..=k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BucketHistogram {
    counts: Vec<u64>,
    total: u64,
}

impl BucketHistogram {
    pub fn new(k: usize) -> Self {
        Self { counts: vec![0; k + 1], total: 0 }
    }

    pub fn record(&mut self, bucket: usize) {
        self.counts[bucket] += 1;
        self.total += 1;
    }

    pub fn k(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, bucket: usize) -> u64 {
        self.counts.get(bucket).copied().unwrap_or(0)
    }

    /// Empirical frequency of one bucket.
    pub fn freq(&self, bucket: usize) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.count(bucket) as f64 / self.total as f64
    }

    /// Exact total-variation distance between two empirical distributions,
    /// computed in integer arithmetic: ½ Σ |c1·N2 − c2·N1| / (N1·N2).
    pub fn tv_distance(&self, other: &BucketHistogram) -> Result<f64> {
        if self.counts.len() != other.counts.len() {
            return Err(Error::DimensionMismatch {
                expected: self.counts.len(),
                actual: other.counts.len(),
            });
        }
        if self.total == 0 || other.total == 0 {
            return Err(Error::EmptySamples);
        }
        let n1 = self.total as u128;
        let n2 = other.total as u128;
        let mut num: u128 = 0;
        for (&c1, &c2) in self.counts.iter().zip(&other.counts) {
            let a = c1 as u128 * n2;
            let b = c2 as u128 * n1;
            num += a.abs_diff(b);
        }
        Ok(num as f64 / (2.0 * n1 as f64 * n2 as f64))
    }

    /// Total-variation distance to an exact bucket distribution.
    pub fn tv_to_exact(&self, exact: &BucketDistribution) -> Result<f64> {
        if self.counts.len() != exact.probs().len() {
            return Err(Error::DimensionMismatch {
                expected: exact.probs().len(),
                actual: self.counts.len(),
            });
        }
        if self.total == 0 {
            return Err(Error::EmptySamples);
        }
        let sum: f64 = self
            .counts
            .iter()
            .zip(exact.probs())
            .map(|(&c, &p)| (c as f64 / self.total as f64 - p).abs())
            .sum();
        Ok(sum / 2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{DynDistribution, ExplicitDistribution};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use std::sync::Arc;

    /// Reference bucket search: scan every interval directly.
    fn bucket_by_linear_scan(p: f64, k: usize) -> usize {
        for i in 1..=k {
            let lo = 2.0f64.powi(-(i as i32));
            let hi = 2.0f64.powi(1 - i as i32);
            if lo < p && p <= hi {
                return i;
            }
        }
        0
    }

    #[test]
    fn compute_k_known_values() {
        assert_eq!(compute_k(10, 0.9), 17);
        assert_eq!(compute_k(24, 0.9), 31);
        assert_eq!(compute_k(1, 1.0), 8);
    }

    #[test]
    fn compute_k_catch_all_mass_bound() {
        for n in [1usize, 2, 5, 10, 24, 64, 118] {
            for eta in [0.05, 0.1, 0.3, 0.5, 0.78125, 0.9, 1.0] {
                let k = compute_k(n, eta);
                let tail = 2.0f64.powi(n as i32 - k as i32);
                assert!(
                    tail <= eta / 100.0 + 1e-18,
                    "n={n}, eta={eta}: 2^(n-k) = {tail} exceeds eta/100"
                );
                // k is minimal: one bucket fewer would break the bound.
                let slack = 2.0f64.powi(n as i32 - k as i32 + 1);
                assert!(slack > eta / 100.0, "n={n}, eta={eta}: k={k} is not minimal");
            }
        }
    }

    #[test]
    fn bucket_boundaries_are_exact() {
        let k = 20;
        assert_eq!(bucket_of_prob(1.0, k), 1);
        assert_eq!(bucket_of_prob(0.5, k), 2);
        assert_eq!(bucket_of_prob(0.0, k), 0);
        assert_eq!(bucket_of_prob(-0.1, k), 0);
        assert_eq!(bucket_of_prob(f64::NAN, k), 0);
        // Exact powers of two land in the higher-index bucket.
        assert_eq!(bucket_of_prob(2.0f64.powi(-4), k), 5);
        assert_eq!(bucket_of_prob(2.0f64.powi(-19), k), 20);
        // At or below 2^-k: catch-all.
        assert_eq!(bucket_of_prob(2.0f64.powi(-20), k), 0);
        assert_eq!(bucket_of_prob(2.0f64.powi(-21), k), 0);
        // Just above a boundary: lower-index bucket.
        let above = 2.0f64.powi(-4) * (1.0 + 1e-9);
        assert_eq!(bucket_of_prob(above, k), 4);
    }

    #[test]
    fn bucket_of_prob_handles_tiny_probabilities() {
        // Far below the 2^-52 log-seeding threshold but far above underflow.
        let k = 150;
        let p = 2.0f64.powi(-140);
        assert_eq!(bucket_of_prob(p, k), 141);
        assert_eq!(bucket_of_prob(p * 1.5, k), 140);
    }

    proptest! {
        #[test]
        fn bucket_search_agrees_with_linear_scan(
            mantissa in 0.25f64..1.0,
            scale in -60i32..1,
            k in 1usize..80,
        ) {
            let p = mantissa * 2.0f64.powi(scale);
            prop_assert_eq!(bucket_of_prob(p, k), bucket_by_linear_scan(p, k));
        }
    }

    #[test]
    fn sample_bucket_logs_one_samp_and_one_dual_query() {
        let point = Assignment::from_bit_str("0110").unwrap();
        let dist: DynDistribution = Arc::new(ExplicitDistribution::point_mass(point).unwrap());
        let dual = DualOracle::new(dist);
        let ctx = BucketingContext::new(&dual, 10);
        let ledger = QueryLedger::new();
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        for round in 1..=20u64 {
            let b = sample_bucket(&ctx, &dual, &mut rng, &ledger).unwrap();
            assert_eq!(b, 1, "a point mass always lands in bucket 1");
            let counts = ledger.snapshot();
            assert_eq!(counts.samp_p, round);
            assert_eq!(counts.dual_prob, round);
        }
    }

    #[test]
    fn uniform_distribution_fills_exactly_one_bucket() {
        // P(σ) = 2^-n exactly, an exact power of two → bucket n+1.
        let n = 6;
        let dist: DynDistribution = Arc::new(ExplicitDistribution::uniform(n).unwrap());
        let dual = DualOracle::new(dist);
        let k = compute_k(n, 0.9);
        let ctx = BucketingContext::new(&dual, k);
        let ledger = QueryLedger::new();
        for a in Assignment::all(n).unwrap() {
            assert_eq!(ctx.bucket_index(&a, &ledger).unwrap(), n + 1);
        }
    }

    #[test]
    fn histogram_tv_is_exact_rational() {
        let mut h1 = BucketHistogram::new(2);
        for b in [1, 1, 2, 2] {
            h1.record(b);
        }
        let mut h2 = BucketHistogram::new(2);
        for b in [1, 2, 2, 2] {
            h2.record(b);
        }
        assert_eq!(h1.tv_distance(&h2).unwrap(), 0.25);
        assert_eq!(h1.tv_distance(&h1).unwrap(), 0.0);

        // Unequal totals exercise the cross-multiplied path: (2/4, 2/4) vs
        // (1/2, 1/2) are identical distributions.
        let mut h3 = BucketHistogram::new(2);
        for b in [1, 2] {
            h3.record(b);
        }
        assert_eq!(h1.tv_distance(&h3).unwrap(), 0.0);
    }

    #[test]
    fn histogram_against_exact_distribution() {
        let mut h = BucketHistogram::new(2);
        for b in [0, 1, 1, 1] {
            h.record(b);
        }
        let exact = BucketDistribution::new(vec![0.5, 0.5, 0.0]).unwrap();
        // Empirical (0.25, 0.75, 0) vs (0.5, 0.5, 0): TV = 0.25.
        assert_eq!(h.tv_to_exact(&exact).unwrap(), 0.25);
    }

    #[test]
    fn empty_histograms_are_rejected() {
        let h = BucketHistogram::new(3);
        let full = {
            let mut f = BucketHistogram::new(3);
            f.record(1);
            f
        };
        assert!(matches!(h.tv_distance(&full), Err(Error::EmptySamples)));
        let exact = BucketDistribution::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(h.tv_to_exact(&exact), Err(Error::EmptySamples)));
    }

    #[test]
    fn bucket_distribution_validation() {
        assert!(BucketDistribution::new(vec![]).is_err());
        assert!(BucketDistribution::new(vec![0.5, 0.4]).is_err());
        assert!(BucketDistribution::new(vec![1.2, -0.2]).is_err());
        let d = BucketDistribution::new(vec![0.25, 0.75]).unwrap();
        assert_eq!(d.k(), 1);
        assert_eq!(d.prob(1), 0.75);
        assert_eq!(d.prob(7), 0.0);
    }

    #[test]
    fn bucket_distribution_sampling_matches_probs() {
        let d = BucketDistribution::new(vec![0.1, 0.0, 0.9]).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(14);
        let mut h = BucketHistogram::new(2);
        for _ in 0..100_000 {
            h.record(d.sample(&mut rng));
        }
        assert_eq!(h.count(1), 0);
        assert!(h.tv_to_exact(&d).unwrap() < 0.01);
    }
}
