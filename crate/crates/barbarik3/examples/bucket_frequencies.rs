//! Compares the exact bucket distribution of a target (computed by
//! enumerating its support) with empirical bucket frequencies from the
//! sampling oracle — the consistency that phase 1 of the test relies on.
//!
//! Bucket i holds the assignments with 2^{−i} < P(σ) ≤ 2^{−i+1}; bucket 0
//! is the negligible tail, which carries mass at most η/100 by the choice
//! of k.
//!
//! Run with: `cargo run --example bucket_frequencies`

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use barbarik3::bucketing::{compute_k, sample_bucket, BucketHistogram, BucketingContext};
use barbarik3::oracles::QueryLedger;
use barbarik3::reference::bruteforce_bucket_distribution;
use barbarik3::{DualOracle, DynDistribution, UnionOfProducts};

fn main() -> barbarik3::Result<()> {
    let p: DynDistribution = Arc::new(UnionOfProducts::new(2)?);
    let k = compute_k(p.dimension(), 0.9);
    println!("n = {}, k = {}", p.dimension(), k);

    let exact = bruteforce_bucket_distribution(p.as_ref(), k)?;

    let dual = DualOracle::new(p);
    let ctx = BucketingContext::new(&dual, k);
    let ledger = QueryLedger::new();
    let mut rng = ChaCha12Rng::seed_from_u64(5);
    let draws = 100_000;
    let mut hist = BucketHistogram::new(k);
    for _ in 0..draws {
        hist.record(sample_bucket(&ctx, &dual, &mut rng, &ledger)?);
    }

    println!("{:>6}  {:>10}  {:>10}", "bucket", "exact", "empirical");
    for i in 0..=k {
        if exact.prob(i) > 0.0 || hist.count(i) > 0 {
            println!("{:>6}  {:>10.6}  {:>10.6}", i, exact.prob(i), hist.freq(i));
        }
    }
    println!("\nTV(empirical, exact) = {:.6} after {draws} draws", hist.tv_to_exact(&exact)?);
    println!(
        "oracle cost: {} SAMP + {} probability lookups",
        ledger.snapshot().samp_p,
        ledger.snapshot().dual_prob
    );
    Ok(())
}
