//! Tests a perfect sampler (Q = P) against the n = 7 union-of-products
//! benchmark and prints the full report.
//!
//! An ideal sampler has d∞(P,Q) = 0 ≤ ε, so the test accepts with
//! probability at least 1 − δ; with the default parameters it accepts in
//! practice on almost every seed.
//!
//! Run with: `cargo run --example accept_ideal`

use std::sync::Arc;

use barbarik3::{
    barbarik3, DualOracle, DynDistribution, SamplerUnderTest, TestParams, UnionOfProducts,
};

fn main() -> barbarik3::Result<()> {
    let p: DynDistribution = Arc::new(UnionOfProducts::new(2)?);
    let dual = DualOracle::new(p.clone());
    let sampler = SamplerUnderTest::new(p);

    let params = TestParams::default(); // ε = 0.05, η = 0.9, δ = 0.2
    let report = barbarik3(&dual, &sampler, &params, 42)?;

    println!("verdict:          {}", report.verdict);
    println!("bucket count k:   {}", report.k);
    println!("phase-1 estimate: {:.5}", report.d_hat.unwrap());
    println!(
        "sampler queries:  {} SAMP + {} PCOND",
        report.ledger.samp_q, report.ledger.pcond
    );
    println!("target queries:   {} SAMP + {} prob lookups", report.ledger.samp_p, report.ledger.dual_prob);
    println!();
    println!("full report:\n{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
