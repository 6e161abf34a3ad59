//! Budget enforcement: what happens when the sampler-query allowance runs
//! out before the test can reach a verdict.
//!
//! Every SAMP and PCOND query to the sampler under test is charged against
//! a budget (default 10⁸). The cap is enforced at the oracle boundary, so
//! the ledger can never overshoot; the run ends with a `budget_exceeded`
//! verdict instead of an error.
//!
//! Run with: `cargo run --example starved_budget`

use std::sync::Arc;

use barbarik3::harness::report_sample_budget;
use barbarik3::{
    barbarik3, DualOracle, DynDistribution, ProductDistribution, SamplerUnderTest, TestParams,
    Verdict,
};

fn main() -> barbarik3::Result<()> {
    // Phase 1 alone needs 63210 draws per side at n = 24.
    let needed = report_sample_budget(24, 0.9, 0.2)?.samples;
    let budget = 1000;
    println!("phase-1 needs {needed} sampler draws; granting only {budget}");

    let p: DynDistribution = Arc::new(ProductDistribution::new(vec![0.5; 24])?);
    let dual = DualOracle::new(p.clone());
    let sampler = SamplerUnderTest::new(p).with_budget(budget);

    let report = barbarik3(&dual, &sampler, &TestParams::default(), 3)?;
    assert_eq!(report.verdict, Verdict::BudgetExceeded);
    println!("verdict: {}", report.verdict);
    println!(
        "sampler queries at stop: {} (cap {})",
        report.ledger.samp_q + report.ledger.pcond,
        report.budget
    );
    println!("phase-1 estimate: {:?} (never finished)", report.d_hat);
    Ok(())
}
