//! The two realizations of the pair-conditional oracle, compared on the
//! same bias-estimation task.
//!
//! `exact` draws a Bernoulli with the true conditional probability
//! Q(a)/(Q(a)+Q(b)) — one internal random number per query. `rejection`
//! draws from Q until the sample lands in {a, b}, which is what a real
//! conditional sampler does; the ledger's `pcond_rejection_attempts`
//! records how many raw draws that took. Both modes charge one PCOND query
//! to the sampler budget per call and converge to the same bias.
//!
//! Run with: `cargo run --example pcond_modes`

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use barbarik3::oracles::{PcondMode, QueryLedger};
use barbarik3::tester::bias;
use barbarik3::{Assignment, DynDistribution, SamplerUnderTest, UnionOfProducts};

fn main() -> barbarik3::Result<()> {
    let q: DynDistribution = Arc::new(UnionOfProducts::new(1)?);
    // Two assignments with Q-probabilities 3/16 and 1/16: the true
    // conditional bias toward the first is 3/4.
    let a = Assignment::from_bit_str("1110")?;
    let b = Assignment::from_bit_str("1100")?;
    let r = 20_000;

    for mode in [PcondMode::Exact, PcondMode::Rejection { max_attempts: 1_000_000 }] {
        let sampler = SamplerUnderTest::new(q.clone()).with_mode(mode);
        let ledger = QueryLedger::new();
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let c = bias(&sampler, &a, &b, r, &mut rng, &ledger)?;
        let counts = ledger.snapshot();
        println!(
            "{:<20} bias = {c:.4} (true 0.75)  pcond = {}  internal draws = {}",
            mode.to_string(),
            counts.pcond,
            counts.pcond_rejection_attempts
        );
    }
    Ok(())
}
