//! Tests a broken sampler that moved 95% of the probability mass away from
//! the target's heaviest points, and shows where the test catches it.
//!
//! The fault construction is verified: the built Q provably has
//! d_TV(P,Q) ≥ 0.95 > η = 0.9, so the test must reject with probability at
//! least 1 − δ. A fault this blatant is usually caught by phase 1 (the
//! bucket distributions no longer match); subtler faults that respect the
//! bucket profile fall through to phase 2's pair-bias checks.
//!
//! Run with: `cargo run --example reject_mass_swap`

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use barbarik3::oracles::make_faulty_sampler;
use barbarik3::{
    barbarik3, tv_distance, DualOracle, DynDistribution, FaultModel, SamplerUnderTest,
    TestParams, UnionOfProducts,
};

fn main() -> barbarik3::Result<()> {
    let p: DynDistribution = Arc::new(UnionOfProducts::new(2)?);

    let mut fault_rng = ChaCha12Rng::seed_from_u64(7);
    let q = make_faulty_sampler(&p, &FaultModel::MassSwap { fraction: 0.95 }, &mut fault_rng)?;
    println!(
        "constructed sampler with exact d_TV(P,Q) = {:.6}",
        tv_distance(p.as_ref(), q.as_ref())?
    );

    let dual = DualOracle::new(p);
    let sampler = SamplerUnderTest::new(q);
    let report = barbarik3(&dual, &sampler, &TestParams::default(), 1)?;

    println!("verdict:          {}", report.verdict);
    match report.reject_phase {
        Some(phase) => println!("rejected by:      {phase} phase"),
        None => println!("rejected by:      (not rejected!)"),
    }
    if let Some(d) = report.d_hat {
        println!(
            "phase-1 estimate: {d:.5} vs threshold ε/2 + θ = {:.5}",
            report.params.epsilon / 2.0 + report.theta
        );
    }
    if let Some(e) = &report.evidence {
        println!(
            "witness pair:     bucket {}, P-side {} vs Q-side {}, bias {:.4} ≤ midpoint {:.4}",
            e.bucket,
            e.p,
            e.q,
            e.c_hat,
            (e.h + e.l) / 2.0
        );
    }
    println!(
        "sampler queries:  {}",
        report.ledger.samp_q + report.ledger.pcond
    );
    Ok(())
}
