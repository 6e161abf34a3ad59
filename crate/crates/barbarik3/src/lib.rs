//! Closeness testing for samplers over {0,1}^n.
//!
//! Given a target distribution P with **dual** access (sampling plus exact
//! point probabilities) and a sampler Q under test with **SAMP** and
//! **PCOND** access (plain draws, and draws conditioned on a two-element
//! set), [`barbarik3`] decides with confidence 1 − δ between
//!
//! - **Accept**: Q tracks P within multiplicative error ε at every point
//!   (d∞(P,Q) ≤ ε), and
//! - **Reject**: Q is at least η away in total variation (d_TV(P,Q) > η).
//!
//! The gap between the two regimes is what makes the test cheap: the query
//! cost is Õ(√n/η²) samples plus pair-conditional draws, far below the
//! Ω(2^{n/2}) cost of closeness testing from plain samples alone.
//!
//! # How it works
//!
//! The cube is partitioned into k + 1 dyadic **buckets** by target
//! probability: bucket i holds the points with 2^{−i} < P(σ) ≤ 2^{−i+1},
//! and bucket 0 collects the negligible tail (mass at most η/100 by the
//! choice of k). The test then
//!
//! 1. estimates the distance between the bucket-index distributions of P
//!    and Q to within θ = η/20 and rejects if it is already too large
//!    ([`outside_bucket`]), and otherwise
//! 2. repeatedly draws a few samples from each side, and wherever a bucket
//!    is hit by both, compares Q's conditional bias on the pair against the
//!    bias the exact probabilities demand ([`inside_bucket`], [`bias`]).
//!
//! Every oracle call is tallied in a [`QueryLedger`], and SAMP+PCOND
//! queries to Q are capped by a budget (default 10⁸) so runs on oversized
//! instances fail fast with a [`Verdict::BudgetExceeded`] rather than
//! spinning.
//!
//! # Quick start
//!
//! ```
//! use barbarik3::{barbarik3, DualOracle, SamplerUnderTest, TestParams, UnionOfProducts, Verdict};
//! use std::sync::Arc;
//!
//! // Target: the n = 4 union-of-products benchmark. Sampler: P itself.
//! let p: barbarik3::DynDistribution = Arc::new(UnionOfProducts::new(1)?);
//! let dual = DualOracle::new(p.clone());
//! let sampler = SamplerUnderTest::new(p);
//!
//! let params = TestParams::default(); // ε = 0.05, η = 0.9, δ = 0.2
//! let report = barbarik3(&dual, &sampler, &params, 7)?;
//!
//! assert_eq!(report.verdict, Verdict::Accept);
//! println!("verdict: {} after {} sampler queries",
//!          report.verdict, report.ledger.samp_q + report.ledger.pcond);
//! # Ok::<(), barbarik3::Error>(())
//! ```
//!
//! # Module map
//!
//! - [`distributions`]: assignments, the distribution trait, the synthetic
//!   families (explicit, product, union-of-products, log-linear), and exact
//!   TV / multiplicative distances.
//! - [`oracles`]: dual and SAMP+PCOND oracle wrappers, the query ledger,
//!   budget enforcement, and fault models for building samplers that are
//!   provably close to or far from a target.
//! - [`bucketing`]: the dyadic bucket partition, bucket lookup, and bucket
//!   histograms with exact rational TV distance.
//! - [`tester`]: the three-phase test itself with its derived parameters.
//! - [`reference`]: independent brute-force oracles and the shipped
//!   property suites backing the `check` subcommand.
//! - [`harness`]: benchmark descriptors (JSON), trial sweeps, budget
//!   tables, and CSV emission for the CLI.
//!
//! The `examples/` directory exercises each capability end to end; start
//! with `accept_ideal` and `reject_mass_swap`.

pub mod bucketing;
pub mod distributions;
pub mod error;
pub mod harness;
pub mod oracles;
pub mod reference;
pub mod tester;

pub use bucketing::{
    bucket_of_prob, compute_k, sample_bucket, BucketDistribution, BucketHistogram,
    BucketingContext,
};
pub use distributions::{
    mult_distance, tv_distance, Assignment, Distribution, DynDistribution,
    ExplicitDistribution, LogLinearDistribution, ProductDistribution, UnionOfProducts,
};
pub use error::{Error, Result};
pub use harness::{
    generate_setting_a, report_sample_budget, run_single, run_trials, BenchmarkDescriptor,
    FamilyDescriptor, RunConfig, SampleBudgetRow, TrialSummary,
};
pub use oracles::{
    make_faulty_sampler, DualOracle, FaultModel, PcondMode, QueryLedger, SamplerUnderTest,
    TvFarMode, DEFAULT_SAMPLER_BUDGET,
};
pub use reference::{
    bruteforce_bucket_distribution, check_learning_bound, check_overlap_bound,
    check_threshold_prop, run_all_suites, PropertyCheckResult,
};
pub use tester::{
    barbarik3, bias, derive_inside_params, inside_bucket, outside_bucket,
    outside_sample_count, pair_thresholds, InsideParams, PairEvidence, RejectPhase,
    TestParams, TestReport, Verdict,
};
