//! Runs the shipped property suites — the same ones behind the `check`
//! subcommand — and prints the pass/fail table.
//!
//! The suites validate, by independent computation, the inequalities the
//! test's correctness rests on: the overlap lower bound, the pair-bias
//! threshold separation, the distance identity 2·d_TV ≤ d∞, and the
//! empirical-learning sample bound.
//!
//! Run with: `cargo run --example property_checks`

use barbarik3::reference::{run_all_suites, DEFAULT_SUITE_SEED};

fn main() -> barbarik3::Result<()> {
    let results = run_all_suites(DEFAULT_SUITE_SEED)?;
    let mut all_passed = true;
    for r in &results {
        println!("{r}");
        all_passed &= r.passed;
    }
    if !all_passed {
        std::process::exit(1);
    }
    Ok(())
}
