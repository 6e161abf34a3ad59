//! Prints the phase-1 per-side sample budget for the default benchmark
//! sweep (n = 4, 7, …, 118) at the standard parameters η = 0.9, δ = 0.2.
//!
//! The across-bucket phase draws max(4(k+1)/θ², 8·ln(4/δ')/θ²) samples per
//! side with θ = η/20 and δ' = δ/2, so the budget is a closed-form function
//! of the dimension alone — no test run needed.
//!
//! Run with: `cargo run --example budget_table`

use barbarik3::harness::{default_setting_a_dimensions, report_sample_budget};

fn main() -> barbarik3::Result<()> {
    println!("{:>4}  {:>4}  {:>9}  {:>9}", "n", "k", "samples", "rounded");
    for n in default_setting_a_dimensions() {
        let row = report_sample_budget(n, 0.9, 0.2)?;
        println!(
            "{:>4}  {:>4}  {:>9}  {:>9}",
            row.n, row.k, row.samples, row.rounded_to_thousand
        );
    }
    Ok(())
}
