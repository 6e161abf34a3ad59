//! Benchmark descriptors: the JSON format, generation, parsing, and
//! building the distribution they describe.
//!
//! A descriptor names a family and its parameters:
//!
//! ```json
//! { "family": "union_of_products", "params": { "k": 2 }, "seed": 7 }
//! ```
//!
//! Explicit tables spell out assignments as fixed-width binary strings.
//!
//! Run with: `cargo run --example descriptors`

use barbarik3::harness::{generate_setting_a, BenchmarkDescriptor};
use barbarik3::{Assignment, FamilyDescriptor};

fn main() -> barbarik3::Result<()> {
    // Generate the first few sweep benchmarks: n = 3k+1 per instance.
    let descriptors = generate_setting_a(&[4, 7, 10])?;
    for d in &descriptors {
        println!("{}  (n = {}, seed = {})", d.label(), d.dimension(), d.seed);
    }
    println!("\nwire format of {}:\n{}\n", descriptors[1].label(), descriptors[1].to_json()?);

    // Parse an explicit-table descriptor from inline JSON and build it.
    let inline = r#"{
        "family": "explicit",
        "params": { "n": 3, "table": [["000", 0.5], ["111", 0.25], ["010", 0.25]] },
        "seed": 11
    }"#;
    let d = BenchmarkDescriptor::from_json(inline)?;
    let dist = d.build()?;
    println!("{} built; P(000) = {}", d.label(), dist.prob(&Assignment::from_bit_str("000")?)?);

    // Descriptors round-trip through serde, so configs can be stored
    // alongside results.
    let product = BenchmarkDescriptor {
        family: FamilyDescriptor::Product { marginals: vec![0.9, 0.5, 0.1] },
        seed: 3,
    };
    let json = product.to_json()?;
    assert_eq!(BenchmarkDescriptor::from_json(&json)?, product);
    println!("\nproduct descriptor round-trips:\n{json}");
    Ok(())
}
