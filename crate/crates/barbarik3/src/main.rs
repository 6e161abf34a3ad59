//! Command-line front end: benchmark generation, single tests, trial
//! sweeps, sample-budget tables, and the property-check suites.
//!
//! Exit codes: 0 success (including Reject verdicts — the run itself
//! succeeded), 1 runtime or property-suite failure, 2 configuration error,
//! 3 I/O error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use barbarik3::harness::{
    csv_document, csv_row, default_setting_a_dimensions, generate_setting_a,
    report_sample_budget, run_single, run_trials, BenchmarkDescriptor, RunConfig, CSV_HEADER,
};
use barbarik3::oracles::DEFAULT_SAMPLER_BUDGET;
use barbarik3::reference::{run_all_suites, DEFAULT_SUITE_SEED};
use barbarik3::{Error, FaultModel, PcondMode, Result, TestParams};

#[derive(Parser)]
#[command(
    name = "barbarik3",
    version,
    about = "Closeness testing for samplers over {0,1}^n with dual and pair-conditional oracle access"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate union-of-products benchmark descriptors (n = 3k+1)
    GenSettingA {
        /// Comma-separated dimensions; defaults to the 39-instance sweep
        /// n = 4, 7, ..., 118
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        n_list: Option<Vec<usize>>,
        /// Write one descriptor file per benchmark into this directory
        /// instead of printing a JSON array
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run a single seeded test against a benchmark
    Test {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run repeated independent trials with seeds seed, seed+1, ...
    Trials {
        #[command(flatten)]
        run: RunArgs,
        /// Number of trials
        #[arg(long, default_value_t = 10)]
        count: u64,
    },
    /// Print the phase-1 per-side sample budget without running anything
    Budget {
        /// Dimension; repeatable. Defaults to the 39-instance sweep.
        #[arg(long = "n")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 0.9)]
        eta: f64,
        #[arg(long, default_value_t = 0.2)]
        delta: f64,
    },
    /// Run the property-check suites and print a pass/fail table
    Check {
        #[arg(long, default_value_t = DEFAULT_SUITE_SEED)]
        seed: u64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Benchmark descriptor: path to a JSON file, or inline JSON
    #[arg(long)]
    benchmark: String,
    /// Fault model applied to the target to obtain the sampler under test:
    /// ideal | mult-noise:EPS | mass-swap:FRAC | tv-far:{uniform|reversed}:MIN
    #[arg(long, default_value = "ideal")]
    sampler: String,
    /// Multiplicative closeness threshold ε (admissible: 0 ≤ ε < η/11.6)
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    /// Total-variation farness threshold η ∈ (0,1]
    #[arg(long, default_value_t = 0.9)]
    eta: f64,
    /// Failure probability δ ∈ (0,0.5]
    #[arg(long, default_value_t = 0.2)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sampler query budget (SAMP from Q plus PCOND)
    #[arg(long, default_value_t = DEFAULT_SAMPLER_BUDGET)]
    budget: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// PCOND realization: exact | rejection[:CAP]
    #[arg(long, default_value = "exact")]
    pcond_mode: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn load_descriptor(spec: &str) -> Result<BenchmarkDescriptor> {
    if spec.trim_start().starts_with('{') {
        BenchmarkDescriptor::from_json(spec)
    } else {
        BenchmarkDescriptor::from_file(Path::new(spec))
    }
}

fn to_config(args: &RunArgs, trials: u64) -> Result<RunConfig> {
    let descriptor = load_descriptor(&args.benchmark)?;
    let fault: FaultModel = args.sampler.parse()?;
    let params = TestParams::new(args.epsilon, args.eta, args.delta)?;
    let pcond_mode: PcondMode = args.pcond_mode.parse()?;
    let config = RunConfig {
        fault,
        params,
        seed: args.seed,
        trials,
        budget: args.budget,
        pcond_mode,
        ..RunConfig::new(descriptor)
    };
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::GenSettingA { n_list, out_dir } => {
            let dims = n_list.unwrap_or_else(default_setting_a_dimensions);
            let descriptors = generate_setting_a(&dims)?;
            match out_dir {
                Some(dir) => {
                    std::fs::create_dir_all(&dir)?;
                    for d in &descriptors {
                        let path = dir.join(format!("{}.json", d.label()));
                        std::fs::write(&path, d.to_json()? + "\n")?;
                        println!("{}", path.display());
                    }
                }
                None => println!("{}", serde_json::to_string_pretty(&descriptors)?),
            }
            Ok(0)
        }
        Command::Test { run } => {
            let config = to_config(&run, 1)?;
            let report = run_single(&config, 0)?;
            match run.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
                Format::Csv => {
                    println!("{CSV_HEADER}");
                    println!("{}", csv_row(&config.descriptor.label(), &report));
                }
            }
            Ok(0)
        }
        Command::Trials { run, count } => {
            let config = to_config(&run, count)?;
            let summary = run_trials(&config)?;
            match run.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&summary)?),
                Format::Csv => print!("{}", csv_document(&summary)),
            }
            Ok(0)
        }
        Command::Budget { n, eta, delta } => {
            let dims = if n.is_empty() { default_setting_a_dimensions() } else { n };
            let rows = dims
                .iter()
                .map(|&n| report_sample_budget(n, eta, delta))
                .collect::<Result<Vec<_>>>()?;
            println!("{}", serde_json::to_string_pretty(&rows)?);
            Ok(0)
        }
        Command::Check { seed } => {
            let results = run_all_suites(seed)?;
            let mut all_passed = true;
            for r in &results {
                println!("{r}");
                all_passed &= r.passed;
            }
            Ok(if all_passed { 0 } else { 1 })
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => 3,
        Error::Json(_)
        | Error::InvalidParams(_)
        | Error::DimensionMismatch { .. }
        | Error::NotEnumerable(_)
        | Error::FaultConstruction(_) => 2,
        _ => 1,
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code(&e));
        }
    }
}
