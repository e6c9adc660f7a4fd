//! `spanprod`: κ tables, μ searches, optimal constructions and Kneser checks
//! for subspace products in finite field extensions.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spanprod_core::search::DEFAULT_BUDGET;

#[derive(Debug, Parser)]
#[command(
    name = "spanprod",
    version,
    about = "Minimal dimensions of subspace products in finite field extensions"
)]
pub struct Cli {
    /// Output format for the report.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    /// Only meaningful for `kappa-table`; other commands fall back to text.
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// κ(r, s) with its minimizing degree and the per-degree breakdown.
    Kappa {
        #[arg(long)]
        r: u64,
        #[arg(long)]
        s: u64,
        #[command(flatten)]
        degrees: DegreeArgs,
    },
    /// The full n×n matrix of κ(r, s).
    KappaTable {
        #[arg(long)]
        n: u64,
        /// Admissible degrees; defaults to all divisors of n.
        #[arg(long, value_delimiter = ',')]
        degrees: Option<Vec<u64>>,
    },
    /// μ(r, s) over subspace pairs of GF(p^n).
    MuField {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        s: usize,
        #[command(flatten)]
        mode: SearchArgs,
        /// Stop the exhaustive search once κ is reached.
        #[arg(long)]
        prune: bool,
    },
    /// Builds a pair attaining κ(r, s) and certifies it.
    Construct {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        s: usize,
    },
    /// Stabilizer of a subspace read from a file (one basis row per line).
    Stabilizer {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        subspace: PathBuf,
    },
    /// Kneser inequality on seeded random pairs; prints the slack histogram.
    VerifyKneser {
        #[command(flatten)]
        field: FieldArgs,
        /// Fixed dim A; uniform in [1, n] per pair when omitted.
        #[arg(long)]
        r: Option<usize>,
        /// Fixed dim B; uniform in [1, n] per pair when omitted.
        #[arg(long)]
        s: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        pairs: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// μ_G(r, s) over subset pairs of a finite group.
    MuGroup {
        /// Built-in group: cyclic:N, product:N,M or Z7xZ3semidirect.
        #[arg(
            long,
            conflicts_with = "group_file",
            required_unless_present = "group_file"
        )]
        group: Option<String>,
        /// Cayley table as JSON: {"order", "identity", "cayley"}.
        #[arg(long)]
        group_file: Option<PathBuf>,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        s: usize,
        #[command(flatten)]
        mode: SearchArgs,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct DegreeArgs {
    /// Use every divisor of n.
    #[arg(long)]
    pub n: Option<u64>,
    /// Explicit admissible degrees, e.g. 1,2,4.
    #[arg(long, value_delimiter = ',')]
    pub degrees: Option<Vec<u64>>,
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    /// Field as p^n, e.g. 2^6.
    #[arg(long)]
    pub field: String,
    /// Monic irreducible modulus, coefficients low to high (e.g. 1,1,0,0,1).
    #[arg(long)]
    pub modulus: Option<String>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Enumerate every pair.
    #[arg(long, conflicts_with = "trials", required_unless_present = "trials")]
    pub exhaustive: bool,
    /// Randomized restarts with local descent; reports an upper bound.
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Maximum number of pairs the exhaustive search may evaluate.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Search all pairs instead of those containing the identity.
    #[arg(long)]
    pub no_canonical: bool,
}

/// Process exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Usage = 2,
    Budget = 3,
    Violation = 4,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = match commands::run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Json => {
                    let json =
                        serde_json::to_string_pretty(&out.report).expect("report serializes");
                    println!("{json}");
                }
                Format::Text | Format::Csv => print!("{}", out.text),
            }
            for line in &out.diagnostics {
                eprintln!("{line}");
            }
            out.status
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            Status::Usage
        }
    };
    ExitCode::from(status as u8)
}
