use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod output;

/// Whitney extension of flat nonnegative data, norm estimates and
/// finiteness experiments.
#[derive(Debug, Parser)]
#[command(name = "flatjet", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dump the Whitney decomposition of the instance's points.
    Decompose(Common),
    /// Extend the field and write a value grid plus a jet-match report.
    Extend(Common),
    /// Write values and derivative magnitudes of the extension on a grid.
    EvalGrid(Common),
    /// Jets of the extension at the instance's `eval_points`.
    EvalJets(Common),
    /// Sampled norms of each family member, and the field norm of the points.
    Norms(Common),
    /// Measured ratio `fs_{rs}(F^r) / fs_s(F)^r` over the family.
    Root(Common),
    /// The jet of `P^r`, or of `P` composed with the identity.
    Fdb(Common),
    /// Subset scan of surrogate norms.
    Finiteness(Common),
    /// Random Whitney-convexity witnesses at the instance's points.
    FuzzConvexity(Common),
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Instance JSON file.
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Samples per axis; overrides the instance.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Smoothness; overrides the instance.
    #[arg(long)]
    pub s: Option<f64>,
    /// Subset-size cap for `finiteness` (default `2^dim 𝒫`).
    #[arg(long)]
    pub k: Option<usize>,
    /// Deepest cube level for the decomposition.
    #[arg(long)]
    pub max_level: Option<u32>,
    /// Total projection sweeps for the surrogate solver.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Violation threshold for `finiteness`.
    #[arg(long)]
    pub c_cap: Option<f64>,
    /// Scan a random sample of this many points when the set is too large.
    #[arg(long)]
    pub sample: Option<usize>,
    /// Trials for `fuzz-convexity`.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Exponent for `root` and `fdb`; overrides the instance.
    #[arg(long)]
    pub r: Option<f64>,
    /// `fdb`: compose with the identity instead of taking a power.
    #[arg(long)]
    pub identity: bool,
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("FLATJET_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("FLATJET_THREADS={value:?} is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match commands::run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
