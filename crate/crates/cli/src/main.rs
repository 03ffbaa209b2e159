use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use biwave_cli::{run, CommandKind, RunArgs};

/// Batch experiment runner for the bipartite wave propagator laboratory.
#[derive(Parser)]
#[command(name = "biwave", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML experiment configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (created if missing)
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Seed for random data families
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for the parallel kernels
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a field to the requested times and write field files
    Propagate,
    /// Fit the fixed-time decay exponent of an evolved mixed norm
    Decay,
    /// Enumerate admissible exponent triples as a rational point cloud
    Region,
    /// Decompose the retarded region and scan the bilinear form per scale
    Whitney,
    /// Measure space-time quotients across a parabolic scaling family
    Strichartz,
    /// Run the local nonlinear solver with contraction diagnostics
    Solve,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Command::Propagate => CommandKind::Propagate,
        Command::Decay => CommandKind::Decay,
        Command::Region => CommandKind::Region,
        Command::Whitney => CommandKind::Whitney,
        Command::Strichartz => CommandKind::Strichartz,
        Command::Solve => CommandKind::Solve,
    };
    let Some(config) = cli.config else {
        eprintln!("config: --config PATH is required");
        return ExitCode::from(2);
    };
    let args = RunArgs { command, config, out: cli.out, seed: cli.seed, threads: cli.threads };
    ExitCode::from(run(&args) as u8)
}
