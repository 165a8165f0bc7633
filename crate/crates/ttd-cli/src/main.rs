//! `ttd`: staircase TTD codebook design, beam-pattern export, beam-map
//! extraction, spectral-efficiency sweeps, and codebook validation.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "ttd", version, about = "Staircase TTD array codebook toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the two-stage design and export the codebook plus a report.
    Design {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (default: config output.dir, else ".").
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export a long-format gain heatmap CSV for a codebook.
    Pattern {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        codebook: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the angle-grid resolution.
        #[arg(long)]
        angles: Option<usize>,
    },
    /// Extract the frequency-beam-centre map (and the design discrepancy
    /// report when a design section is present).
    Map {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        codebook: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        angles: Option<usize>,
    },
    /// Run a multi-user spectral-efficiency sweep.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the sector-sampler seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a codebook against the closed-form invariants.
    Validate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        codebook: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        angles: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Design { config, out } => commands::cmd_design(config, out.as_deref()),
        Command::Pattern {
            config,
            codebook,
            out,
            angles,
        } => commands::cmd_pattern(config, codebook, out.as_deref(), *angles),
        Command::Map {
            config,
            codebook,
            out,
            angles,
        } => commands::cmd_map(config, codebook, out.as_deref(), *angles),
        Command::Sweep { config, out, seed } => commands::cmd_sweep(config, out.as_deref(), *seed),
        Command::Validate {
            config,
            codebook,
            out,
            angles,
        } => commands::cmd_validate(config, codebook, out.as_deref(), *angles),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
