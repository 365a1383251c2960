//! Batch command-line front end: block-reduction verification, sector
//! evolution, precision benchmarking and contour scanning, all with
//! deterministic seeded outputs and a manifest written next to every data
//! file.
//!
//! Exit codes: 0 success, 1 verification/acceptance failure or runtime
//! error, 2 usage or config error.

mod commands;
mod configs;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "bellpulse",
    version,
    about = "Bell-basis sectors under pulsed drives: verify, evolve, benchmark, scan"
)]
struct Cli {
    /// Cap the rayon thread pool (data outputs do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the Bell-basis block reduction against the brute-force 4x4
    /// transform over random parameter draws.
    Verify {
        /// Restrict to one field direction (1, 2 or 3); default all three.
        #[arg(long = "h")]
        h: Option<u8>,
        /// Random parameter draws per direction.
        #[arg(long, default_value_t = 1000)]
        draws: usize,
        /// Pass tolerance for leakage and block deviation.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Half-width of the uniform parameter draws.
        #[arg(long, default_value_t = 5.0)]
        range: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Evolve one sector over the gate window and report its gate form.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for result and manifest files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Random-sample precision benchmark of the stepped schemes.
    Bench {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Override the seed from the config file.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Trace gate-amplitude contours over the pulse-parameter plane.
    Scan {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Comma-separated list of target amplitudes, overriding the config.
        #[arg(long = "target-a", value_delimiter = ',')]
        target_a: Option<Vec<f64>>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // Ignore the error if a pool already exists; thread count never
        // changes data outputs.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let outcome = match cli.command {
        Command::Verify {
            h,
            draws,
            tol,
            range,
            seed,
        } => commands::verify(h, draws, tol, range, seed),
        Command::Evolve { config, out } => commands::evolve(&config, &out),
        Command::Bench { config, out, seed } => commands::bench(config.as_deref(), &out, seed),
        Command::Scan {
            config,
            out,
            target_a,
        } => commands::scan(config.as_deref(), &out, target_a),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
