//! Experiment runner. Subcommands map onto the library layers; every run
//! writes machine-readable reports stamped with the manifest hash.
//!
//! Exit codes: 0 success, 1 configuration or usage problem, 2 when the
//! analysis verdict is a security violation.

mod commands;
mod config;
mod manifest;
mod streams;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "y00lab",
    version,
    about = "Simulation and bound analysis for quantum-noise randomized stream ciphers"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run an end-to-end transmission and tally decode errors
    Simulate(CommonArgs),
    /// Compute the correlation-attack bound report for a channel
    Fca(CommonArgs),
    /// Small-ensemble quantum detection (Gram / square-root measurement)
    Qdetect(CommonArgs),
    /// Demonstrate LFSR key recovery from short keystreams
    #[command(name = "classical-break")]
    ClassicalBreak(CommonArgs),
    /// Reproduce the frozen reference configuration at full scale
    #[command(name = "paper-example")]
    PaperExample(CommonArgs),
}

#[derive(Args)]
pub struct CommonArgs {
    /// Experiment configuration file (JSON)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config value
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for reports (default: current directory)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Config override as key=value, dotted keys reach into sections
    /// (repeatable; flags win over the file)
    #[arg(long = "override", value_name = "K=V")]
    overrides: Vec<String>,
}

/// Commands yield their exit code; usage and environment problems come
/// back as messages and exit 1.
pub type CmdResult = Result<i32, String>;

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match &cli.cmd {
        Cmd::Simulate(args) => commands::simulate::run(args),
        Cmd::Fca(args) => commands::fca::run(args),
        Cmd::Qdetect(args) => commands::qdetect::run(args),
        Cmd::ClassicalBreak(args) => commands::classical_break::run(args),
        Cmd::PaperExample(args) => commands::paper_example::run(args),
    };
    match outcome {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            1
        }
    }
}
