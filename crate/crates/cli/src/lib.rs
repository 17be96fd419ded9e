//! `upconv` command-line front end.
//!
//! Every subcommand writes its artifacts (JSON reports, CSV series or time-tag
//! files) with the resolved configuration embedded, and returns the text to
//! print on stdout. Stochastic subcommands require `--seed`.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod commands;
pub mod output;

pub use commands::cascade::CascadeArgs;
pub use commands::fringes::FringesArgs;
pub use commands::hbt::{HbtAnalyzeArgs, HbtSimArgs};
pub use commands::reproduce::ReproduceArgs;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "UPCONV_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "upconv", version, about = "Cascaded down/up-conversion simulator and photon-counting analysis")]
pub struct Cli {
    /// Directory for relative output paths.
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    pub out_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Squeezed vacuum through sum-frequency generation: statistics of the up-converted mode.
    Cascade(CascadeArgs),
    /// Phase scan of the biphoton interferometer with a fixed-frequency fringe fit.
    Fringes(FringesArgs),
    /// Simulate two detector time-tag streams behind a 50/50 beam splitter.
    HbtSim(HbtSimArgs),
    /// Cross-correlate two time-tag files into a normalized g2(tau) histogram.
    HbtAnalyze(HbtAnalyzeArgs),
    /// Re-run the reference configurations and compare against expected values.
    Reproduce(ReproduceArgs),
}

/// A failed run: machine-readable code, message and process exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: &'static str,
    pub message: String,
    pub exit: u8,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: "E_USAGE", message: message.into(), exit: 2 }
    }
}

impl From<upconv_core::Error> for Failure {
    fn from(e: upconv_core::Error) -> Self {
        let exit = if matches!(e, upconv_core::Error::Config(_)) { 2 } else { 1 };
        Self { code: e.code(), message: e.to_string(), exit }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self { code: "E_IO", message: e.to_string(), exit: 1 }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Self { code: "E_FORMAT", message: e.to_string(), exit: 1 }
    }
}

pub type Outcome = std::result::Result<String, Failure>;

pub fn run(cli: Cli) -> Outcome {
    let out = output::OutDir::new(cli.out_dir);
    match cli.command {
        Command::Cascade(a) => commands::cascade::run(&a, &out),
        Command::Fringes(a) => commands::fringes::run(&a, &out),
        Command::HbtSim(a) => commands::hbt::simulate(&a, &out),
        Command::HbtAnalyze(a) => commands::hbt::analyze(&a, &out),
        Command::Reproduce(a) => commands::reproduce::run(&a, &out),
    }
}
