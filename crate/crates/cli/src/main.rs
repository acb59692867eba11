//! `scsim`: reproducible stochastic-computing experiments from the shell.
//!
//! Every subcommand takes an explicit `--seed` and writes byte-identical
//! artifacts for identical invocations. Failures exit nonzero with a
//! one-line JSON object on stderr.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod output;

/// Error carried to the process boundary: a stable machine tag plus a
/// human message.
pub struct Failure {
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            kind: "usage",
            message: message.into(),
        }
    }
}

impl From<scsim_core::Error> for Failure {
    fn from(e: scsim_core::Error) -> Failure {
        Failure {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure {
            kind: "io",
            message: e.to_string(),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "scsim",
    version,
    about = "Stochastic computing simulator: correlated bitstreams, gates, \
             a memristor encoder model, and an edge-detection pipeline"
)]
struct Cli {
    /// TOML file supplying defaults for any flag (same key names,
    /// e.g. `flip-mode = "shared-mask"`); explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode one probability (or a correlated pair) into bitstreams.
    Encode(EncodeArgs),
    /// Run one gate and report measured vs predicted output value.
    Gate(GateArgs),
    /// Stochastic edge detection on an image (or directory of frames).
    Detect(DetectArgs),
    /// Detect at several stream lengths and tabulate fidelity.
    SweepBits(SweepBitsArgs),
    /// Detect under bit-flip injection at several rates, with a
    /// conventional-binary baseline alongside.
    SweepFlips(SweepFlipsArgs),
    /// Simulate the encoder's threshold drift and summarize it.
    Device(DeviceArgs),
    /// Score one image against another (SSIM and PSNR).
    Compare(CompareArgs),
}

#[derive(Args)]
pub struct EncodeArgs {
    /// Probability to encode.
    #[arg(long)]
    p: Option<f64>,
    /// Second probability; encodes a pair instead of a single stream.
    #[arg(long)]
    pb: Option<f64>,
    /// Pair correlation: uncorrelated, positive, or negative.
    #[arg(long)]
    mode: Option<String>,
    /// Stream length.
    #[arg(long)]
    bits: Option<usize>,
    /// Root seed (required; there is no implicit default).
    #[arg(long)]
    seed: Option<u64>,
    /// Dump format: text or packed.
    #[arg(long)]
    format: Option<String>,
    /// Fault injection: independent, shared-mask, or exact-count.
    #[arg(long = "flip-mode")]
    flip_mode: Option<String>,
    /// Fault injection rate in [0, 0.5].
    #[arg(long = "flip-rate")]
    flip_rate: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct GateArgs {
    /// Gate: and, or, xor, or mux.
    #[arg(long)]
    kind: Option<String>,
    /// Input correlation: uncorrelated, positive, or negative.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    pa: Option<f64>,
    #[arg(long)]
    pb: Option<f64>,
    /// Select-line probability for mux (default 0.5).
    #[arg(long)]
    ps: Option<f64>,
    /// Stream length (default 100000).
    #[arg(long)]
    bits: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Also write the report into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct DetectArgs {
    /// PGM image, or a directory of PGM frames.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Stream length per pixel (default 256).
    #[arg(long)]
    bits: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "flip-mode")]
    flip_mode: Option<String>,
    #[arg(long = "flip-rate")]
    flip_rate: Option<f64>,
    /// Stream source: analytic or device.
    #[arg(long)]
    source: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SweepBitsArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    /// Comma-separated stream lengths (default 4,16,64,256).
    #[arg(long = "bit-lengths")]
    bit_lengths: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    source: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SweepFlipsArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    /// Stream length per pixel (default 256).
    #[arg(long)]
    bits: Option<usize>,
    /// Comma-separated flip rates (default 0,0.025,0.05,0.1,0.2,0.3,0.4,0.5).
    #[arg(long)]
    rates: Option<String>,
    /// Fault injection mode; deliberately has no default.
    #[arg(long = "flip-mode")]
    flip_mode: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    source: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct DeviceArgs {
    /// Number of simulated cycles.
    #[arg(long)]
    cycles: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Threshold model: ou (drift) or iid (memoryless).
    #[arg(long)]
    mode: Option<String>,
    /// TOML file overriding device parameters (partial files allowed).
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct CompareArgs {
    #[arg(long)]
    a: Option<PathBuf>,
    #[arg(long)]
    b: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the SSIM map image into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let file = match config::load(cli.config.as_deref()) {
        Ok(file) => file,
        Err(failure) => fail(failure),
    };
    let result = match cli.command {
        Command::Encode(args) => commands::cmd_encode(args, &file),
        Command::Gate(args) => commands::cmd_gate(args, &file),
        Command::Detect(args) => commands::cmd_detect(args, &file),
        Command::SweepBits(args) => commands::cmd_sweep_bits(args, &file),
        Command::SweepFlips(args) => commands::cmd_sweep_flips(args, &file),
        Command::Device(args) => commands::cmd_device(args, &file),
        Command::Compare(args) => commands::cmd_compare(args, &file),
    };
    if let Err(failure) = result {
        fail(failure);
    }
}

fn fail(failure: Failure) -> ! {
    let body = serde_json::json!({
        "error": failure.message,
        "kind": failure.kind,
    });
    eprintln!("{body}");
    std::process::exit(1);
}
