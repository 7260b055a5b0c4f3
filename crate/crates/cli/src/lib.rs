//! `satt` command-line pipelines: prediction, the two learning stages,
//! evaluation and synthetic data generation.

mod commands;
mod error;
mod manifest;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use error::{classify, ConfigError, ErrorRecord};
pub use manifest::{config_hash, Manifest};

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "SATT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "satt", version, about = "Stochastic visual attention model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Predict eye focusing density maps for a frame sequence.
    Predict(PredictArgs),
    /// Learn the saliency noise parameters by EM.
    LearnSaliency(LearnSaliencyArgs),
    /// Learn the eye movement parameters from gaze traces.
    LearnTraces(LearnTracesArgs),
    /// Score density maps against gaze traces with NSS.
    Evaluate(EvaluateArgs),
    /// Generate a synthetic corpus of frames and gaze traces.
    Synth(SynthArgs),
}

#[derive(Debug, clap::Args)]
pub struct PredictArgs {
    /// Directory of numbered PNG/PGM/PPM frames, or a raw RGB file with a
    /// `.hdr` sidecar.
    #[arg(long)]
    pub frames: PathBuf,
    /// Saliency noise parameter file; defaults are used when omitted.
    #[arg(long)]
    pub saliency_params: Option<PathBuf>,
    /// Eye movement parameter file; defaults are used when omitted.
    #[arg(long)]
    pub attention_params: Option<PathBuf>,
    /// Run configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Override the configured particle count.
    #[arg(long)]
    pub particles: Option<usize>,
    /// Override the configured RNG seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write the saliency maps.
    #[arg(long)]
    pub write_saliency: bool,
    /// Also write 8-bit PGM previews of the density maps.
    #[arg(long)]
    pub preview: bool,
}

#[derive(Debug, clap::Args)]
pub struct LearnSaliencyArgs {
    /// Frame directory or raw file.
    #[arg(long, conflicts_with = "maps", required_unless_present = "maps")]
    pub frames: Option<PathBuf>,
    /// Directory of precomputed saliency map files, used instead of frames.
    #[arg(long)]
    pub maps: Option<PathBuf>,
    #[arg(long, default_value_t = 0.3)]
    pub init_sigma_s1: f64,
    #[arg(long, default_value_t = 0.3)]
    pub init_sigma_s2: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    /// Output parameter file; diagnostics and manifest are written next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Exact,
    Printed,
}

#[derive(Debug, clap::Args)]
pub struct LearnTracesArgs {
    /// CSV with columns frame,x,y,subject.
    #[arg(long)]
    pub traces: PathBuf,
    /// Jump length threshold (pixels) for the initial labeling.
    #[arg(long, default_value_t = 15.0)]
    pub kappa: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 640.0)]
    pub width: f64,
    #[arg(long, default_value_t = 480.0)]
    pub height: f64,
    /// Video frame rate, used to report the trace sample rate.
    #[arg(long, default_value_t = 30.0)]
    pub fps: f64,
    #[arg(long, value_enum, default_value_t = RuleArg::Exact)]
    pub rule: RuleArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct EvaluateArgs {
    /// Directory of density (or any other) map files.
    #[arg(long)]
    pub densities: PathBuf,
    #[arg(long)]
    pub traces: PathBuf,
    /// Region radius in pixels; scaled from 30 px at 480 lines by default.
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, default_value_t = 30.0)]
    pub fps: f64,
    /// Output prefix: writes `<out>.csv` and `<out>.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 160)]
    pub width: usize,
    #[arg(long, default_value_t = 120)]
    pub height: usize,
    #[arg(long, default_value_t = 30)]
    pub frames: usize,
    #[arg(long, default_value_t = 1)]
    pub blobs: usize,
    #[arg(long, default_value_t = 10)]
    pub relocate_every: usize,
    #[arg(long, default_value_t = 4)]
    pub subjects: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Applies the thread override from the environment.
pub fn init_threads() -> anyhow::Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| ConfigError::new(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
    if n == 0 {
        return Err(ConfigError::new(format!("{THREADS_ENV} must be at least 1")).into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| ConfigError::new(e.to_string()))?;
    Ok(())
}

pub fn run(cli: Cli) -> anyhow::Result<Manifest> {
    init_threads()?;
    match cli.command {
        Command::Predict(a) => commands::predict(&a),
        Command::LearnSaliency(a) => commands::learn_saliency(&a),
        Command::LearnTraces(a) => commands::learn_traces(&a),
        Command::Evaluate(a) => commands::evaluate(&a),
        Command::Synth(a) => commands::synth(&a),
    }
}
