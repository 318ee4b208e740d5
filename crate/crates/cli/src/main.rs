//! `burstnoise` command-line driver.
//!
//! Exit status: 0 on success, 2 on usage errors, 1 on runtime errors.

mod commands;
mod plotdata;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "burstnoise", version, about = "Bursty impulsive noise modeling, estimation, synthesis and BER experiments")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Threshold a recording, segment bursts and report background statistics.
    Analyze(AnalyzeArgs),
    /// Estimate a model profile from a recording.
    Estimate(EstimateArgs),
    /// Generate synthetic noise from a profile.
    Synth(SynthArgs),
    /// Run a coded BER experiment.
    Ber(BerArgs),
    /// Generate a regular LDPC code in alist format.
    CodeGen(CodeGenArgs),
    /// Write a profile file from a preset or Middleton parameters.
    Profile(ProfileArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// IQ recording.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Sample encoding: f32le, s16le or csv.
    #[arg(long)]
    pub format: String,
    /// Sample rate in Hz.
    #[arg(long, default_value_t = burstnoise::DEFAULT_SAMPLE_RATE_HZ)]
    pub rate: f64,
}

#[derive(Debug, Args)]
pub struct DetectionArgs {
    /// Threshold scale: samples with |z| > alpha·rms are impulsive.
    #[arg(long, default_value_t = 3.0)]
    pub alpha: f64,
    /// Compute the rms per window of this many samples instead of globally.
    #[arg(long)]
    pub window: Option<usize>,
    /// Shortest kept burst in seconds.
    #[arg(long, default_value_t = 0.5e-3)]
    pub min_duration: f64,
    /// Longest bridged gap in seconds.
    #[arg(long, default_value_t = 0.3e-6)]
    pub gap_tolerance: f64,
    /// Wider bridge in seconds, overriding --gap-tolerance.
    #[arg(long)]
    pub bridge: Option<f64>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub detection: DetectionArgs,
    /// Diagnostics report.
    #[arg(long)]
    pub out: PathBuf,
    /// Burst CSV (default: <out>.bursts.csv).
    #[arg(long)]
    pub bursts: Option<PathBuf>,
    /// Directory for plot-ready CSVs.
    #[arg(long)]
    pub plotdata: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub detection: DetectionArgs,
    /// Number of impulsive clusters (M − 1).
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Cluster on power in dB (power-db) or linear power (power).
    #[arg(long, default_value = "power-db")]
    pub feature: String,
    /// Change-point penalty for splitting bursts.
    #[arg(long, default_value_t = 5.0)]
    pub split_penalty: f64,
    /// Shortest segment produced by a split.
    #[arg(long, default_value_t = 2)]
    pub split_min_segment: usize,
    /// Cluster whole bursts without splitting them.
    #[arg(long)]
    pub no_split: bool,
    /// Estimation report.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-segment CSV (default: <out>.bursts.csv).
    #[arg(long)]
    pub bursts: Option<PathBuf>,
    /// Directory for plot-ready CSVs.
    #[arg(long)]
    pub plotdata: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Profile file, or `table1`.
    #[arg(long)]
    pub profile: String,
    /// Number of samples.
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    /// Output recording.
    #[arg(long)]
    pub out: PathBuf,
    /// Sample encoding (default: from the output extension).
    #[arg(long)]
    pub format: Option<String>,
    /// real or complex.
    #[arg(long, default_value = "complex")]
    pub mode: String,
    /// Samples per independently seeded block.
    #[arg(long, default_value_t = 1 << 20)]
    pub block_len: usize,
    /// Sample rate recorded in the metadata.
    #[arg(long, default_value_t = burstnoise::DEFAULT_SAMPLE_RATE_HZ)]
    pub rate: f64,
    /// Directory for plot-ready CSVs.
    #[arg(long)]
    pub plotdata: Option<PathBuf>,
    /// Samples written to the plot CSV.
    #[arg(long, default_value_t = 26_000)]
    pub plot_len: usize,
}

#[derive(Debug, Args)]
pub struct BerArgs {
    /// Profile file, or `table1`.
    #[arg(long, default_value = "table1")]
    pub profile: String,
    /// alist code file; a PEG (3,6) code of length --peg-n is generated otherwise.
    #[arg(long)]
    pub code: Option<PathBuf>,
    #[arg(long, default_value_t = 1024)]
    pub peg_n: usize,
    /// Eb/N0 grid in dB, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub snr: Vec<f64>,
    /// Detectors to run, comma separated (bcjr, awgn).
    #[arg(long, value_delimiter = ',', default_value = "bcjr,awgn")]
    pub detector: Vec<String>,
    /// Reference noise power for the SNR axis: total or background.
    #[arg(long, default_value = "total")]
    pub convention: String,
    #[arg(long, default_value_t = 10_000)]
    pub max_codewords: u64,
    #[arg(long, default_value_t = 100)]
    pub target_errors: u64,
    #[arg(long, default_value_t = burstnoise::coding::DEFAULT_MAX_ITERS)]
    pub max_iters: usize,
    #[arg(long)]
    pub seed: u64,
    /// Result CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Directory for plot-ready CSVs.
    #[arg(long)]
    pub plotdata: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CodeGenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub dv: usize,
    #[arg(long, default_value_t = 6)]
    pub dc: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    /// table1 or middleton.
    #[arg(long)]
    pub preset: String,
    /// Impulsive index A.
    #[arg(long)]
    pub a: Option<f64>,
    /// Background-to-impulse ratio Γ.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Total noise power σ².
    #[arg(long)]
    pub power: Option<f64>,
    /// Number of states M.
    #[arg(long)]
    pub states: Option<usize>,
    /// State correlation r.
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

/// Usage problems found after parsing (exit 2) versus failures while
/// running (exit 1).
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<burstnoise::Error> for Failure {
    fn from(e: burstnoise::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

pub fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.threads {
        Some(0) => Err(usage("--threads must be at least 1")),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| commands::dispatch(cli.command)),
            Err(e) => Err(Failure::Runtime(e.into())),
        },
        None => commands::dispatch(cli.command),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
