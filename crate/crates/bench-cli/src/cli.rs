//! Command-line definitions.
//!
//! Every option is optional on the command line so that a value from the
//! `--config` file can fill it in; the documented default applies when
//! neither is given.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gvr_core::Provenance;

#[derive(Parser, Debug)]
#[command(name = "gvr-bench", version, about = "Exact Top-K selection harness")]
pub struct Cli {
    /// Base seed for every random draw [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output directory [default: out]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// TOML file with kebab-case keys named like the flags
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a synthetic decode trace (row files plus manifest)
    Gen(GenArgs),
    /// Run one selector on one row and print the result as JSON
    Select(SelectArgs),
    /// Compare selectors on many rows and write bench.csv and summary.md
    Bench(BenchArgs),
    /// Per-step hit ratios of a trace
    Correlate(CorrelateArgs),
    /// Dump the positional score table and the two priors
    Rope(RopeArgs),
    /// Iteration statistics from a bench CSV
    ReplayStats(ReplayArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct GvrArgs {
    /// Number of elements to select [default: 2048]
    #[arg(long)]
    pub k: Option<usize>,

    /// Candidate buffer capacity [default: 3k]
    #[arg(long)]
    pub candidates: Option<usize>,

    /// Refinement histogram bins [default: 2048]
    #[arg(long)]
    pub bins: Option<usize>,

    /// Chunks of the counting pass [default: 512]
    #[arg(long)]
    pub chunks: Option<usize>,

    /// Secant iteration cap [default: 16]
    #[arg(long)]
    pub max_secant_iters: Option<u32>,

    /// First-step damping factor [default: 0.5]
    #[arg(long)]
    pub damping: Option<f64>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct RadixArgs {
    /// Radix digit widths, most significant first [default: 16,11,5]
    #[arg(long, value_delimiter = ',')]
    pub radix_schedule: Option<Vec<u32>>,

    /// Bucket size at which radix stops refining [default: 2048]
    #[arg(long)]
    pub radix_early_exit: Option<usize>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct SynthArgs {
    /// Content noise amplitude [default: 0.1]
    #[arg(long)]
    pub amplitude: Option<f64>,

    /// Use plain RoPE frequencies instead of YaRN
    #[arg(long)]
    pub standard_rope: bool,
}

#[derive(Args, Debug, Clone)]
pub struct GenArgs {
    /// Row length at step 0 [default: 70690]
    #[arg(long)]
    pub n0: Option<usize>,

    /// Number of decode steps [default: 1]
    #[arg(long)]
    pub steps: Option<usize>,

    /// Selection size, used to validate row lengths [default: 2048]
    #[arg(long)]
    pub k: Option<usize>,

    #[command(flatten)]
    pub synth: SynthArgs,
}

#[derive(Args, Debug, Clone)]
pub struct SelectArgs {
    /// Row file to select from; a synthetic row is generated when absent
    #[arg(long)]
    pub row: Option<PathBuf>,

    /// Length of the synthetic row [default: 70690]
    #[arg(long, conflicts_with = "row")]
    pub n: Option<usize>,

    /// Registered selector name [default: gvr]
    #[arg(long)]
    pub algorithm: Option<String>,

    /// Prediction source [default: static-prior]
    #[arg(long)]
    pub provenance: Option<Provenance>,

    #[command(flatten)]
    pub gvr: GvrArgs,

    #[command(flatten)]
    pub radix: RadixArgs,

    #[command(flatten)]
    pub synth: SynthArgs,
}

#[derive(Args, Debug, Clone)]
pub struct BenchArgs {
    /// Row lengths [default: 8192,16384,32768,65536,70690,131072]
    #[arg(long, value_delimiter = ',')]
    pub n_values: Option<Vec<usize>>,

    /// Rows per length [default: 4]
    #[arg(long)]
    pub rows_per_n: Option<usize>,

    /// Selectors to run [default: gvr,radix,oracle]
    #[arg(long, value_delimiter = ',')]
    pub algorithms: Option<Vec<String>>,

    /// Prediction sources for GVR [default: none,random,previous-step,static-prior]
    #[arg(long, value_delimiter = ',')]
    pub provenances: Option<Vec<Provenance>>,

    /// Benchmark the rows of an existing trace instead of fresh rows
    #[arg(long)]
    pub trace: Option<PathBuf>,

    /// Use every stride-th step of the trace [default: 1]
    #[arg(long)]
    pub stride: Option<usize>,

    #[command(flatten)]
    pub gvr: GvrArgs,

    #[command(flatten)]
    pub radix: RadixArgs,

    #[command(flatten)]
    pub synth: SynthArgs,
}

#[derive(Args, Debug, Clone)]
pub struct CorrelateArgs {
    /// Trace directory
    #[arg(long)]
    pub trace: Option<PathBuf>,

    /// Selection size [default: 2048]
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct RopeArgs {
    /// Number of offsets in the table [default: 70690]
    #[arg(long)]
    pub n: Option<usize>,

    /// Prior size [default: 2048]
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct ReplayArgs {
    /// Bench CSV to summarize
    pub csv: PathBuf,
}
