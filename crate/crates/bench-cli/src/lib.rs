//! Command-line harness around `gvr-core`: synthetic trace generation,
//! single-row selection, selector comparisons with traffic proxies,
//! hit-ratio correlation, RoPE table dumps and replay statistics.

pub mod bench;
pub mod cli;
pub mod commands;
pub mod config;
pub mod exit;
pub mod report;

pub use bench::{run_bench, BenchConfig};
pub use cli::Cli;
pub use exit::{exit_code, CliError};
