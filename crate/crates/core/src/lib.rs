//! Exact Top-K selection for sparse-attention decode workloads.
//!
//! The main selector is [`gvr::gvr_select`]: it guesses a threshold from a
//! predicted index set, verifies the count with a bracketed secant search,
//! and refines exactly inside a small candidate buffer. Every data pass is
//! written to a [`metrics::ScanLedger`], which is what the traffic
//! comparisons against the [`baselines`] are built on.

pub mod baselines;
pub mod error;
pub mod gvr;
pub mod metrics;
pub mod rope;
pub mod row;
pub mod select;
pub mod synth;

pub use error::{Error, Result};
pub use row::{PredictionSet, Provenance, ScoreRow, Scored};
pub use select::{SelectionResult, SelectorRegistry, SelectorStats, TopKSelector};
