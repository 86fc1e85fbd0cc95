//! Scan accounting, traffic model and run statistics.

pub mod ablation;
pub mod csv;
pub mod histogram;
pub mod ledger;

pub use ablation::{ablation_run, AblationRow};
pub use csv::{format_float, read_records, write_records, BenchRecord, COLUMNS};
pub use histogram::{iteration_histogram, Distribution, IterationHistogram};
pub use ledger::{
    speedup_proxy, traffic_bytes, PassKind, Phase, ScanEntry, ScanLedger, TrafficReport,
    BYTES_PER_ELEMENT,
};
