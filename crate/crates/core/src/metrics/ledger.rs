//! Logical scan accounting.
//!
//! Every selector appends one entry per pass it makes over data. Pass counts
//! and byte totals are derived from the ledger, never estimated.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bytes per score element.
pub const BYTES_PER_ELEMENT: u64 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PassKind {
    /// Sequential traversal of the whole score row.
    FullRow,
    /// Gather of the prediction set's values.
    ScatteredPred,
    /// Traversal of the candidate buffer.
    CandidateBuffer,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    PredictionStats,
    ThresholdSearch,
    CandidateCollect,
    RefineMinMax,
    RefineHistogram,
    RefineSnap,
    RefinePartition,
    TieFill,
    FallbackSort,
    RadixHistogram,
    RadixFilter,
    RadixCollect,
    OracleSort,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::PredictionStats => "prediction-stats",
            Phase::ThresholdSearch => "threshold-search",
            Phase::CandidateCollect => "candidate-collect",
            Phase::RefineMinMax => "refine-minmax",
            Phase::RefineHistogram => "refine-histogram",
            Phase::RefineSnap => "refine-snap",
            Phase::RefinePartition => "refine-partition",
            Phase::TieFill => "tie-fill",
            Phase::FallbackSort => "fallback-sort",
            Phase::RadixHistogram => "radix-histogram",
            Phase::RadixFilter => "radix-filter",
            Phase::RadixCollect => "radix-collect",
            Phase::OracleSort => "oracle-sort",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub kind: PassKind,
    pub elements: u64,
    pub phase: Phase,
}

/// Append-only record of data passes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanLedger {
    entries: Vec<ScanEntry>,
}

impl ScanLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a pass. Empty passes touch nothing and are not recorded.
    pub fn record(&mut self, kind: PassKind, elements: usize, phase: Phase) {
        if elements > 0 {
            self.entries.push(ScanEntry {
                kind,
                elements: elements as u64,
                phase,
            });
        }
    }

    pub fn entries(&self) -> &[ScanEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count(&self, kind: PassKind) -> usize {
        self.entries.iter().filter(|e| e.kind == kind).count()
    }

    pub fn full_row_scans(&self) -> usize {
        self.count(PassKind::FullRow)
    }

    pub fn candidate_scans(&self) -> usize {
        self.count(PassKind::CandidateBuffer)
    }

    pub fn count_phase(&self, phase: Phase) -> usize {
        self.entries.iter().filter(|e| e.phase == phase).count()
    }

    /// Same passes with every element count multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|e| ScanEntry {
                    elements: e.elements * factor,
                    ..*e
                })
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrafficReport {
    pub bytes_read: u64,
    pub full_row_bytes: u64,
    pub scattered_bytes: u64,
    pub candidate_bytes: u64,
    pub full_row_scans: usize,
    pub candidate_scans: usize,
}

impl TrafficReport {
    /// Element-wise sum, for aggregating many selections.
    pub fn merge(&self, other: &TrafficReport) -> TrafficReport {
        TrafficReport {
            bytes_read: self.bytes_read + other.bytes_read,
            full_row_bytes: self.full_row_bytes + other.full_row_bytes,
            scattered_bytes: self.scattered_bytes + other.scattered_bytes,
            candidate_bytes: self.candidate_bytes + other.candidate_bytes,
            full_row_scans: self.full_row_scans + other.full_row_scans,
            candidate_scans: self.candidate_scans + other.candidate_scans,
        }
    }
}

/// Bytes read under the flat 4-bytes-per-element model. Scattered reads cost
/// the same as sequential ones; no cache reuse is modeled.
pub fn traffic_bytes(ledger: &ScanLedger) -> TrafficReport {
    let mut r = TrafficReport::default();
    for e in ledger.entries() {
        let bytes = e.elements * BYTES_PER_ELEMENT;
        r.bytes_read += bytes;
        match e.kind {
            PassKind::FullRow => {
                r.full_row_bytes += bytes;
                r.full_row_scans += 1;
            }
            PassKind::ScatteredPred => r.scattered_bytes += bytes,
            PassKind::CandidateBuffer => {
                r.candidate_bytes += bytes;
                r.candidate_scans += 1;
            }
        }
    }
    r
}

/// `baseline / gvr` bytes read.
pub fn speedup_proxy(gvr: &TrafficReport, baseline: &TrafficReport) -> Result<f64> {
    if gvr.bytes_read == 0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(baseline.bytes_read as f64 / gvr.bytes_read as f64)
}
