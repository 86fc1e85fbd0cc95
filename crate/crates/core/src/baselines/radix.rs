//! Scan-accounted model of the digit-schedule radix select.
//!
//! Each round re-reads the full row twice: once to histogram the next digit
//! of every element that still matches the key prefix, once to emit elements
//! above the threshold bucket. Rows are never compacted between rounds. Once
//! the threshold bucket is small enough (or the key is exhausted), a final
//! collection pass gathers the bucket and a sort finishes the selection.

use serde::{Deserialize, Serialize};

use super::key::key_unchecked;
use crate::error::{Error, Result};
use crate::metrics::ledger::{PassKind, Phase, ScanLedger};
use crate::row::{ScoreRow, Scored};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RadixParams {
    /// Bit widths, most significant digit first. Must sum to 32.
    pub digit_schedule: Vec<u32>,
    pub early_exit_threshold: usize,
}

impl Default for RadixParams {
    fn default() -> Self {
        Self {
            digit_schedule: vec![16, 11, 5],
            early_exit_threshold: 2048,
        }
    }
}

impl RadixParams {
    pub fn validate(&self) -> Result<()> {
        if self.digit_schedule.is_empty() || self.digit_schedule.contains(&0) {
            return Err(Error::InvalidConfig(
                "digit widths must be positive".into(),
            ));
        }
        if self.digit_schedule.iter().any(|&w| w > 24) {
            return Err(Error::InvalidConfig("digit width above 24 bits".into()));
        }
        let total: u32 = self.digit_schedule.iter().sum();
        if total != 32 {
            return Err(Error::InvalidConfig(format!(
                "digit schedule covers {total} bits, expected 32"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadixStats {
    pub rounds: u32,
    /// The threshold bucket shrank to the early-exit size before the key ran out.
    pub early_exit: bool,
    /// Elements emitted above the threshold bucket before the final collection.
    pub emitted_before_exit: usize,
    /// Threshold-bucket size handed to the finishing sort.
    pub final_candidates: usize,
}

pub struct RadixOutcome {
    pub selected: Vec<Scored>,
    pub stats: RadixStats,
    pub ledger: ScanLedger,
}

pub fn radix_select(row: &ScoreRow, k: usize, params: &RadixParams) -> Result<RadixOutcome> {
    params.validate()?;
    let n = row.len();
    if k == 0 {
        return Err(Error::EmptyInput("k"));
    }
    if n < k {
        return Err(Error::RowTooShort { n, k });
    }
    let scores = row.scores();
    let mut ledger = ScanLedger::new();
    let mut stats = RadixStats::default();
    let mut selected = Vec::with_capacity(k);

    let mut prefix: u32 = 0;
    let mut consumed: u32 = 0;
    let mut remaining = k;
    let mut bucket_size = n;

    for &width in &params.digit_schedule {
        let shift = 32 - consumed - width;
        let prefix_mask = high_mask(consumed);
        let digit_mask = (1u32 << width) - 1;

        let mut hist = vec![0usize; 1 << width];
        for &x in scores {
            let key = key_unchecked(x);
            if key & prefix_mask == prefix {
                hist[((key >> shift) & digit_mask) as usize] += 1;
            }
        }
        ledger.record(PassKind::FullRow, n, Phase::RadixHistogram);

        // Highest bucket whose suffix count reaches `remaining`.
        let mut above = 0usize;
        let mut threshold = 0u32;
        for b in (0..hist.len()).rev() {
            if above + hist[b] >= remaining {
                threshold = b as u32;
                break;
            }
            above += hist[b];
        }

        for (i, &x) in scores.iter().enumerate() {
            let key = key_unchecked(x);
            if key & prefix_mask == prefix && (key >> shift) & digit_mask > threshold {
                selected.push(Scored::new(x, i as u32));
            }
        }
        ledger.record(PassKind::FullRow, n, Phase::RadixFilter);
        debug_assert_eq!(selected.len(), k - remaining + above);

        remaining -= above;
        prefix |= threshold << shift;
        consumed += width;
        bucket_size = hist[threshold as usize];
        stats.rounds += 1;

        if bucket_size <= params.early_exit_threshold {
            stats.early_exit = consumed < 32;
            break;
        }
    }

    stats.emitted_before_exit = selected.len();
    stats.final_candidates = bucket_size;

    let prefix_mask = high_mask(consumed);
    let mut bucket: Vec<(u32, Scored)> = Vec::with_capacity(bucket_size);
    for (i, &x) in scores.iter().enumerate() {
        let key = key_unchecked(x);
        if key & prefix_mask == prefix {
            bucket.push((key, Scored::new(x, i as u32)));
        }
    }
    ledger.record(PassKind::FullRow, n, Phase::RadixCollect);
    if bucket.len() < remaining {
        return Err(Error::Invariant(format!(
            "radix bucket holds {} elements, {} still needed",
            bucket.len(),
            remaining
        )));
    }
    bucket.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.index.cmp(&b.1.index)));
    selected.extend(bucket.into_iter().take(remaining).map(|(_, s)| s));

    Ok(RadixOutcome {
        selected,
        stats,
        ledger,
    })
}

fn high_mask(bits: u32) -> u32 {
    if bits == 0 {
        0
    } else {
        !0u32 << (32 - bits)
    }
}
