//! Phase 4: exact selection inside the candidate buffer.
//!
//! A histogram over `[min, max]` puts the threshold at the lower edge of the
//! bin holding the k-th value; snap iterations then walk it onto the exact
//! k-th largest value, which is reached once `n_>(T) < k <= n_>=(T)`.
//! Only the candidate buffer is read.

use super::GvrParams;
use crate::error::{Error, Result};
use crate::metrics::ledger::{PassKind, Phase, ScanLedger};
use crate::row::Scored;

#[derive(Clone, Debug, PartialEq)]
pub struct RefineOutcome {
    /// Final threshold; `None` when the buffer already held exactly `k`.
    pub threshold: Option<f32>,
    pub snap_iters: u32,
    pub skipped: bool,
    pub selected: Vec<Scored>,
}

/// Counts and neighbours of `t` within the buffer, from one scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnapProbe {
    pub count_ge: usize,
    pub count_gt: usize,
    /// Smallest value above `t`.
    pub snap_up: Option<f32>,
    /// Largest value below `t`.
    pub snap_down: Option<f32>,
}

pub fn snap_probe(cands: &[Scored], t: f32) -> SnapProbe {
    let mut p = SnapProbe {
        count_ge: 0,
        count_gt: 0,
        snap_up: None,
        snap_down: None,
    };
    for c in cands {
        let x = c.value;
        if x >= t {
            p.count_ge += 1;
        }
        if x > t {
            p.count_gt += 1;
            p.snap_up = Some(p.snap_up.map_or(x, |u| u.min(x)));
        } else if x < t {
            p.snap_down = Some(p.snap_down.map_or(x, |d| d.max(x)));
        }
    }
    p
}

pub fn refine_exact(
    cands: &[Scored],
    k: usize,
    params: &GvrParams,
    ledger: &mut ScanLedger,
) -> Result<RefineOutcome> {
    let m = cands.len();
    if m < k || k == 0 {
        return Err(Error::TooFewCandidates { count: m, k });
    }
    if m > params.max_candidates {
        return Err(Error::CandidateOverflow {
            count: m,
            cap: params.max_candidates,
        });
    }
    if m == k {
        return Ok(RefineOutcome {
            threshold: None,
            snap_iters: 0,
            skipped: true,
            selected: cands.to_vec(),
        });
    }

    let (mut min, mut max) = (f32::INFINITY, f32::NEG_INFINITY);
    for c in cands {
        min = min.min(c.value);
        max = max.max(c.value);
    }
    ledger.record(PassKind::CandidateBuffer, m, Phase::RefineMinMax);

    if min == max {
        let selected = partition(cands, k, min, ledger);
        return Ok(RefineOutcome {
            threshold: Some(min),
            snap_iters: 0,
            skipped: false,
            selected,
        });
    }

    let bins = params.num_bins;
    let lo = min as f64;
    let width = max as f64 - lo;
    let scale = bins as f64 / width;
    let mut hist = vec![0usize; bins];
    for c in cands {
        let b = (((c.value as f64 - lo) * scale).floor() as usize).min(bins - 1);
        hist[b] += 1;
    }
    ledger.record(PassKind::CandidateBuffer, m, Phase::RefineHistogram);

    let mut above = 0usize;
    let mut bin = 0usize;
    for b in (0..bins).rev() {
        if above + hist[b] >= k {
            bin = b;
            break;
        }
        above += hist[b];
    }
    let edge = lo + bin as f64 * width / bins as f64;
    let mut t = edge as f32;
    if t as f64 > edge {
        t = t.next_down();
    }

    let mut snap_iters = 0u32;
    loop {
        snap_iters += 1;
        let p = snap_probe(cands, t);
        ledger.record(PassKind::CandidateBuffer, m, Phase::RefineSnap);
        if p.count_ge < k {
            t = p
                .snap_down
                .ok_or_else(|| Error::Invariant("no value below threshold".into()))?;
        } else if p.count_gt >= k {
            t = p
                .snap_up
                .ok_or_else(|| Error::Invariant("no value above threshold".into()))?;
        } else {
            break;
        }
    }

    let selected = partition(cands, k, t, ledger);
    Ok(RefineOutcome {
        threshold: Some(t),
        snap_iters,
        skipped: false,
        selected,
    })
}

/// Everything above `t`, then the lowest-index elements equal to `t`.
fn partition(cands: &[Scored], k: usize, t: f32, ledger: &mut ScanLedger) -> Vec<Scored> {
    let mut out = Vec::with_capacity(k);
    let mut ties = Vec::new();
    for c in cands {
        if c.value > t {
            out.push(*c);
        } else if c.value == t {
            ties.push(*c);
        }
    }
    ledger.record(PassKind::CandidateBuffer, cands.len(), Phase::RefinePartition);
    ties.sort_by_key(|c| c.index);
    let need = k - out.len();
    out.extend_from_slice(&ties[..need]);
    out
}
