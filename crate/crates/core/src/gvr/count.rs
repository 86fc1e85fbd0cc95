//! The threshold-counting pass `f(T) = |{i : x_i >= T}|`, with per-chunk
//! partial counts kept for the collection pass.

use crate::error::{Error, Result};
use crate::metrics::ledger::{PassKind, Phase, ScanLedger};
use crate::row::ScoreRow;

/// Result of one counting pass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChunkCounts {
    pub total: usize,
    /// One partial count per contiguous chunk, in row order.
    pub per_chunk: Vec<usize>,
}

/// Half-open element range of chunk `c` when `n` elements are split into
/// `chunks` contiguous pieces.
#[inline]
pub fn chunk_bounds(n: usize, chunks: usize, c: usize) -> (usize, usize) {
    let lo = (c as u64 * n as u64 / chunks as u64) as usize;
    let hi = ((c as u64 + 1) * n as u64 / chunks as u64) as usize;
    (lo, hi)
}

pub fn count_ge(
    row: &ScoreRow,
    t: f32,
    num_chunks: usize,
    ledger: &mut ScanLedger,
) -> Result<ChunkCounts> {
    Ok(count_pass::<false>(row, t, num_chunks, ledger)?.0)
}

/// Row minimum and maximum gathered alongside a count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Extrema {
    pub min: f32,
    pub max: f32,
}

/// Counting pass, optionally tracking the row extrema in the same traversal.
/// Without `EXTREMA` the returned extrema are meaningless.
pub(crate) fn count_pass<const EXTREMA: bool>(
    row: &ScoreRow,
    t: f32,
    num_chunks: usize,
    ledger: &mut ScanLedger,
) -> Result<(ChunkCounts, Extrema)> {
    if !t.is_finite() {
        return Err(Error::NonFiniteThreshold);
    }
    if num_chunks == 0 {
        return Err(Error::InvalidConfig("num_chunks must be >= 1".into()));
    }
    let scores = row.scores();
    let n = scores.len();
    let mut per_chunk = Vec::with_capacity(num_chunks);
    let mut total = 0;
    let mut min = f32::INFINITY;
    let mut max = f32::NEG_INFINITY;
    for c in 0..num_chunks {
        let (lo, hi) = chunk_bounds(n, num_chunks, c);
        let mut cnt = 0usize;
        for &x in &scores[lo..hi] {
            cnt += (x >= t) as usize;
            if EXTREMA {
                min = min.min(x);
                max = max.max(x);
            }
        }
        per_chunk.push(cnt);
        total += cnt;
    }
    ledger.record(PassKind::FullRow, n, Phase::ThresholdSearch);
    Ok((ChunkCounts { total, per_chunk }, Extrema { min, max }))
}
