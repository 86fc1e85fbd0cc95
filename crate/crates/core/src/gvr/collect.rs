//! Phase 3: candidate collection reusing the last count's per-chunk cache.
//!
//! Write offsets are the exclusive prefix sum of the cached chunk counts, so
//! each chunk owns a fixed slice of the buffer and only the write pass reads
//! the row. Within a chunk candidates keep ascending index order, hence the
//! whole buffer is index-ordered.

use super::count::{chunk_bounds, ChunkCounts};
use crate::error::{Error, Result};
use crate::metrics::ledger::{PassKind, Phase, ScanLedger};
use crate::row::{ScoreRow, Scored};

pub fn collect_candidates(
    row: &ScoreRow,
    t: f32,
    cache: &ChunkCounts,
    cap: usize,
    ledger: &mut ScanLedger,
) -> Result<Vec<Scored>> {
    if cache.total > cap {
        return Err(Error::CandidateOverflow {
            count: cache.total,
            cap,
        });
    }
    let chunks = cache.per_chunk.len();
    if chunks == 0 {
        return Err(Error::InvalidConfig("empty chunk cache".into()));
    }

    let mut offsets = Vec::with_capacity(chunks);
    let mut acc = 0usize;
    for &c in &cache.per_chunk {
        offsets.push(acc);
        acc += c;
    }
    if acc != cache.total {
        return Err(Error::Invariant("chunk counts do not sum to total".into()));
    }

    let scores = row.scores();
    let n = scores.len();
    let mut buf = vec![Scored::new(0.0, 0); cache.total];
    for (c, (&start, &count)) in offsets.iter().zip(&cache.per_chunk).enumerate() {
        let (lo, hi) = chunk_bounds(n, chunks, c);
        let end = start + count;
        let mut pos = start;
        for (i, &x) in scores[lo..hi].iter().enumerate() {
            if x >= t {
                if pos == end {
                    return Err(mismatch(c, cache, pos - start + 1));
                }
                buf[pos] = Scored::new(x, (lo + i) as u32);
                pos += 1;
            }
        }
        if pos != end {
            return Err(mismatch(c, cache, pos - start));
        }
    }
    ledger.record(PassKind::FullRow, n, Phase::CandidateCollect);
    Ok(buf)
}

fn mismatch(chunk: usize, cache: &ChunkCounts, found: usize) -> Error {
    Error::CacheMismatch {
        chunk,
        cached: cache.per_chunk[chunk],
        found,
    }
}
