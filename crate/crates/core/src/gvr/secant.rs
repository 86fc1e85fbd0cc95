//! Phase 2: bracketed secant search for a threshold `T` with
//! `k <= f(T) <= C`.
//!
//! `f` is a non-increasing step function, so the secant step is only an
//! inverse-CDF guess. The bracket keeps the search safe: `val_lo` always
//! counts more than `C`, `val_hi` always counts fewer than `k`, and every
//! probe lands strictly between them. When the two anchors become adjacent
//! floats no threshold can hit the window and the search hands off to the
//! tie-fill path.

use serde::{Deserialize, Serialize};

use super::count::{count_pass, ChunkCounts};
use super::stats::PredStats;
use super::{DoneKind, GvrParams};
use crate::baselines::key::{key_to_f32, key_unchecked};
use crate::error::Result;
use crate::metrics::ledger::ScanLedger;
use crate::row::ScoreRow;

/// Bracket anchors and every threshold probed so far.
///
/// Before the first probe the anchors are virtual: one ulp below the row
/// minimum (counts `N`) and one ulp above the row maximum (counts 0). The
/// extrema come out of the first counting pass, so seeding costs nothing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdBracket {
    pub val_lo: f32,
    pub cnt_lo: usize,
    pub val_hi: f32,
    pub cnt_hi: usize,
    pub evaluated: Vec<f32>,
}

impl ThresholdBracket {
    /// No representable threshold lies strictly between the anchors.
    pub fn is_degenerate(&self) -> bool {
        next_up(self.val_lo) >= self.val_hi
    }
}

/// Anchor values and counts at one iteration boundary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BracketSnapshot {
    pub val_lo: f32,
    pub cnt_lo: usize,
    pub val_hi: f32,
    pub cnt_hi: usize,
}

#[derive(Clone, Debug)]
pub struct SecantOutcome {
    pub threshold: f32,
    pub count: usize,
    /// Per-chunk counts from the last counting pass, taken at `threshold`.
    pub cache: ChunkCounts,
    pub iterations: u32,
    pub done_kind: DoneKind,
    pub bracket: ThresholdBracket,
    pub history: Vec<BracketSnapshot>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Lo,
    Hi,
}

/// Fraction of the way from `lo` to `hi` at which the chord through
/// `(lo, f_lo)` and `(hi, f_hi)` crosses `target`.
pub fn secant_fraction(f_lo: f64, f_hi: f64, target: f64) -> f64 {
    (f_lo - target) / (f_lo - f_hi)
}

/// Limits a step measured from the anchor on `from` to `damping` of the
/// bracket width.
pub fn damp(fraction: f64, from: Side, damping: f64) -> f64 {
    match from {
        Side::Lo => fraction.min(damping),
        Side::Hi => fraction.max(1.0 - damping),
    }
}

/// Smallest float above `x`, with `-0.0` folded into `+0.0`.
pub fn next_up(x: f32) -> f32 {
    canonical(x.next_up())
}

pub fn next_down(x: f32) -> f32 {
    canonical(x.next_down())
}

#[inline]
fn canonical(x: f32) -> f32 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

/// Value midpoint, or the midpoint in key order when the value midpoint
/// rounds onto an anchor.
fn midpoint(lo: f32, hi: f32) -> f32 {
    let m = ((lo as f64 + hi as f64) * 0.5) as f32;
    if m > lo && m < hi {
        return canonical(m);
    }
    let (a, b) = (key_unchecked(lo), key_unchecked(hi));
    canonical(key_to_f32(a + (b - a) / 2))
}

fn strictly_inside(t: f32, b: &ThresholdBracket) -> bool {
    t.is_finite() && t > b.val_lo && t < b.val_hi
}

pub fn secant_search(
    row: &ScoreRow,
    stats: &PredStats,
    params: &GvrParams,
    ledger: &mut ScanLedger,
) -> Result<SecantOutcome> {
    let n = row.len();
    let (k, cap) = (params.k, params.max_candidates);
    let target = (k + cap) as f64 / 2.0;

    let mut t = canonical(stats.pmean);
    let mut bracket: Option<ThresholdBracket> = None;
    let mut history = Vec::new();
    let mut iterations = 0u32;

    loop {
        let (cache, extrema) = if iterations == 0 {
            count_pass::<true>(row, t, params.num_chunks, ledger)?
        } else {
            count_pass::<false>(row, t, params.num_chunks, ledger)?
        };
        iterations += 1;
        let b = bracket.get_or_insert_with(|| ThresholdBracket {
            val_lo: next_down(extrema.min),
            cnt_lo: n,
            val_hi: next_up(extrema.max),
            cnt_hi: 0,
            evaluated: Vec::new(),
        });
        b.evaluated.push(t);
        let count = cache.total;

        let finish = |done_kind, bracket: &ThresholdBracket, history| SecantOutcome {
            threshold: t,
            count,
            cache: cache.clone(),
            iterations,
            done_kind,
            bracket: bracket.clone(),
            history,
        };

        if (k..=cap).contains(&count) {
            return Ok(finish(DoneKind::Converged, b, history));
        }
        let side = if count > cap {
            b.val_lo = t;
            b.cnt_lo = count;
            Side::Lo
        } else {
            b.val_hi = t;
            b.cnt_hi = count;
            Side::Hi
        };
        history.push(BracketSnapshot {
            val_lo: b.val_lo,
            cnt_lo: b.cnt_lo,
            val_hi: b.val_hi,
            cnt_hi: b.cnt_hi,
        });

        if b.is_degenerate() {
            return Ok(finish(DoneKind::TieFill, b, history));
        }
        if iterations >= params.max_secant_iters {
            return Ok(finish(DoneKind::FallbackSort, b, history));
        }

        let mut frac = secant_fraction(b.cnt_lo as f64, b.cnt_hi as f64, target);
        if iterations == 1 {
            frac = damp(frac, side, params.first_step_damping);
        }
        let proposal = (b.val_lo as f64 + frac * (b.val_hi as f64 - b.val_lo as f64)) as f32;
        t = if strictly_inside(proposal, b) && !b.evaluated.contains(&proposal) {
            canonical(proposal)
        } else {
            midpoint(b.val_lo, b.val_hi)
        };
    }
}
