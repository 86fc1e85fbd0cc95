//! Phase 1: statistics over the predicted positions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::ledger::{PassKind, Phase, ScanLedger};
use crate::row::{PredictionSet, ScoreRow};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredStats {
    pub pmin: f32,
    pub pmax: f32,
    pub pmean: f32,
}

/// Min, max and mean of the row at the predicted positions. The mean
/// accumulates in `f64` and is rounded once.
pub fn preidx_stats(
    row: &ScoreRow,
    pred: &PredictionSet,
    ledger: &mut ScanLedger,
) -> Result<PredStats> {
    stats_at(row, pred.indices(), ledger)
}

pub(crate) fn stats_at(row: &ScoreRow, idx: &[u32], ledger: &mut ScanLedger) -> Result<PredStats> {
    if idx.is_empty() {
        return Err(Error::EmptyInput("prediction set"));
    }
    let scores = row.scores();
    let mut pmin = f32::INFINITY;
    let mut pmax = f32::NEG_INFINITY;
    let mut sum = 0.0f64;
    for &i in idx {
        let x = *scores.get(i as usize).ok_or(Error::IndexOutOfRange {
            index: i as usize,
            n: scores.len(),
        })?;
        pmin = pmin.min(x);
        pmax = pmax.max(x);
        sum += x as f64;
    }
    ledger.record(PassKind::ScatteredPred, idx.len(), Phase::PredictionStats);
    let pmean = ((sum / idx.len() as f64) as f32).clamp(pmin, pmax);
    Ok(PredStats { pmin, pmax, pmean })
}

/// `m` evenly strided positions `⌊j·n/m⌋`, used when no prediction exists.
pub fn stride_sample(n: usize, m: usize) -> Vec<u32> {
    let m = m.min(n);
    (0..m as u64)
        .map(|j| (j * n as u64 / m as u64) as u32)
        .collect()
}

/// Empirical means splitting the prediction set and the row by membership in
/// an exact Top-K. Diagnostic only.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanDecomposition {
    /// Fraction of predicted positions inside the Top-K.
    pub alpha: f64,
    pub mu_hit: f64,
    pub mu_miss: f64,
    pub mu_top: f64,
    pub mu_non: f64,
    pub mu_all: f64,
    pub pmean: f64,
}

impl MeanDecomposition {
    /// `α·μ_hit + (1−α)·μ_miss`, which equals the prediction mean exactly in
    /// real arithmetic.
    pub fn recombined(&self) -> f64 {
        let hit = if self.alpha > 0.0 { self.alpha * self.mu_hit } else { 0.0 };
        let miss = if self.alpha < 1.0 {
            (1.0 - self.alpha) * self.mu_miss
        } else {
            0.0
        };
        hit + miss
    }
}

pub fn mean_decomposition(row: &ScoreRow, pred: &[u32], topk: &[u32]) -> Result<MeanDecomposition> {
    let n = row.len();
    if pred.is_empty() || topk.is_empty() {
        return Err(Error::EmptyInput("prediction or top-k set"));
    }
    let x = row.scores();
    let mut in_top = vec![false; n];
    for &i in topk {
        *in_top.get_mut(i as usize).ok_or(Error::IndexOutOfRange {
            index: i as usize,
            n,
        })? = true;
    }
    let mean = |s: f64, c: usize| if c == 0 { f64::NAN } else { s / c as f64 };

    let (mut hs, mut hc, mut ms, mut mc) = (0.0, 0usize, 0.0, 0usize);
    for &i in pred {
        let v = *x.get(i as usize).ok_or(Error::IndexOutOfRange {
            index: i as usize,
            n,
        })? as f64;
        if in_top[i as usize] {
            hs += v;
            hc += 1;
        } else {
            ms += v;
            mc += 1;
        }
    }
    let (mut ts, mut tc, mut ns, mut nc) = (0.0, 0usize, 0.0, 0usize);
    for (i, &v) in x.iter().enumerate() {
        if in_top[i] {
            ts += v as f64;
            tc += 1;
        } else {
            ns += v as f64;
            nc += 1;
        }
    }
    Ok(MeanDecomposition {
        alpha: hc as f64 / pred.len() as f64,
        mu_hit: mean(hs, hc),
        mu_miss: mean(ms, mc),
        mu_top: mean(ts, tc),
        mu_non: mean(ns, nc),
        mu_all: mean(ts + ns, n),
        pmean: mean(hs + ms, pred.len()),
    })
}
