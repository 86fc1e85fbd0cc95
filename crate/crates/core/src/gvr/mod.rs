//! Guess-Verify-Refine exact Top-K selection.
//!
//! 1. Statistics of the row at the predicted positions give a first
//!    threshold guess (`pmean`).
//! 2. A bracketed secant search moves the threshold until `k <= f(T) <= C`.
//! 3. One pass collects `{x >= T}` into a buffer of at most `C` elements,
//!    reusing the per-chunk counts of the last search pass.
//! 4. Histogram and snap steps find the exact k-th value inside the buffer.

pub mod collect;
pub mod count;
pub mod refine;
pub mod secant;
pub mod stats;
pub mod tiefill;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::baselines::oracle::oracle_topk;
use crate::error::{Error, Result};
use crate::metrics::ledger::{PassKind, Phase, ScanLedger};
use crate::row::{PredictionSet, ScoreRow, Scored};
use crate::select::{SelectionResult, SelectorStats};

pub use collect::collect_candidates;
pub use count::{count_ge, ChunkCounts};
pub use refine::{refine_exact, RefineOutcome};
pub use secant::{secant_search, SecantOutcome, ThresholdBracket};
pub use stats::{preidx_stats, stride_sample, PredStats};
pub use tiefill::tie_fill_select;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GvrParams {
    pub k: usize,
    /// Candidate buffer capacity `C`.
    pub max_candidates: usize,
    pub num_bins: usize,
    pub num_chunks: usize,
    pub max_secant_iters: u32,
    pub first_step_damping: f64,
}

impl Default for GvrParams {
    fn default() -> Self {
        Self {
            k: 2048,
            max_candidates: 6144,
            num_bins: 2048,
            num_chunks: 512,
            max_secant_iters: 16,
            first_step_damping: 0.5,
        }
    }
}

impl GvrParams {
    pub fn with_k(k: usize) -> Self {
        Self {
            k,
            max_candidates: 3 * k,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if self.k == 0 {
            return bad("k must be >= 1");
        }
        if self.k > self.max_candidates {
            return bad("k must not exceed max_candidates");
        }
        if self.num_bins < 2 {
            return bad("num_bins must be >= 2");
        }
        if self.num_chunks == 0 {
            return bad("num_chunks must be >= 1");
        }
        if self.max_secant_iters == 0 {
            return bad("max_secant_iters must be >= 1");
        }
        if !(self.first_step_damping > 0.0 && self.first_step_damping <= 1.0) {
            return bad("first_step_damping must lie in (0, 1]");
        }
        Ok(())
    }
}

/// How the threshold search ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DoneKind {
    Converged,
    TieFill,
    FallbackSort,
}

impl DoneKind {
    pub const ALL: [DoneKind; 3] = [DoneKind::Converged, DoneKind::TieFill, DoneKind::FallbackSort];

    pub fn as_str(self) -> &'static str {
        match self {
            DoneKind::Converged => "converged",
            DoneKind::TieFill => "tie-fill",
            DoneKind::FallbackSort => "fallback-sort",
        }
    }
}

impl fmt::Display for DoneKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DoneKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DoneKind::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| Error::UnknownName {
                kind: "done kind",
                name: s.to_string(),
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseStats {
    pub pmin: f32,
    pub pmax: f32,
    pub pmean: f32,
    pub secant_iters: u32,
    pub snap_iters: u32,
    /// `f(T)` at collection time; for tie-fill and fallback, the count at the
    /// last probe.
    pub candidate_count: usize,
    pub done_kind: DoneKind,
    pub phase4_skipped: bool,
    pub final_threshold: Option<f32>,
}

pub fn gvr_select(
    row: &ScoreRow,
    pred: Option<&PredictionSet>,
    params: &GvrParams,
) -> Result<SelectionResult> {
    params.validate()?;
    let n = row.len();
    let k = params.k;
    if n < k {
        return Err(Error::RowTooShort { n, k });
    }
    let mut ledger = ScanLedger::new();

    if n == k {
        return Ok(identity(row, ledger));
    }

    let stats = match pred {
        Some(p) => {
            p.validate(n)?;
            preidx_stats(row, p, &mut ledger)?
        }
        None => stats::stats_at(row, &stride_sample(n, k), &mut ledger)?,
    };

    let search = secant_search(row, &stats, params, &mut ledger)?;
    let mut phase = PhaseStats {
        pmin: stats.pmin,
        pmax: stats.pmax,
        pmean: stats.pmean,
        secant_iters: search.iterations,
        snap_iters: 0,
        candidate_count: search.count,
        done_kind: search.done_kind,
        phase4_skipped: false,
        final_threshold: None,
    };

    let selected = match search.done_kind {
        DoneKind::Converged => {
            let cands = collect_candidates(
                row,
                search.threshold,
                &search.cache,
                params.max_candidates,
                &mut ledger,
            )?;
            let refined = refine_exact(&cands, k, params, &mut ledger)?;
            phase.snap_iters = refined.snap_iters;
            phase.phase4_skipped = refined.skipped;
            phase.final_threshold = refined.threshold.or(Some(search.threshold));
            refined.selected
        }
        DoneKind::TieFill => {
            phase.final_threshold = Some(search.bracket.val_lo);
            tie_fill_select(row, &search.bracket, k, &mut ledger)?
        }
        DoneKind::FallbackSort => {
            ledger.record(PassKind::FullRow, n, Phase::FallbackSort);
            let out = oracle_topk(row, k)?;
            phase.final_threshold = out.last().map(|s| s.value);
            out
        }
    };

    Ok(SelectionResult::from_pairs(
        selected,
        SelectorStats::Gvr(phase),
        ledger,
    ))
}

/// `n == k`: every index is selected. The row is still read once.
fn identity(row: &ScoreRow, mut ledger: ScanLedger) -> SelectionResult {
    let scores = row.scores();
    let (mut min, mut max, mut sum) = (f32::INFINITY, f32::NEG_INFINITY, 0.0f64);
    let pairs: Vec<Scored> = scores
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            min = min.min(x);
            max = max.max(x);
            sum += x as f64;
            Scored::new(x, i as u32)
        })
        .collect();
    ledger.record(PassKind::FullRow, scores.len(), Phase::CandidateCollect);
    let mean = ((sum / scores.len() as f64) as f32).clamp(min, max);
    let phase = PhaseStats {
        pmin: min,
        pmax: max,
        pmean: mean,
        secant_iters: 0,
        snap_iters: 0,
        candidate_count: scores.len(),
        done_kind: DoneKind::Converged,
        phase4_skipped: true,
        final_threshold: Some(min),
    };
    SelectionResult::from_pairs(pairs, SelectorStats::Gvr(phase), ledger)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::oracle::value_multiset_eq;
    use crate::row::Provenance;

    fn lcg_row(n: usize, seed: u64) -> ScoreRow {
        let mut s = seed;
        let v = (0..n)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 40) as f32 / (1u64 << 24) as f32) * 2.0 - 1.0
            })
            .collect();
        ScoreRow::new(v).unwrap()
    }

    fn check(row: &ScoreRow, pred: Option<&PredictionSet>, params: &GvrParams) -> SelectionResult {
        let out = gvr_select(row, pred, params).unwrap();
        let oracle = oracle_topk(row, params.k).unwrap();
        let ov: Vec<f32> = oracle.iter().map(|s| s.value).collect();
        assert!(value_multiset_eq(&out.values, &ov));
        assert_eq!(out.indices.len(), params.k);
        out
    }

    #[test]
    fn identity_when_n_equals_k() {
        let row = lcg_row(64, 3);
        let out = check(&row, None, &GvrParams::with_k(64));
        let mut idx = out.indices.clone();
        idx.sort_unstable();
        assert_eq!(idx, (0..64).collect::<Vec<u32>>());
        assert_eq!(out.ledger.full_row_scans(), 1);
    }

    #[test]
    fn converged_runs_read_the_row_i_plus_one_times() {
        let params = GvrParams::default();
        for seed in 0..8 {
            let row = lcg_row(50_000, seed);
            let pred = PredictionSet::new((0..2048).map(|i| i * 24).collect(), Provenance::Random);
            let out = check(&row, Some(&pred), &params);
            let SelectorStats::Gvr(s) = &out.stats else {
                panic!("wrong stats")
            };
            assert_eq!(s.done_kind, DoneKind::Converged);
            assert_eq!(out.ledger.full_row_scans(), s.secant_iters as usize + 1);
        }
    }

    #[test]
    fn absent_prediction_uses_stride_sample() {
        let row = lcg_row(20_000, 9);
        let out = check(&row, None, &GvrParams::default());
        assert_eq!(out.ledger.count(PassKind::ScatteredPred), 1);
        assert_eq!(out.ledger.entries()[0].elements, 2048);
    }

    #[test]
    fn ties_and_fallback_stay_exact() {
        let row = ScoreRow::new(vec![0.5; 9000]).unwrap();
        let out = check(&row, None, &GvrParams::default());
        assert_eq!(out.indices, (0..2048).collect::<Vec<u32>>());

        let one_iter = GvrParams {
            max_secant_iters: 1,
            ..GvrParams::default()
        };
        let row = ScoreRow::new((0..40_000).map(|i| i as f32).collect()).unwrap();
        let pred = PredictionSet::new(vec![0], Provenance::Random);
        let out = check(&row, Some(&pred), &one_iter);
        let SelectorStats::Gvr(s) = &out.stats else {
            panic!("wrong stats")
        };
        assert_eq!(s.done_kind, DoneKind::FallbackSort);
        assert_eq!(out.ledger.count_phase(Phase::FallbackSort), 1);
    }

    #[test]
    fn rejects_bad_inputs() {
        let row = lcg_row(100, 0);
        assert!(matches!(
            gvr_select(&row, None, &GvrParams::default()),
            Err(Error::RowTooShort { .. })
        ));
        let pred = PredictionSet::new(vec![100], Provenance::Random);
        assert!(gvr_select(&row, Some(&pred), &GvrParams::with_k(10)).is_err());
        let bad = GvrParams {
            first_step_damping: 0.0,
            ..GvrParams::default()
        };
        assert!(bad.validate().is_err());
    }
}
