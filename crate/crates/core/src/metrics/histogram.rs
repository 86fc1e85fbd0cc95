//! Iteration-count distributions over many selections.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gvr::{DoneKind, PhaseStats};

/// Counts per observed value with cumulative fractions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Distribution {
    counts: BTreeMap<u32, usize>,
    total: usize,
}

impl Distribution {
    pub fn add(&mut self, value: u32) {
        *self.counts.entry(value).or_default() += 1;
        self.total += 1;
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn count(&self, value: u32) -> usize {
        self.counts.get(&value).copied().unwrap_or(0)
    }

    /// Fraction of observations `<= value`.
    pub fn cdf(&self, value: u32) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let at_most: usize = self.counts.range(..=value).map(|(_, c)| c).sum();
        at_most as f64 / self.total as f64
    }

    /// `(value, count, cdf)` for each observed value, ascending.
    pub fn table(&self) -> Vec<(u32, usize, f64)> {
        let mut acc = 0;
        self.counts
            .iter()
            .map(|(&v, &c)| {
                acc += c;
                (v, c, acc as f64 / self.total as f64)
            })
            .collect()
    }

    pub fn mean(&self) -> Option<f64> {
        if self.total == 0 {
            return None;
        }
        let sum: u64 = self.counts.iter().map(|(&v, &c)| v as u64 * c as u64).sum();
        Some(sum as f64 / self.total as f64)
    }

    /// Lower median.
    pub fn median(&self) -> Option<u32> {
        if self.total == 0 {
            return None;
        }
        let rank = self.total.div_ceil(2);
        let mut acc = 0;
        for (&v, &c) in &self.counts {
            acc += c;
            if acc >= rank {
                return Some(v);
            }
        }
        None
    }

    pub fn max(&self) -> Option<u32> {
        self.counts.keys().next_back().copied()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct IterationHistogram {
    pub secant: Distribution,
    pub snap: Distribution,
    pub done_kinds: BTreeMap<DoneKind, usize>,
}

impl IterationHistogram {
    pub fn add(&mut self, secant_iters: u32, snap_iters: u32, done_kind: DoneKind) {
        self.secant.add(secant_iters);
        self.snap.add(snap_iters);
        *self.done_kinds.entry(done_kind).or_default() += 1;
    }

    pub fn total(&self) -> usize {
        self.secant.total()
    }

    pub fn done_fraction(&self, kind: DoneKind) -> f64 {
        match self.total() {
            0 => 0.0,
            t => self.done_kinds.get(&kind).copied().unwrap_or(0) as f64 / t as f64,
        }
    }
}

pub fn iteration_histogram(stats: &[PhaseStats]) -> Result<IterationHistogram> {
    if stats.is_empty() {
        return Err(Error::EmptyInput("phase statistics"));
    }
    let mut h = IterationHistogram::default();
    for s in stats {
        h.add(s.secant_iters, s.snap_iters, s.done_kind);
    }
    Ok(h)
}
