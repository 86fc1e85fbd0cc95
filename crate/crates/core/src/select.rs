//! Common selector interface and a name-keyed registry.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::baselines::oracle::{oracle_topk, rank_cmp};
use crate::baselines::radix::{radix_select, RadixParams, RadixStats};
use crate::error::{Error, Result};
use crate::gvr::{gvr_select, GvrParams, PhaseStats};
use crate::metrics::ledger::{traffic_bytes, PassKind, Phase, ScanLedger, TrafficReport};
use crate::row::{PredictionSet, ScoreRow, Scored};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "kebab-case")]
pub enum SelectorStats {
    Gvr(PhaseStats),
    Radix(RadixStats),
    Oracle,
}

impl SelectorStats {
    pub fn gvr(&self) -> Option<&PhaseStats> {
        match self {
            SelectorStats::Gvr(s) => Some(s),
            _ => None,
        }
    }
}

/// Exactly `k` selected positions, ranked by descending value then ascending
/// index, with the passes it took to find them.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectionResult {
    pub indices: Vec<u32>,
    pub values: Vec<f32>,
    pub stats: SelectorStats,
    pub ledger: ScanLedger,
}

impl SelectionResult {
    pub fn from_pairs(mut pairs: Vec<Scored>, stats: SelectorStats, ledger: ScanLedger) -> Self {
        pairs.sort_unstable_by(rank_cmp);
        Self {
            indices: pairs.iter().map(|p| p.index).collect(),
            values: pairs.iter().map(|p| p.value).collect(),
            stats,
            ledger,
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn traffic(&self) -> TrafficReport {
        traffic_bytes(&self.ledger)
    }

    /// Selected indices in ascending order.
    pub fn sorted_indices(&self) -> Vec<u32> {
        let mut v = self.indices.clone();
        v.sort_unstable();
        v
    }
}

pub trait TopKSelector: Send + Sync {
    fn name(&self) -> &str;
    fn k(&self) -> usize;
    /// Whether `select` looks at the prediction set at all.
    fn uses_prediction(&self) -> bool;
    fn select(&self, row: &ScoreRow, pred: Option<&PredictionSet>) -> Result<SelectionResult>;
}

#[derive(Clone, Debug, Default)]
pub struct GvrSelector {
    pub params: GvrParams,
}

impl GvrSelector {
    pub fn new(params: GvrParams) -> Self {
        Self { params }
    }
}

impl TopKSelector for GvrSelector {
    fn name(&self) -> &str {
        "gvr"
    }

    fn k(&self) -> usize {
        self.params.k
    }

    fn uses_prediction(&self) -> bool {
        true
    }

    fn select(&self, row: &ScoreRow, pred: Option<&PredictionSet>) -> Result<SelectionResult> {
        gvr_select(row, pred, &self.params)
    }
}

#[derive(Clone, Debug)]
pub struct RadixSelector {
    pub k: usize,
    pub params: RadixParams,
}

impl RadixSelector {
    pub fn new(k: usize, params: RadixParams) -> Self {
        Self { k, params }
    }
}

impl TopKSelector for RadixSelector {
    fn name(&self) -> &str {
        "radix"
    }

    fn k(&self) -> usize {
        self.k
    }

    fn uses_prediction(&self) -> bool {
        false
    }

    fn select(&self, row: &ScoreRow, _pred: Option<&PredictionSet>) -> Result<SelectionResult> {
        let out = radix_select(row, self.k, &self.params)?;
        Ok(SelectionResult::from_pairs(
            out.selected,
            SelectorStats::Radix(out.stats),
            out.ledger,
        ))
    }
}

#[derive(Clone, Debug)]
pub struct OracleSelector {
    pub k: usize,
}

impl TopKSelector for OracleSelector {
    fn name(&self) -> &str {
        "oracle"
    }

    fn k(&self) -> usize {
        self.k
    }

    fn uses_prediction(&self) -> bool {
        false
    }

    fn select(&self, row: &ScoreRow, _pred: Option<&PredictionSet>) -> Result<SelectionResult> {
        let pairs = oracle_topk(row, self.k)?;
        let mut ledger = ScanLedger::new();
        ledger.record(PassKind::FullRow, row.len(), Phase::OracleSort);
        Ok(SelectionResult::from_pairs(pairs, SelectorStats::Oracle, ledger))
    }
}

/// Selectors by name.
#[derive(Clone, Default)]
pub struct SelectorRegistry {
    selectors: BTreeMap<String, Arc<dyn TopKSelector>>,
}

impl SelectorRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// The three built-in selectors sharing one `k`.
    pub fn with_defaults(gvr: GvrParams, radix: RadixParams) -> Self {
        let k = gvr.k;
        let mut r = Self::new();
        r.register(Arc::new(GvrSelector::new(gvr)));
        r.register(Arc::new(RadixSelector::new(k, radix)));
        r.register(Arc::new(OracleSelector { k }));
        r
    }

    /// Adds a selector, replacing any previous one with the same name.
    pub fn register(&mut self, selector: Arc<dyn TopKSelector>) {
        self.selectors.insert(selector.name().to_string(), selector);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn TopKSelector>> {
        self.selectors
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownName {
                kind: "selector",
                name: name.to_string(),
            })
    }

    pub fn names(&self) -> Vec<&str> {
        self.selectors.keys().map(String::as_str).collect()
    }
}

impl std::fmt::Debug for SelectorRegistry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.selectors.keys()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_lookup() {
        let reg = SelectorRegistry::with_defaults(GvrParams::with_k(4), RadixParams::default());
        assert_eq!(reg.names(), vec!["gvr", "oracle", "radix"]);
        assert!(matches!(reg.get("heap"), Err(Error::UnknownName { .. })));

        let row = ScoreRow::new(vec![9.0, 7.0, 5.0, 3.0, 1.0, 8.0, 2.0, 6.0]).unwrap();
        for name in reg.names() {
            let out = reg.get(name).unwrap().select(&row, None).unwrap();
            assert_eq!(out.indices, vec![0, 5, 1, 7], "{name}");
            assert!(out.ledger.full_row_scans() >= 1);
        }
    }
}
