//! Prediction-source comparison on one decode trace.
//!
//! Every source sees the same rows. The `none` source is the radix
//! baseline; the others run GVR with their own prediction set. Step 0 is
//! left out of the averages because it has no previous step.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::baselines::oracle::{oracle_topk, value_multiset_eq};
use crate::baselines::radix::RadixParams;
use crate::error::{Error, Result};
use crate::gvr::GvrParams;
use crate::metrics::ledger::traffic_bytes;
use crate::row::{overlap_count, PredictionSet, Provenance};
use crate::select::{GvrSelector, RadixSelector, SelectionResult, TopKSelector};
use crate::synth::{random_prediction, SynthConfig, TraceGenerator};

/// Offsets the random-prediction stream away from the score stream.
const RANDOM_STREAM: u64 = 0x5eed_0f4a_4d00;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AblationRow {
    pub provenance: Provenance,
    pub algorithm: String,
    pub steps: usize,
    /// Mean overlap of the prediction with the exact Top-K.
    pub mean_alpha: Option<f64>,
    pub mean_full_row_scans: f64,
    pub mean_bytes: f64,
    pub mean_secant_iters: Option<f64>,
}

#[derive(Default)]
struct Acc {
    alpha: f64,
    scans: f64,
    bytes: f64,
    iters: f64,
    steps: usize,
}

pub fn ablation_run(
    cfg: &SynthConfig,
    sources: &[Provenance],
    gvr: &GvrParams,
    radix: &RadixParams,
) -> Result<Vec<AblationRow>> {
    if sources.is_empty() {
        return Err(Error::EmptyInput("prediction sources"));
    }
    if cfg.steps < 2 {
        return Err(Error::InvalidConfig(
            "ablation needs at least two steps".into(),
        ));
    }
    if gvr.k != cfg.k {
        return Err(Error::InvalidConfig("gvr k differs from trace k".into()));
    }
    let order: Vec<Provenance> = Provenance::ALL
        .into_iter()
        .filter(|p| sources.contains(p))
        .collect();
    let gvr_sel = GvrSelector::new(gvr.clone());
    let radix_sel = RadixSelector::new(cfg.k, radix.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ RANDOM_STREAM);
    let mut accs: Vec<Acc> = order.iter().map(|_| Acc::default()).collect();

    let mut generator = TraceGenerator::new(cfg)?;
    let mut prev: Option<Vec<u32>> = None;
    while let Some(row) = generator.next_row() {
        let step = generator.step() - 1;
        let wrap = |e: Error| Error::Step {
            step,
            source: Box::new(e),
        };
        let row = row.map_err(wrap)?;
        let n = row.len();
        let truth = oracle_topk(&row, cfg.k).map_err(wrap)?;
        let truth_values: Vec<f32> = truth.iter().map(|s| s.value).collect();
        let mut truth_idx: Vec<u32> = truth.iter().map(|s| s.index).collect();
        truth_idx.sort_unstable();

        if let Some(prev_idx) = prev.take() {
            for (src, acc) in order.iter().zip(accs.iter_mut()) {
                let pred = match src {
                    Provenance::None => None,
                    Provenance::Random => Some(random_prediction(&mut rng, n, cfg.k)?),
                    Provenance::PreviousStep => {
                        Some(PredictionSet::new(prev_idx.clone(), Provenance::PreviousStep))
                    }
                    Provenance::StaticPrior => {
                        Some(generator.synth().static_prior(n, cfg.k).map_err(wrap)?)
                    }
                };
                let out: SelectionResult = match &pred {
                    None => radix_sel.select(&row, None),
                    Some(p) => gvr_sel.select(&row, Some(p)),
                }
                .map_err(wrap)?;
                if !value_multiset_eq(&out.values, &truth_values) {
                    return Err(wrap(Error::Invariant(format!(
                        "{src} selection differs from the oracle"
                    ))));
                }
                if let Some(p) = &pred {
                    acc.alpha += overlap_count(p.indices(), &truth_idx) as f64 / cfg.k as f64;
                }
                if let Some(s) = out.stats.gvr() {
                    acc.iters += s.secant_iters as f64;
                }
                acc.scans += out.ledger.full_row_scans() as f64;
                acc.bytes += traffic_bytes(&out.ledger).bytes_read as f64;
                acc.steps += 1;
            }
        }
        prev = Some(truth_idx);
    }

    Ok(order
        .into_iter()
        .zip(accs)
        .map(|(src, a)| {
            let steps = a.steps as f64;
            let predicted = src != Provenance::None;
            AblationRow {
                provenance: src,
                algorithm: if predicted { "gvr" } else { "radix" }.to_string(),
                steps: a.steps,
                mean_alpha: predicted.then(|| a.alpha / steps),
                mean_full_row_scans: a.scans / steps,
                mean_bytes: a.bytes / steps,
                mean_secant_iters: predicted.then(|| a.iters / steps),
            }
        })
        .collect())
}
