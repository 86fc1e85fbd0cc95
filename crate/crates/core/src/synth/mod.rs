//! Synthetic indexer scores and multi-step decode traces.
//!
//! A row of length `n` scores one query at position `n − 1` against keys at
//! positions `0..n`. Query and keys are `1 + Am·z` with `z` standard normal,
//! both rotated with the YaRN frequencies. With `Am = 0` every row is the
//! pure positional profile `score[j] = g(n − 1 − j)`.
//!
//! Traces freeze the keys: each step appends one key and draws a fresh
//! query at the new last position.

pub mod gauss;
pub mod io;

use std::sync::Arc;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::oracle::{oracle_topk, value_multiset_eq};
use crate::error::{Error, Result};
use crate::metrics::ledger::ScanLedger;
use crate::rope::{
    anchor_to_query, static_prior_from_table, yarn_inv_freq, FrequencyTable, PhaseTable,
    RopeConfig,
};
use crate::row::{overlap_count, PredictionSet, Provenance, ScoreRow};
use crate::select::{SelectorStats, TopKSelector};

pub use gauss::GaussianStream;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n0: usize,
    pub steps: usize,
    pub k: usize,
    /// Noise scale `Am`.
    pub amplitude: f64,
    pub seed: u64,
    pub rope: RopeConfig,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n0: 70690,
            steps: 1,
            k: 2048,
            amplitude: 0.1,
            seed: 0,
            rope: RopeConfig::default(),
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be >= 1".into()));
        }
        if self.n0 < self.k {
            return Err(Error::RowTooShort {
                n: self.n0,
                k: self.k,
            });
        }
        if self.steps == 0 {
            return Err(Error::InvalidConfig("steps must be >= 1".into()));
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::InvalidConfig(
                "amplitude must be finite and >= 0".into(),
            ));
        }
        if self.n0 + self.steps - 1 > u32::MAX as usize {
            return Err(Error::InvalidConfig("row length exceeds u32 range".into()));
        }
        self.rope.validate()
    }

    /// Row length at the last step.
    pub fn max_len(&self) -> usize {
        self.n0 + self.steps - 1
    }
}

/// Rotates `vec` to `position`. Pairs are `(vec[2i], vec[2i+1])`; the
/// output holds all rotated first components, then all second components.
pub fn rope_rotate(vec: &[f64], position: u64, freqs: &FrequencyTable) -> Result<Vec<f64>> {
    let d = freqs.d_rope();
    if vec.len() != d {
        return Err(Error::SizeMismatch {
            expected: d,
            actual: vec.len(),
        });
    }
    let half = d / 2;
    let mut out = vec![0.0; d];
    for (i, &theta) in freqs.inv_freq().iter().enumerate() {
        let angle = position as f64 * theta;
        let (s, c) = (angle.sin(), angle.cos());
        let (x1, x2) = (vec[2 * i], vec[2 * i + 1]);
        out[i] = x1 * c - x2 * s;
        out[half + i] = x2 * c + x1 * s;
    }
    Ok(out)
}

/// Precomputed phases and `g` values shared by every row up to a maximum
/// length.
#[derive(Clone, Debug)]
pub struct ScoreSynth {
    freqs: FrequencyTable,
    phases: PhaseTable,
    g: Vec<f64>,
}

impl ScoreSynth {
    pub fn new(rope: &RopeConfig, max_len: usize) -> Result<Self> {
        if max_len == 0 {
            return Err(Error::EmptyInput("row length"));
        }
        let freqs = yarn_inv_freq(rope)?;
        let phases = PhaseTable::new(&freqs, max_len);
        let g = phases.g_values();
        Ok(Self { freqs, phases, g })
    }

    pub fn freqs(&self) -> &FrequencyTable {
        &self.freqs
    }

    pub fn max_len(&self) -> usize {
        self.phases.len()
    }

    /// `g(Δ)` for `Δ` in `[0, max_len)`.
    pub fn g(&self) -> &[f64] {
        &self.g
    }

    /// Static prior for a row of length `n`, as row positions.
    pub fn static_prior(&self, n: usize, k: usize) -> Result<PredictionSet> {
        self.check_len(n)?;
        let offsets = static_prior_from_table(&self.g[..n], k)?;
        Ok(anchor_to_query(&offsets, n - 1))
    }

    /// Scores of the query against `keys` (row-major, `d_rope` per key), with
    /// the query at the last position.
    pub fn scores(&self, q: &[f64], keys: &[f64]) -> Result<Vec<f32>> {
        let d = self.freqs.d_rope();
        if q.len() != d {
            return Err(Error::SizeMismatch {
                expected: d,
                actual: q.len(),
            });
        }
        if !keys.len().is_multiple_of(d) {
            return Err(Error::SizeMismatch {
                expected: keys.len() / d * d + d,
                actual: keys.len(),
            });
        }
        let n = keys.len() / d;
        self.check_len(n)?;
        let pairs = d / 2;
        let out = keys
            .chunks_exact(d)
            .enumerate()
            .map(|(j, kj)| {
                let (c, s) = self.phases.at(n - 1 - j);
                let mut acc = 0.0f64;
                for i in 0..pairs {
                    let (q1, q2) = (q[2 * i], q[2 * i + 1]);
                    let (k1, k2) = (kj[2 * i], kj[2 * i + 1]);
                    acc += (q1 * k1 + q2 * k2) * c[i] + (q1 * k2 - q2 * k1) * s[i];
                }
                acc as f32
            })
            .collect();
        Ok(out)
    }

    /// One row of length `n` from `seed`: query first, then keys in order.
    pub fn generate(&self, seed: u64, n: usize, amplitude: f64) -> Result<ScoreRow> {
        self.check_len(n)?;
        let d = self.freqs.d_rope();
        let mut gauss = GaussianStream::new(seed);
        let q = perturbed(&mut gauss, d, amplitude);
        let keys = perturbed(&mut gauss, n * d, amplitude);
        ScoreRow::new(self.scores(&q, &keys)?)
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.max_len() {
            return Err(Error::InvalidConfig(format!(
                "row length {n} outside [1, {}]",
                self.max_len()
            )));
        }
        Ok(())
    }
}

fn perturbed(gauss: &mut GaussianStream, len: usize, amplitude: f64) -> Vec<f64> {
    let mut v = vec![0.0; len];
    gauss.fill(&mut v);
    for x in &mut v {
        *x = 1.0 + amplitude * *x;
    }
    v
}

/// A single synthetic row of length `n` and its static prior.
pub fn generate_score_row(cfg: &SynthConfig, n: usize) -> Result<(ScoreRow, PredictionSet)> {
    if n < cfg.k {
        return Err(Error::RowTooShort { n, k: cfg.k });
    }
    let synth = ScoreSynth::new(&cfg.rope, n)?;
    let row = synth.generate(cfg.seed, n, cfg.amplitude)?;
    let prior = synth.static_prior(n, cfg.k)?;
    Ok((row, prior))
}

/// Step-by-step row source for a decode trace.
#[derive(Clone, Debug)]
pub struct TraceGenerator {
    cfg: SynthConfig,
    synth: Arc<ScoreSynth>,
    gauss: GaussianStream,
    q: Vec<f64>,
    keys: Vec<f64>,
    step: usize,
}

impl TraceGenerator {
    pub fn new(cfg: &SynthConfig) -> Result<Self> {
        cfg.validate()?;
        let synth = ScoreSynth::new(&cfg.rope, cfg.max_len())?;
        Self::with_synth(cfg, Arc::new(synth))
    }

    /// Reuses phases built for at least `cfg.max_len()` positions.
    pub fn with_synth(cfg: &SynthConfig, synth: Arc<ScoreSynth>) -> Result<Self> {
        cfg.validate()?;
        if synth.max_len() < cfg.max_len() {
            return Err(Error::InvalidConfig(format!(
                "phase table covers {} positions, trace needs {}",
                synth.max_len(),
                cfg.max_len()
            )));
        }
        let d = synth.freqs().d_rope();
        let mut gauss = GaussianStream::new(cfg.seed);
        let q = perturbed(&mut gauss, d, cfg.amplitude);
        let keys = perturbed(&mut gauss, cfg.n0 * d, cfg.amplitude);
        Ok(Self {
            cfg: cfg.clone(),
            synth,
            gauss,
            q,
            keys,
            step: 0,
        })
    }

    pub fn synth(&self) -> &ScoreSynth {
        &self.synth
    }

    pub fn config(&self) -> &SynthConfig {
        &self.cfg
    }

    /// Index of the step the next call to [`Self::next_row`] produces.
    pub fn step(&self) -> usize {
        self.step
    }

    pub fn next_row(&mut self) -> Option<Result<ScoreRow>> {
        if self.step >= self.cfg.steps {
            return None;
        }
        if self.step > 0 {
            let d = self.synth.freqs().d_rope();
            let key = perturbed(&mut self.gauss, d, self.cfg.amplitude);
            self.keys.extend_from_slice(&key);
            self.q = perturbed(&mut self.gauss, d, self.cfg.amplitude);
        }
        let step = self.step as u32;
        self.step += 1;
        Some(
            self.synth
                .scores(&self.q, &self.keys)
                .and_then(ScoreRow::new)
                .map(|r| r.with_step(step)),
        )
    }
}

#[derive(Clone, Debug)]
pub struct DecodeTrace {
    pub rows: Vec<ScoreRow>,
    /// Ascending selected indices per step.
    pub topk_per_step: Vec<Vec<u32>>,
    pub provenance_per_step: Vec<Provenance>,
    /// Overlap of each step's prediction with its exact Top-K.
    pub alpha: Vec<f64>,
    /// Per step from 1 on: overlap with the previous step's Top-K.
    pub hit_ratio_raw: Vec<f64>,
    pub hit_ratio_shifted: Vec<f64>,
    pub stats: Vec<SelectorStats>,
    pub ledgers: Vec<ScanLedger>,
}

/// Runs `selector` over a generated trace. Step 0 is predicted by the
/// static prior, every later step by the previous step's output. Each
/// selection is checked against the oracle before it is fed forward.
pub fn simulate_decode(cfg: &SynthConfig, selector: &dyn TopKSelector) -> Result<DecodeTrace> {
    if selector.k() != cfg.k {
        return Err(Error::InvalidConfig(format!(
            "selector k {} differs from trace k {}",
            selector.k(),
            cfg.k
        )));
    }
    let mut generator = TraceGenerator::new(cfg)?;
    let mut trace = DecodeTrace {
        rows: Vec::with_capacity(cfg.steps),
        topk_per_step: Vec::with_capacity(cfg.steps),
        provenance_per_step: Vec::with_capacity(cfg.steps),
        alpha: Vec::with_capacity(cfg.steps),
        hit_ratio_raw: Vec::new(),
        hit_ratio_shifted: Vec::new(),
        stats: Vec::with_capacity(cfg.steps),
        ledgers: Vec::with_capacity(cfg.steps),
    };
    while let Some(row) = generator.next_row() {
        let step = trace.rows.len();
        let wrap = |e: Error| Error::Step {
            step,
            source: Box::new(e),
        };
        let row = row.map_err(wrap)?;
        let pred = match trace.topk_per_step.last() {
            None => generator.synth().static_prior(row.len(), cfg.k).map_err(wrap)?,
            Some(prev) => PredictionSet::new(prev.clone(), Provenance::PreviousStep),
        };
        let out = selector.select(&row, Some(&pred)).map_err(wrap)?;
        let truth = oracle_topk(&row, cfg.k).map_err(wrap)?;
        let truth_values: Vec<f32> = truth.iter().map(|s| s.value).collect();
        if out.len() != cfg.k || !value_multiset_eq(&out.values, &truth_values) {
            return Err(wrap(Error::Invariant(format!(
                "{} output differs from the oracle",
                selector.name()
            ))));
        }
        let topk = out.sorted_indices();
        trace
            .alpha
            .push(overlap_count(pred.indices(), &topk) as f64 / cfg.k as f64);
        if let Some(prev) = trace.topk_per_step.last() {
            trace.hit_ratio_raw.push(hit_ratio(prev, &topk, cfg.k).map_err(wrap)?);
            trace
                .hit_ratio_shifted
                .push(shifted_hit_ratio(prev, &topk, cfg.k).map_err(wrap)?);
        }
        trace.provenance_per_step.push(pred.provenance());
        trace.topk_per_step.push(topk);
        trace.stats.push(out.stats);
        trace.ledgers.push(out.ledger);
        trace.rows.push(row);
    }
    Ok(trace)
}

fn check_sizes(prev: &[u32], curr: &[u32], k: usize) -> Result<()> {
    for len in [prev.len(), curr.len()] {
        if len != k {
            return Err(Error::SizeMismatch {
                expected: k,
                actual: len,
            });
        }
    }
    if k == 0 {
        return Err(Error::EmptyInput("k"));
    }
    Ok(())
}

/// `|prev ∩ curr| / k`.
pub fn hit_ratio(prev: &[u32], curr: &[u32], k: usize) -> Result<f64> {
    check_sizes(prev, curr, k)?;
    Ok(overlap_count(prev, curr) as f64 / k as f64)
}

/// `|{p + 1 : p ∈ prev} ∩ curr| / k`.
pub fn shifted_hit_ratio(prev: &[u32], curr: &[u32], k: usize) -> Result<f64> {
    check_sizes(prev, curr, k)?;
    let shifted: Vec<u32> = prev.iter().map(|&p| p + 1).collect();
    Ok(overlap_count(&shifted, curr) as f64 / k as f64)
}

/// `k` distinct positions drawn uniformly from `[0, n)`, ascending.
pub fn random_prediction<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Result<PredictionSet> {
    if n < k {
        return Err(Error::RowTooShort { n, k });
    }
    let mut idx: Vec<u32> = sample(rng, n, k).into_iter().map(|i| i as u32).collect();
    idx.sort_unstable();
    Ok(PredictionSet::new(idx, Provenance::Random))
}
