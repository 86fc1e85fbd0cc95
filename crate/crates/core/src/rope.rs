//! Rotary-embedding frequency math: YaRN-extended frequencies, the positional
//! score function `g(Δ) = 2 Σ cos(Δ·θ_i)`, and the structural priors derived
//! from it.
//!
//! Everything here is evaluated in `f64`. Large `Δ·θ` arguments lose too much
//! precision in `f32`, and only the synthetic scores are ever stored narrow.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::row::{overlap_count, PredictionSet, Provenance};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RopeConfig {
    pub d_rope: usize,
    pub base: f64,
    pub scaling_factor: f64,
    pub orig_max_pos: usize,
    pub beta_fast: f64,
    pub beta_slow: f64,
    pub yarn_enabled: bool,
}

impl Default for RopeConfig {
    fn default() -> Self {
        Self {
            d_rope: 64,
            base: 10000.0,
            scaling_factor: 40.0,
            orig_max_pos: 4096,
            beta_fast: 32.0,
            beta_slow: 1.0,
            yarn_enabled: true,
        }
    }
}

impl RopeConfig {
    /// Plain RoPE with the default dimension and base.
    pub fn standard() -> Self {
        Self {
            yarn_enabled: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.base,
            self.scaling_factor,
            self.beta_fast,
            self.beta_slow,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidConfig("non-finite rope parameter".into()));
        }
        if self.d_rope == 0 || !self.d_rope.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "d_rope must be even and positive, got {}",
                self.d_rope
            )));
        }
        if self.base <= 1.0 {
            return Err(Error::InvalidConfig("base must exceed 1".into()));
        }
        if self.scaling_factor < 1.0 {
            return Err(Error::InvalidConfig("scaling_factor must be >= 1".into()));
        }
        if self.beta_fast <= self.beta_slow {
            return Err(Error::InvalidConfig(
                "beta_fast must exceed beta_slow".into(),
            ));
        }
        if self.yarn_enabled && (self.orig_max_pos == 0 || self.beta_slow <= 0.0) {
            return Err(Error::InvalidConfig(
                "YaRN needs positive orig_max_pos and beta_slow".into(),
            ));
        }
        Ok(())
    }
}

/// Angular frequencies `θ_i`, one per rotated pair.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyTable {
    inv_freq: Vec<f64>,
}

impl FrequencyTable {
    pub fn inv_freq(&self) -> &[f64] {
        &self.inv_freq
    }

    pub fn d_rope(&self) -> usize {
        self.inv_freq.len() * 2
    }

    pub fn pairs(&self) -> usize {
        self.inv_freq.len()
    }

    pub fn g_delta(&self, delta: u64) -> f64 {
        g_delta(self, delta)
    }
}

/// Frequencies for `cfg`.
///
/// With YaRN on, the first `lo` pairs keep their original frequency, pairs
/// past `hi` are divided by the scaling factor, and a linear ramp blends the
/// two in between. `lo`/`hi` come from the correction-range formula
/// `d·ln(L / (2πβ)) / (2 ln base)` for the fast and slow betas.
pub fn yarn_inv_freq(cfg: &RopeConfig) -> Result<FrequencyTable> {
    cfg.validate()?;
    let dim = cfg.d_rope as f64;
    let half = cfg.d_rope / 2;
    let extra: Vec<f64> = (0..half)
        .map(|i| 1.0 / cfg.base.powf((2 * i) as f64 / dim))
        .collect();
    if !cfg.yarn_enabled {
        return Ok(FrequencyTable { inv_freq: extra });
    }

    let two_pi = 2.0 * std::f64::consts::PI;
    let orig = cfg.orig_max_pos as f64;
    let log_base = 2.0 * cfg.base.ln();
    // `int()` truncates toward zero before the clamp at 0.
    let lo = ((dim * (orig / (cfg.beta_fast * two_pi)).ln() / log_base).trunc()).max(0.0);
    let hi = (dim * (orig / (cfg.beta_slow * two_pi)).ln() / log_base)
        .ceil()
        .min(dim - 1.0);
    let span = (hi - lo).max(1e-3);

    let inv_freq = extra
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let ramp = ((i as f64 - lo) / span).clamp(0.0, 1.0);
            let inter = e / cfg.scaling_factor;
            inter * ramp + e * (1.0 - ramp)
        })
        .collect();
    Ok(FrequencyTable { inv_freq })
}

/// Positional score at relative offset `delta`.
///
/// The cosines are accumulated in pair order and doubled at the end; the
/// synthetic generator relies on this exact order to reproduce `g` bit for
/// bit when the content noise is zero.
pub fn g_delta(freqs: &FrequencyTable, delta: u64) -> f64 {
    let d = delta as f64;
    let mut acc = 0.0;
    for &theta in &freqs.inv_freq {
        acc += (d * theta).cos();
    }
    2.0 * acc
}

pub fn g_table(freqs: &FrequencyTable, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::EmptyInput("g table length"));
    }
    Ok((0..n as u64).map(|d| g_delta(freqs, d)).collect())
}

/// Orders offsets by descending score, smaller offset first on ties.
fn rank_offsets(table: &[f64], offsets: &mut [u32]) {
    offsets.sort_unstable_by(|&a, &b| {
        table[b as usize]
            .total_cmp(&table[a as usize])
            .then(a.cmp(&b))
    });
}

/// The `k` offsets in `[0, n)` with the largest `g`, ties to the smaller
/// offset. Indices are offsets, not row positions; see [`anchor_to_query`].
pub fn static_pre_idx(freqs: &FrequencyTable, n: usize, k: usize) -> Result<PredictionSet> {
    if n < k {
        return Err(Error::RowTooShort { n, k });
    }
    let table = g_table(freqs, n)?;
    static_prior_from_table(&table, k)
}

/// [`static_pre_idx`] over a precomputed `g` table; the prior covers
/// offsets `[0, table.len())`.
pub fn static_prior_from_table(table: &[f64], k: usize) -> Result<PredictionSet> {
    let n = table.len();
    if k == 0 {
        return Err(Error::EmptyInput("k"));
    }
    if n < k {
        return Err(Error::RowTooShort { n, k });
    }
    let mut offsets: Vec<u32> = (0..n as u32).collect();
    if k < n {
        offsets.select_nth_unstable_by(k - 1, |&a, &b| {
            table[b as usize]
                .total_cmp(&table[a as usize])
                .then(a.cmp(&b))
        });
        offsets.truncate(k);
    }
    rank_offsets(table, &mut offsets);
    Ok(PredictionSet::new(offsets, Provenance::StaticPrior))
}

/// Strict discrete local maxima of `g` on `[0, n)`, ascending. Plateaus
/// produce no peak.
pub fn peak_indices(freqs: &FrequencyTable, n: usize) -> Result<Vec<u32>> {
    if n < 3 {
        return Err(Error::InvalidConfig(format!(
            "peak search needs n >= 3, got {n}"
        )));
    }
    let table = g_table(freqs, n)?;
    Ok(peaks_of(&table))
}

pub(crate) fn peaks_of(table: &[f64]) -> Vec<u32> {
    table
        .windows(3)
        .enumerate()
        .filter(|(_, w)| w[1] > w[0] && w[1] > w[2])
        .map(|(j, _)| j as u32 + 1)
        .collect()
}

/// Peak-based prior: the `k` highest local maxima of `g` (fewer if there are
/// not that many peaks). Offsets, like [`static_pre_idx`].
pub fn peak_pre_idx(freqs: &FrequencyTable, n: usize, k: usize) -> Result<PredictionSet> {
    if n < 3 {
        return Err(Error::InvalidConfig(format!(
            "peak search needs n >= 3, got {n}"
        )));
    }
    let table = g_table(freqs, n)?;
    let mut peaks = peaks_of(&table);
    rank_offsets(&table, &mut peaks);
    peaks.truncate(k);
    Ok(PredictionSet::new(peaks, Provenance::StaticPrior))
}

/// Maps relative offsets to key positions for a query at `query_pos`:
/// offset `Δ` names key `query_pos − Δ`. Offsets beyond the query are dropped.
pub fn anchor_to_query(offsets: &PredictionSet, query_pos: usize) -> PredictionSet {
    let indices = offsets
        .indices()
        .iter()
        .filter(|&&d| d as usize <= query_pos)
        .map(|&d| (query_pos - d as usize) as u32)
        .collect();
    PredictionSet::new(indices, offsets.provenance())
}

/// `|prior ∩ truth| / |truth|`.
pub fn prior_overlap(prior: &PredictionSet, truth: &[u32]) -> Result<f64> {
    if truth.is_empty() {
        return Err(Error::EmptyInput("truth set"));
    }
    Ok(overlap_count(prior.indices(), truth) as f64 / truth.len() as f64)
}

/// `cos(Δ·θ_i)` and `sin(Δ·θ_i)` for every offset in `[0, n)`, laid out
/// offset-major. Shared by the score generator so a long row costs one
/// table lookup per pair instead of two transcendental calls.
#[derive(Clone, Debug)]
pub struct PhaseTable {
    pairs: usize,
    len: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl PhaseTable {
    pub fn new(freqs: &FrequencyTable, n: usize) -> Self {
        let pairs = freqs.pairs();
        let mut cos = Vec::with_capacity(n * pairs);
        let mut sin = Vec::with_capacity(n * pairs);
        for delta in 0..n as u64 {
            let d = delta as f64;
            for &theta in freqs.inv_freq() {
                let angle = d * theta;
                cos.push(angle.cos());
                sin.push(angle.sin());
            }
        }
        Self {
            pairs,
            len: n,
            cos,
            sin,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn pairs(&self) -> usize {
        self.pairs
    }

    /// `g(Δ)` for every offset in the table, bit-identical to [`g_delta`].
    pub fn g_values(&self) -> Vec<f64> {
        self.cos
            .chunks_exact(self.pairs)
            .map(|c| 2.0 * c.iter().fold(0.0, |acc, &x| acc + x))
            .collect()
    }

    /// `(cos, sin)` rows for offset `delta`.
    pub fn at(&self, delta: usize) -> (&[f64], &[f64]) {
        let s = delta * self.pairs;
        (&self.cos[s..s + self.pairs], &self.sin[s..s + self.pairs])
    }
}
