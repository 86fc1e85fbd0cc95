//! Selector comparison over fresh synthetic rows or a stored trace.
//!
//! Each score row is one cell. Every selector in the run sees the same row;
//! GVR runs once per requested prediction source, the other selectors once
//! with provenance `none`. Cells run in parallel and their records are
//! concatenated in row order.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use gvr_core::baselines::{oracle_topk, value_multiset_eq, RadixParams};
use gvr_core::gvr::GvrParams;
use gvr_core::metrics::{read_records, write_records, BenchRecord};
use gvr_core::rope::{anchor_to_query, g_table, static_prior_from_table, yarn_inv_freq, RopeConfig};
use gvr_core::synth::io::read_trace;
use gvr_core::synth::{hit_ratio, random_prediction, shifted_hit_ratio, ScoreSynth, SynthConfig, TraceGenerator};
use gvr_core::{Error, PredictionSet, Provenance, ScoreRow, SelectorRegistry, TopKSelector};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::exit::CliError;
use crate::report::bench_summary;

pub const BENCH_CSV: &str = "bench.csv";
pub const SUMMARY_MD: &str = "summary.md";
const RANDOM_STREAM: u64 = 1;

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub seed: u64,
    pub n_values: Vec<usize>,
    pub rows_per_n: usize,
    pub gvr: GvrParams,
    pub radix: RadixParams,
    pub amplitude: f64,
    pub rope: RopeConfig,
    pub algorithms: Vec<String>,
    pub provenances: Vec<Provenance>,
    pub output_dir: PathBuf,
    /// Read rows from this trace instead of generating them.
    pub trace: Option<PathBuf>,
    pub stride: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n_values: crate::config::DEFAULT_N_VALUES.to_vec(),
            rows_per_n: crate::config::DEFAULT_ROWS_PER_N,
            gvr: GvrParams::default(),
            radix: RadixParams::default(),
            amplitude: 0.1,
            rope: RopeConfig::default(),
            algorithms: crate::config::DEFAULT_ALGORITHMS.map(String::from).to_vec(),
            provenances: Provenance::ALL.to_vec(),
            output_dir: PathBuf::from("out"),
            trace: None,
            stride: 1,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(m));
        if self.algorithms.is_empty() {
            return bad("at least one algorithm is required".into());
        }
        let registry = self.registry();
        for a in &self.algorithms {
            registry.get(a).map_err(|e| CliError::Usage(e.to_string()))?;
        }
        if self.algorithms.iter().any(|a| a == "gvr") && self.provenances.is_empty() {
            return bad("gvr needs at least one provenance".into());
        }
        if self.rows_per_n == 0 {
            return bad("rows-per-n must be >= 1".into());
        }
        if self.stride == 0 {
            return bad("stride must be >= 1".into());
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return bad("amplitude must be finite and >= 0".into());
        }
        self.rope.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        if self.trace.is_none() {
            if self.n_values.is_empty() {
                return bad("n-values must not be empty".into());
            }
            // Each fresh row is the second step of a trace starting at n - 1.
            if let Some(&n) = self.n_values.iter().find(|&&n| n <= self.gvr.k) {
                return bad(format!("n = {n} must exceed k = {}", self.gvr.k));
            }
            if self.n_values.iter().any(|&n| n > u32::MAX as usize) {
                return bad("n exceeds the u32 index range".into());
            }
        }
        Ok(())
    }

    pub fn registry(&self) -> SelectorRegistry {
        SelectorRegistry::with_defaults(self.gvr.clone(), self.radix.clone())
    }

    fn selectors(&self) -> gvr_core::Result<Vec<Arc<dyn TopKSelector>>> {
        let registry = self.registry();
        let mut names: Vec<&str> = Vec::new();
        for a in &self.algorithms {
            if !names.contains(&a.as_str()) {
                names.push(a);
            }
        }
        names.into_iter().map(|n| registry.get(n)).collect()
    }

    fn ordered_provenances(&self) -> Vec<Provenance> {
        Provenance::ALL
            .into_iter()
            .filter(|p| self.provenances.contains(p))
            .collect()
    }

    fn needs_prior(&self) -> bool {
        self.algorithms.iter().any(|a| a == "gvr") && self.provenances.contains(&Provenance::StaticPrior)
    }
}

/// Per-row seed derived from the run seed.
pub fn cell_seed(seed: u64, row_id: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(row_id);
    rng.next_u64()
}

/// Static prior positions for a row of length `n` from a `g` table that
/// covers at least `n` offsets.
pub fn static_prior(g: &[f64], n: usize, k: usize) -> gvr_core::Result<PredictionSet> {
    if n > g.len() {
        return Err(Error::InvalidConfig(format!(
            "prior table covers {} offsets, row has {n}",
            g.len()
        )));
    }
    Ok(anchor_to_query(&static_prior_from_table(&g[..n], k)?, n - 1))
}

/// Row `n` of a fresh two-step trace and the exact Top-K of the step before.
pub fn fresh_row(
    synth: &Arc<ScoreSynth>,
    n: usize,
    k: usize,
    amplitude: f64,
    rope: &RopeConfig,
    seed: u64,
) -> gvr_core::Result<(ScoreRow, Vec<u32>)> {
    if n <= k {
        return Err(Error::RowTooShort { n: n.saturating_sub(1), k });
    }
    let cfg = SynthConfig {
        n0: n - 1,
        steps: 2,
        k,
        amplitude,
        seed,
        rope: rope.clone(),
    };
    let mut generator = TraceGenerator::with_synth(&cfg, Arc::clone(synth))?;
    let first = generator.next_row().expect("two steps")?;
    let row = generator.next_row().expect("two steps")?;
    Ok((row, sorted_topk(&first, k)?))
}

fn sorted_topk(row: &ScoreRow, k: usize) -> gvr_core::Result<Vec<u32>> {
    let mut idx: Vec<u32> = oracle_topk(row, k)?.iter().map(|s| s.index).collect();
    idx.sort_unstable();
    Ok(idx)
}

struct Cell<'a> {
    row_id: u64,
    row: &'a ScoreRow,
    prev: Option<&'a [u32]>,
    prior_table: &'a [f64],
}

fn run_cell(
    cfg: &BenchConfig,
    selectors: &[Arc<dyn TopKSelector>],
    provenances: &[Provenance],
    cell: Cell<'_>,
) -> gvr_core::Result<Vec<BenchRecord>> {
    let k = cfg.gvr.k;
    let row = cell.row;
    let n = row.len();
    let truth = oracle_topk(row, k)?;
    let truth_values: Vec<f32> = truth.iter().map(|s| s.value).collect();
    let mut truth_idx: Vec<u32> = truth.iter().map(|s| s.index).collect();
    truth_idx.sort_unstable();

    let mut rng = ChaCha8Rng::seed_from_u64(cell_seed(cfg.seed, cell.row_id));
    rng.set_stream(RANDOM_STREAM);
    let mut records = Vec::new();
    for sel in selectors {
        let sources: &[Provenance] = if sel.uses_prediction() {
            provenances
        } else {
            &[Provenance::None]
        };
        for &p in sources {
            let pred = match p {
                Provenance::None => None,
                Provenance::Random => Some(random_prediction(&mut rng, n, k)?),
                Provenance::PreviousStep => match cell.prev {
                    Some(prev) => Some(PredictionSet::new(prev.to_vec(), Provenance::PreviousStep)),
                    None => continue,
                },
                Provenance::StaticPrior => Some(static_prior(cell.prior_table, n, k)?),
            };
            let out = sel.select(row, pred.as_ref())?;
            let exact = out.len() == k && value_multiset_eq(&out.values, &truth_values);
            let traffic = out.traffic();
            let stats = out.stats.gvr();
            let raw = pred
                .as_ref()
                .map(|p| hit_ratio(p.indices(), &truth_idx, k))
                .transpose()?;
            let shifted = match (&pred, p) {
                (Some(pr), Provenance::PreviousStep) => {
                    Some(shifted_hit_ratio(pr.indices(), &truth_idx, k)?)
                }
                _ => None,
            };
            records.push(BenchRecord {
                row_id: cell.row_id,
                n,
                k,
                provenance: p,
                algorithm: sel.name().to_string(),
                secant_iters: stats.map(|s| s.secant_iters),
                snap_iters: stats.map(|s| s.snap_iters),
                candidate_count: stats.map(|s| s.candidate_count),
                done_kind: stats.map(|s| s.done_kind),
                full_row_scans: traffic.full_row_scans,
                candidate_scans: traffic.candidate_scans,
                bytes_read: traffic.bytes_read,
                hit_ratio_raw: raw,
                hit_ratio_shifted: shifted,
                exact_match: exact,
            });
        }
    }
    Ok(records)
}

fn wrap(row_id: u64) -> impl Fn(Error) -> Error {
    move |e| Error::Step {
        step: row_id as usize,
        source: Box::new(e),
    }
}

/// Runs every cell and returns the records in row order. Exactness is
/// recorded per record, not enforced here.
pub fn run_bench(cfg: &BenchConfig) -> anyhow::Result<Vec<BenchRecord>> {
    cfg.validate()?;
    let selectors = cfg.selectors()?;
    let provenances = cfg.ordered_provenances();
    match &cfg.trace {
        Some(dir) => run_trace(cfg, dir, &selectors, &provenances),
        None => run_fresh(cfg, &selectors, &provenances),
    }
}

fn run_fresh(
    cfg: &BenchConfig,
    selectors: &[Arc<dyn TopKSelector>],
    provenances: &[Provenance],
) -> anyhow::Result<Vec<BenchRecord>> {
    let k = cfg.gvr.k;
    let mut records = Vec::new();
    for (ni, &n) in cfg.n_values.iter().enumerate() {
        let synth = Arc::new(ScoreSynth::new(&cfg.rope, n)?);
        let cells: Vec<Vec<BenchRecord>> = (0..cfg.rows_per_n)
            .into_par_iter()
            .map(|rep| {
                let row_id = (ni * cfg.rows_per_n + rep) as u64;
                let seed = cell_seed(cfg.seed, row_id);
                let (row, prev) =
                    fresh_row(&synth, n, k, cfg.amplitude, &cfg.rope, seed).map_err(wrap(row_id))?;
                let cell = Cell {
                    row_id,
                    row: &row,
                    prev: Some(&prev),
                    prior_table: synth.g(),
                };
                run_cell(cfg, selectors, provenances, cell).map_err(wrap(row_id))
            })
            .collect::<gvr_core::Result<_>>()?;
        records.extend(cells.into_iter().flatten());
    }
    Ok(records)
}

fn run_trace(
    cfg: &BenchConfig,
    dir: &Path,
    selectors: &[Arc<dyn TopKSelector>],
    provenances: &[Provenance],
) -> anyhow::Result<Vec<BenchRecord>> {
    let k = cfg.gvr.k;
    let trace = read_trace(dir)?;
    if trace.is_empty() {
        return Err(CliError::Usage(format!("trace {} has no steps", dir.display())).into());
    }
    let max_n = trace.iter().map(|(e, _)| e.n).max().unwrap_or(0);
    let g = if cfg.needs_prior() {
        g_table(&yarn_inv_freq(&cfg.rope)?, max_n)?
    } else {
        Vec::new()
    };
    let steps: Vec<usize> = (0..trace.len()).step_by(cfg.stride).collect();
    let cells: Vec<Vec<BenchRecord>> = steps
        .into_par_iter()
        .map(|s| {
            let row_id = s as u64;
            let prev = match s {
                0 => None,
                _ => Some(sorted_topk(&trace[s - 1].1, k).map_err(wrap(row_id))?),
            };
            let cell = Cell {
                row_id,
                row: &trace[s].1,
                prev: prev.as_deref(),
                prior_table: &g,
            };
            run_cell(cfg, selectors, provenances, cell).map_err(wrap(row_id))
        })
        .collect::<gvr_core::Result<_>>()?;
    Ok(cells.into_iter().flatten().collect())
}

/// Writes `bench.csv`, then derives `summary.md` from the file just written.
pub fn write_outputs(dir: &Path, records: &[BenchRecord]) -> anyhow::Result<()> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join(BENCH_CSV);
    write_records(BufWriter::new(File::create(&csv_path)?), records)?;
    let back = read_records(File::open(&csv_path)?)?;
    fs::write(dir.join(SUMMARY_MD), bench_summary(&back))?;
    Ok(())
}

/// Full `bench` command: run, write both outputs, then fail on any
/// exactness mismatch.
pub fn cmd_bench(cfg: &BenchConfig) -> anyhow::Result<Vec<BenchRecord>> {
    let records = run_bench(cfg)?;
    write_outputs(&cfg.output_dir, &records)?;
    let failed = records.iter().filter(|r| !r.exact_match).count();
    if failed > 0 {
        return Err(CliError::Exactness {
            failed,
            total: records.len(),
        }
        .into());
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> BenchConfig {
        BenchConfig {
            n_values: vec![3000, 5000],
            rows_per_n: 2,
            gvr: GvrParams::with_k(256),
            ..BenchConfig::default()
        }
    }

    #[test]
    fn record_layout() {
        let records = run_bench(&small()).unwrap();
        // gvr x 4 sources + radix + oracle, per row.
        assert_eq!(records.len(), 2 * 2 * 6);
        assert!(records.iter().all(|r| r.exact_match));
        let ids: Vec<u64> = records.iter().map(|r| r.row_id).collect();
        assert!(ids.windows(2).all(|w| w[0] <= w[1]));
        let first: Vec<(&str, Provenance)> = records[..6]
            .iter()
            .map(|r| (r.algorithm.as_str(), r.provenance))
            .collect();
        assert_eq!(
            first,
            vec![
                ("gvr", Provenance::None),
                ("gvr", Provenance::Random),
                ("gvr", Provenance::PreviousStep),
                ("gvr", Provenance::StaticPrior),
                ("radix", Provenance::None),
                ("oracle", Provenance::None),
            ]
        );
        for r in &records {
            assert_eq!(r.hit_ratio_raw.is_some(), r.algorithm == "gvr" && r.provenance != Provenance::None);
            assert_eq!(r.hit_ratio_shifted.is_some(), r.provenance == Provenance::PreviousStep);
        }
    }

    #[test]
    fn deterministic_across_runs() {
        assert_eq!(run_bench(&small()).unwrap(), run_bench(&small()).unwrap());
    }

    #[test]
    fn validation() {
        let cfg = BenchConfig {
            algorithms: vec!["heap".into()],
            ..small()
        };
        assert!(cfg.validate().is_err());
        let cfg = BenchConfig {
            n_values: vec![256],
            ..small()
        };
        assert!(cfg.validate().is_err());
        let cfg = BenchConfig {
            algorithms: vec![],
            ..small()
        };
        assert!(cfg.validate().is_err());
        let cfg = BenchConfig {
            rows_per_n: 0,
            ..small()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn cell_seeds_differ() {
        assert_ne!(cell_seed(0, 0), cell_seed(0, 1));
        assert_ne!(cell_seed(0, 0), cell_seed(1, 0));
        assert_eq!(cell_seed(5, 9), cell_seed(5, 9));
    }
}
