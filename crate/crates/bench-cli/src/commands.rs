//! Subcommand implementations.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::Context;
use gvr_core::baselines::{oracle_topk, value_multiset_eq};
use gvr_core::metrics::{format_float, read_records};
use gvr_core::rope::{anchor_to_query, g_table, peak_pre_idx, static_pre_idx, yarn_inv_freq, RopeConfig};
use gvr_core::synth::io::{read_row, read_trace, write_trace};
use gvr_core::synth::{hit_ratio, random_prediction, shifted_hit_ratio, ScoreSynth, SynthConfig, TraceGenerator};
use gvr_core::{PredictionSet, Provenance, ScoreRow};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::bench::{cmd_bench, fresh_row, BenchConfig};
use crate::cli::{
    BenchArgs, Cli, Command, CorrelateArgs, GenArgs, ReplayArgs, RopeArgs, SelectArgs,
};
use crate::config::{self, pick, FileConfig};
use crate::exit::CliError;
use crate::report::replay_report;

pub const CORRELATE_CSV: &str = "correlate.csv";
pub const G_TABLE_CSV: &str = "g_table.csv";
pub const PRIOR_CSV: &str = "static_prior.csv";
pub const PEAKS_CSV: &str = "peaks.csv";
pub const MOVING_WINDOW: usize = 25;

struct Globals {
    seed: u64,
    out: PathBuf,
    file: FileConfig,
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    let file = FileConfig::load(cli.config.as_deref())?;
    let g = Globals {
        seed: pick(cli.seed, file.seed, 0),
        out: pick(cli.out, file.out.clone(), PathBuf::from("out")),
        file,
    };
    match cli.command {
        Command::Gen(a) => gen(&g, &a),
        Command::Select(a) => select(&g, &a),
        Command::Bench(a) => bench(&g, &a),
        Command::Correlate(a) => correlate(&g, &a),
        Command::Rope(a) => rope(&g, &a),
        Command::ReplayStats(a) => replay(&a),
    }
}

fn usage(e: gvr_core::Error) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn gen_config(seed: u64, args: &GenArgs, file: &FileConfig) -> Result<SynthConfig, CliError> {
    let cfg = SynthConfig {
        n0: pick(args.n0, file.n0, config::DEFAULT_N),
        steps: pick(args.steps, file.steps, 1),
        k: config::k(args.k, file),
        amplitude: config::amplitude(&args.synth, file),
        seed,
        rope: config::rope(&args.synth, file),
    };
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn gen(g: &Globals, args: &GenArgs) -> anyhow::Result<()> {
    let cfg = gen_config(g.seed, args, &g.file)?;
    let rows = trace_rows(&cfg)?;
    write_trace(&g.out, &rows).with_context(|| format!("writing {}", g.out.display()))?;
    println!("wrote {} rows to {}", rows.len(), g.out.display());
    Ok(())
}

/// All rows of a generated trace, in step order.
pub fn trace_rows(cfg: &SynthConfig) -> gvr_core::Result<Vec<ScoreRow>> {
    let mut generator = TraceGenerator::new(cfg)?;
    let mut rows = Vec::with_capacity(cfg.steps);
    while let Some(row) = generator.next_row() {
        rows.push(row?);
    }
    Ok(rows)
}

fn select(g: &Globals, args: &SelectArgs) -> anyhow::Result<()> {
    let f = &g.file;
    let gvr = config::gvr_params(&args.gvr, f)?;
    let radix = config::radix_params(&args.radix, f)?;
    let k = gvr.k;
    let rope = config::rope(&args.synth, f);
    let algorithm = pick(args.algorithm.clone(), f.algorithm.clone(), "gvr".into());
    let provenance = pick(args.provenance, f.provenance, Provenance::StaticPrior);
    let registry = BenchConfig {
        gvr: gvr.clone(),
        radix,
        ..BenchConfig::default()
    }
    .registry();
    let selector = registry.get(&algorithm).map_err(usage)?;

    let row_path = args.row.clone().or_else(|| f.row.clone());
    let (row, prev) = match &row_path {
        Some(path) => {
            let row = read_row(path).with_context(|| format!("reading {}", path.display()))?;
            (row, None)
        }
        None => {
            let n = pick(args.n, f.n, config::DEFAULT_N);
            if n <= k {
                return Err(CliError::Usage(format!("n = {n} must exceed k = {k}")).into());
            }
            let synth = Arc::new(ScoreSynth::new(&rope, n).map_err(usage)?);
            let amplitude = config::amplitude(&args.synth, f);
            let (row, prev) = fresh_row(&synth, n, k, amplitude, &rope, g.seed)?;
            (row, Some(prev))
        }
    };
    let n = row.len();
    if n < k {
        return Err(CliError::Usage(format!("row of length {n} is shorter than k = {k}")).into());
    }

    let pred: Option<PredictionSet> = if !selector.uses_prediction() {
        None
    } else {
        match provenance {
            Provenance::None => None,
            Provenance::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
                rng.set_stream(1);
                Some(random_prediction(&mut rng, n, k)?)
            }
            Provenance::PreviousStep => match prev {
                Some(p) => Some(PredictionSet::new(p, Provenance::PreviousStep)),
                None => {
                    return Err(CliError::Usage(
                        "previous-step prediction needs a synthetic row".into(),
                    )
                    .into())
                }
            },
            Provenance::StaticPrior => {
                let offsets = static_pre_idx(&yarn_inv_freq(&rope)?, n, k)?;
                Some(anchor_to_query(&offsets, n - 1))
            }
        }
    };

    let out = selector.select(&row, pred.as_ref())?;
    let truth: Vec<f32> = oracle_topk(&row, k)?.iter().map(|s| s.value).collect();
    let exact = out.len() == k && value_multiset_eq(&out.values, &truth);
    let report = json!({
        "algorithm": selector.name(),
        "provenance": pred.as_ref().map_or(Provenance::None, |p| p.provenance()),
        "n": n,
        "k": k,
        "exact_match": exact,
        "stats": out.stats,
        "traffic": out.traffic(),
        "ledger": out.ledger.entries(),
        "indices": out.indices,
        "values": out.values,
    });
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    serde_json::to_writer(&mut lock, &report)?;
    writeln!(lock)?;
    if !exact {
        return Err(CliError::Exactness { failed: 1, total: 1 }.into());
    }
    Ok(())
}

pub fn bench_config(g_seed: u64, out: &Path, args: &BenchArgs, f: &FileConfig) -> Result<BenchConfig, CliError> {
    let base = BenchConfig::default();
    let cfg = BenchConfig {
        seed: g_seed,
        n_values: pick(args.n_values.clone(), f.n_values.clone(), base.n_values),
        rows_per_n: pick(args.rows_per_n, f.rows_per_n, base.rows_per_n),
        gvr: config::gvr_params(&args.gvr, f)?,
        radix: config::radix_params(&args.radix, f)?,
        amplitude: config::amplitude(&args.synth, f),
        rope: config::rope(&args.synth, f),
        algorithms: pick(args.algorithms.clone(), f.algorithms.clone(), base.algorithms),
        provenances: pick(args.provenances.clone(), f.provenances.clone(), base.provenances),
        output_dir: out.to_path_buf(),
        trace: args.trace.clone().or_else(|| f.trace.clone()),
        stride: pick(args.stride, f.stride, base.stride),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn bench(g: &Globals, args: &BenchArgs) -> anyhow::Result<()> {
    let cfg = bench_config(g.seed, &g.out, args, &g.file)?;
    let records = cmd_bench(&cfg)?;
    println!(
        "{} selections, all exact; wrote {}",
        records.len(),
        cfg.output_dir.display()
    );
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelateRow {
    pub step: usize,
    pub n: usize,
    pub raw: f64,
    pub shifted: f64,
    pub raw_ma: f64,
    pub shifted_ma: f64,
}

/// Trailing mean over at most `window` values ending at each position.
pub fn moving_average(xs: &[f64], window: usize) -> Vec<f64> {
    (0..xs.len())
        .map(|i| {
            let lo = (i + 1).saturating_sub(window);
            let w = &xs[lo..=i];
            w.iter().sum::<f64>() / w.len() as f64
        })
        .collect()
}

/// Hit ratios of each step's exact Top-K against the previous step's, from
/// step 1 on.
pub fn correlate_rows(rows: &[ScoreRow], k: usize) -> anyhow::Result<Vec<CorrelateRow>> {
    if rows.len() < 2 {
        return Err(CliError::Usage(format!(
            "correlation needs at least 2 steps, trace has {}",
            rows.len()
        ))
        .into());
    }
    let topk: Vec<Vec<u32>> = rows
        .par_iter()
        .map(|r| {
            let mut idx: Vec<u32> = oracle_topk(r, k)?.iter().map(|s| s.index).collect();
            idx.sort_unstable();
            Ok(idx)
        })
        .collect::<gvr_core::Result<_>>()?;
    let mut raw = Vec::with_capacity(rows.len() - 1);
    let mut shifted = Vec::with_capacity(rows.len() - 1);
    for w in topk.windows(2) {
        raw.push(hit_ratio(&w[0], &w[1], k)?);
        shifted.push(shifted_hit_ratio(&w[0], &w[1], k)?);
    }
    let raw_ma = moving_average(&raw, MOVING_WINDOW);
    let shifted_ma = moving_average(&shifted, MOVING_WINDOW);
    Ok((0..raw.len())
        .map(|i| CorrelateRow {
            step: i + 1,
            n: rows[i + 1].len(),
            raw: raw[i],
            shifted: shifted[i],
            raw_ma: raw_ma[i],
            shifted_ma: shifted_ma[i],
        })
        .collect())
}

fn csv_writer(path: &Path) -> anyhow::Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn correlate(g: &Globals, args: &CorrelateArgs) -> anyhow::Result<()> {
    let dir = args
        .trace
        .clone()
        .or_else(|| g.file.trace.clone())
        .ok_or_else(|| CliError::Usage("--trace is required".into()))?;
    let k = config::k(args.k, &g.file);
    let rows: Vec<ScoreRow> = read_trace(&dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .into_iter()
        .map(|(_, r)| r)
        .collect();
    let out = correlate_rows(&rows, k)?;
    fs::create_dir_all(&g.out)?;
    let mut w = csv_writer(&g.out.join(CORRELATE_CSV))?;
    w.write_record(["step", "n", "hit_ratio_raw", "hit_ratio_shifted", "raw_ma25", "shifted_ma25"])?;
    for r in &out {
        w.write_record([
            r.step.to_string(),
            r.n.to_string(),
            format_float(r.raw),
            format_float(r.shifted),
            format_float(r.raw_ma),
            format_float(r.shifted_ma),
        ])?;
    }
    w.flush()?;
    if let Some(last) = out.last() {
        println!(
            "{} steps; last raw {:.3}, shifted {:.3}",
            out.len(),
            last.raw,
            last.shifted
        );
    }
    Ok(())
}

fn rope(g: &Globals, args: &RopeArgs) -> anyhow::Result<()> {
    let n = pick(args.n, g.file.n, config::DEFAULT_N);
    let k = config::k(args.k, &g.file);
    if n < k.max(3) {
        return Err(CliError::Usage(format!("n = {n} must be at least max(k, 3)")).into());
    }
    let yarn = yarn_inv_freq(&RopeConfig::default())?;
    let standard = yarn_inv_freq(&RopeConfig::standard())?;
    let gy = g_table(&yarn, n)?;
    let gs = g_table(&standard, n)?;
    fs::create_dir_all(&g.out)?;

    let mut w = csv_writer(&g.out.join(G_TABLE_CSV))?;
    w.write_record(["delta", "g_yarn", "g_standard", "g_yarn_normalized", "g_standard_normalized"])?;
    for d in 0..n {
        w.write_record([
            d.to_string(),
            format_float(gy[d]),
            format_float(gs[d]),
            format_float(gy[d] / gy[0]),
            format_float(gs[d] / gs[0]),
        ])?;
    }
    w.flush()?;

    let ranked = |path: &str, set: &PredictionSet| -> anyhow::Result<()> {
        let mut w = csv_writer(&g.out.join(path))?;
        w.write_record(["rank", "offset", "g"])?;
        for (rank, &d) in set.indices().iter().enumerate() {
            w.write_record([rank.to_string(), d.to_string(), format_float(gy[d as usize])])?;
        }
        w.flush()?;
        Ok(())
    };
    ranked(PRIOR_CSV, &static_pre_idx(&yarn, n, k)?)?;
    ranked(PEAKS_CSV, &peak_pre_idx(&yarn, n, k)?)?;
    println!("wrote rope tables for n = {n}, k = {k} to {}", g.out.display());
    Ok(())
}

fn replay(args: &ReplayArgs) -> anyhow::Result<()> {
    let file = File::open(&args.csv).with_context(|| format!("opening {}", args.csv.display()))?;
    let records = read_records(file).with_context(|| format!("parsing {}", args.csv.display()))?;
    print!("{}", replay_report(&records));
    Ok(())
}
