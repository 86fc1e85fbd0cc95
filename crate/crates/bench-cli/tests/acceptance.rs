//! Acceptance criteria. Each test prints one `AC<n> PASS|FAIL` line with the
//! measured values before asserting.

use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use gvr_bench::bench::{run_bench, BenchConfig};
use gvr_bench::report::proxy_table;
use gvr_core::baselines::{radix_select, value_multiset_eq, RadixParams};
use gvr_core::gvr::{gvr_select, DoneKind, GvrParams};
use gvr_core::metrics::{ablation_run, traffic_bytes, Distribution, BYTES_PER_ELEMENT};
use gvr_core::rope::{
    anchor_to_query, g_delta, g_table, peak_pre_idx, prior_overlap, yarn_inv_freq, RopeConfig,
};
use gvr_core::synth::{random_prediction, GaussianStream, ScoreSynth, SynthConfig};
use gvr_core::{PredictionSet, Provenance, ScoreRow, SelectorStats};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const K: usize = 2048;
const C: usize = 6144;
const N_SYNTH: usize = 70690;

fn report(id: &str, title: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("{id} {verdict} {title}: {detail}");
}

/// Values sorted descending; the k-th largest is `sorted_desc(..)[k - 1]`.
fn sorted_desc(xs: &[f32]) -> Vec<f32> {
    let mut v = xs.to_vec();
    v.sort_unstable_by(|a, b| b.total_cmp(a));
    v
}

fn brute_topk_values(xs: &[f32], k: usize) -> Vec<f32> {
    sorted_desc(xs)[..k].to_vec()
}

#[derive(Clone, Copy, Debug)]
enum Dist {
    Uniform,
    Normal,
    LogNormal,
    Ties90,
    AllEqual,
}

const DISTS: [Dist; 5] = [
    Dist::Uniform,
    Dist::Normal,
    Dist::LogNormal,
    Dist::Ties90,
    Dist::AllEqual,
];

fn draw_row(dist: Dist, n: usize, seed: u64) -> Vec<f32> {
    let mut g = GaussianStream::new(seed);
    match dist {
        Dist::Uniform => (0..n).map(|_| g.uniform() as f32).collect(),
        Dist::Normal => (0..n).map(|_| g.next_gaussian() as f32).collect(),
        Dist::LogNormal => (0..n).map(|_| g.next_gaussian().exp() as f32).collect(),
        // The tie value sits in the middle of the spread, so the k-th
        // largest lands inside the tie block.
        Dist::Ties90 => (0..n)
            .map(|_| {
                if g.uniform() < 0.9 {
                    0.5
                } else {
                    g.uniform() as f32
                }
            })
            .collect(),
        Dist::AllEqual => vec![1.25; n],
    }
}

/// Top-k positions of a lightly perturbed copy of the row.
fn previous_step_prediction(xs: &[f32], k: usize, seed: u64) -> PredictionSet {
    let mut g = GaussianStream::new(seed ^ 0x9e37_79b9);
    let spread = {
        let s = sorted_desc(xs);
        (s[0] - s[s.len() - 1]).max(1e-3)
    };
    let mut pairs: Vec<(f32, u32)> = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| (x + 0.05 * spread * g.next_gaussian() as f32, i as u32))
        .collect();
    pairs.sort_unstable_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut idx: Vec<u32> = pairs[..k].iter().map(|p| p.1).collect();
    idx.sort_unstable();
    PredictionSet::new(idx, Provenance::PreviousStep)
}

#[test]
fn ac1_exactness_suite() {
    const NS: [usize; 4] = [2048, 8192, 32768, 131072];
    const ROWS: usize = 10_000;
    let per_cell = ROWS / (NS.len() * DISTS.len() * Provenance::ALL.len());
    let gvr = GvrParams::default();
    let radix = RadixParams::default();
    let priors: Vec<PredictionSet> = {
        let freqs = yarn_inv_freq(&RopeConfig::default()).unwrap();
        NS.iter()
            .map(|&n| {
                let offsets = gvr_core::rope::static_pre_idx(&freqs, n, K).unwrap();
                anchor_to_query(&offsets, n - 1)
            })
            .collect()
    };

    let start = Instant::now();
    let mut rows = 0usize;
    let mut failures = Vec::new();
    let mut done = std::collections::BTreeMap::<DoneKind, usize>::new();
    for (ni, &n) in NS.iter().enumerate() {
        for (di, &dist) in DISTS.iter().enumerate() {
            for (pi, &prov) in Provenance::ALL.iter().enumerate() {
                for rep in 0..per_cell {
                    let seed = ((ni * 8 + di) * 8 + pi) as u64 * 1_000_003 + rep as u64;
                    let xs = draw_row(dist, n, seed);
                    let expected = brute_topk_values(&xs, K);
                    let pred = match prov {
                        Provenance::None => None,
                        Provenance::Random => {
                            let mut rng = ChaCha8Rng::seed_from_u64(seed);
                            Some(random_prediction(&mut rng, n, K).unwrap())
                        }
                        Provenance::PreviousStep => Some(previous_step_prediction(&xs, K, seed)),
                        Provenance::StaticPrior => Some(priors[ni].clone()),
                    };
                    let row = ScoreRow::new(xs).unwrap();
                    let g = gvr_select(&row, pred.as_ref(), &gvr).unwrap();
                    if let SelectorStats::Gvr(s) = g.stats {
                        *done.entry(s.done_kind).or_default() += 1;
                    }
                    let r = radix_select(&row, K, &radix).unwrap();
                    let rv: Vec<f32> = r.selected.iter().map(|s| s.value).collect();
                    if g.len() != K || !value_multiset_eq(&g.values, &expected) {
                        failures.push(format!("gvr n={n} {dist:?} {prov} rep={rep}"));
                    }
                    if rv.len() != K || !value_multiset_eq(&rv, &expected) {
                        failures.push(format!("radix n={n} {dist:?} {prov} rep={rep}"));
                    }
                    rows += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = rows == ROWS && failures.is_empty() && secs < 120.0;
    report(
        "AC1",
        "exactness suite",
        pass,
        &format!(
            "{rows} rows, {} mismatches, {secs:.1} s (limit 120 s), exit paths {done:?}",
            failures.len()
        ),
    );
    assert_eq!(rows, ROWS);
    assert!(failures.is_empty(), "first mismatches: {:?}", &failures[..failures.len().min(5)]);
    assert!(secs < 120.0, "took {secs:.1} s");
}

#[test]
fn ac2_threshold_lemma() {
    const PAIRS: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0usize;
    let mut violations = 0usize;
    let mut attempts = 0usize;
    while checked < PAIRS {
        attempts += 1;
        assert!(attempts < 10 * PAIRS, "could not build enough (row, T) pairs");
        let n = [8192usize, 16384, 32768][rng.gen_range(0..3)];
        let dist = DISTS[rng.gen_range(0..3)];
        let xs = draw_row(dist, n, rng.gen());
        let sorted = sorted_desc(&xs);
        let r = rng.gen_range(K..=C);
        // Any real threshold between the r-th and (r+1)-th largest values.
        let (hi, lo) = (sorted[r - 1], sorted[r]);
        let t = lo + (hi - lo) * rng.gen::<f32>();
        let f = xs.iter().filter(|&&x| x >= t).count();
        if !(K..=C).contains(&f) {
            continue;
        }
        checked += 1;
        if sorted[..K].iter().any(|&v| v < t) {
            violations += 1;
        }
    }
    let pass = violations == 0;
    report(
        "AC2",
        "top-k values lie above any T with k <= f(T) <= C",
        pass,
        &format!("{checked} pairs, {violations} violations"),
    );
    assert_eq!(violations, 0);
}

#[test]
fn ac3_ledger_pass_counts() {
    const ROWS: u64 = 40;
    let synth = Arc::new(ScoreSynth::new(&RopeConfig::default(), N_SYNTH).unwrap());
    let gvr = GvrParams::default();
    let radix = RadixParams::default();
    let schedule_cap = 2 * radix.digit_schedule.len() + 1;
    let prior = synth.static_prior(N_SYNTH, K).unwrap();

    let mut converged = 0usize;
    let mut gvr_bad = Vec::new();
    let mut radix_scans = Distribution::default();
    let mut radix_bad = Vec::new();
    for seed in 0..ROWS {
        let row = synth.generate(seed, N_SYNTH, 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let random = random_prediction(&mut rng, N_SYNTH, K).unwrap();
        for pred in [None, Some(&prior), Some(&random)] {
            let out = gvr_select(&row, pred, &gvr).unwrap();
            let s = *out.stats.gvr().unwrap();
            if s.done_kind != DoneKind::Converged {
                continue;
            }
            converged += 1;
            let t = traffic_bytes(&out.ledger);
            let i = s.secant_iters as u64;
            let m = K as u64;
            let formula = (i + 1) * N_SYNTH as u64 * BYTES_PER_ELEMENT
                + m * BYTES_PER_ELEMENT
                + t.candidate_bytes;
            if out.ledger.full_row_scans() != s.secant_iters as usize + 1 || t.bytes_read != formula {
                gvr_bad.push((seed, s.secant_iters, out.ledger.full_row_scans()));
            }
        }
        let r = radix_select(&row, K, &radix).unwrap();
        let scans = r.ledger.full_row_scans();
        radix_scans.add(scans as u32);
        if scans > schedule_cap || !(3..=7).contains(&scans) {
            radix_bad.push((seed, scans));
        }
    }
    let pass = converged > 0 && gvr_bad.is_empty() && radix_bad.is_empty();
    report(
        "AC3",
        "ledger pass counts",
        pass,
        &format!(
            "{converged} converged gvr runs, {} with scans != I+1; radix scans {:?} (band [3, 7], cap {schedule_cap})",
            gvr_bad.len(),
            radix_scans.table().iter().map(|(v, c, _)| (*v, *c)).collect::<Vec<_>>()
        ),
    );
    assert!(converged > 0);
    assert!(gvr_bad.is_empty(), "{gvr_bad:?}");
    assert!(radix_bad.is_empty(), "{radix_bad:?}");
}

#[test]
fn ac4_secant_iteration_band() {
    const ROWS: u64 = 100;
    let synth = ScoreSynth::new(&RopeConfig::default(), N_SYNTH).unwrap();
    let prior = synth.static_prior(N_SYNTH, K).unwrap();
    let gvr = GvrParams::default();
    let mut iters = Distribution::default();
    for seed in 0..ROWS {
        let row = synth.generate(seed, N_SYNTH, 0.1).unwrap();
        let out = gvr_select(&row, Some(&prior), &gvr).unwrap();
        iters.add(out.stats.gvr().unwrap().secant_iters);
    }
    let median = iters.median().unwrap();
    let pass = (1..=5).contains(&median);
    report(
        "AC4",
        "median secant iterations in [1, 5] (reported band 2-4)",
        pass,
        &format!(
            "median {median}, mean {:.2}, distribution {:?}",
            iters.mean().unwrap(),
            iters.table().iter().map(|(v, c, _)| (*v, *c)).collect::<Vec<_>>()
        ),
    );
    assert!(pass, "median {median}");
}

#[test]
fn ac5_ablation_ordering() {
    let cfg = SynthConfig {
        n0: 68665,
        steps: 256,
        k: K,
        amplitude: 0.1,
        seed: 7,
        rope: RopeConfig::default(),
    };
    let rows = ablation_run(&cfg, &Provenance::ALL, &GvrParams::default(), &RadixParams::default())
        .unwrap();
    let get = |p| rows.iter().find(|r| r.provenance == p).unwrap();
    let radix = get(Provenance::None);
    let random = get(Provenance::Random);
    let prev = get(Provenance::PreviousStep);
    let scans_ok = prev.mean_full_row_scans <= random.mean_full_row_scans
        && random.mean_full_row_scans <= radix.mean_full_row_scans;
    let alpha_ok = prev.mean_alpha.unwrap() > random.mean_alpha.unwrap();
    let detail = rows
        .iter()
        .map(|r| {
            format!(
                "{} scans {:.2} alpha {} I {}",
                r.provenance,
                r.mean_full_row_scans,
                r.mean_alpha.map_or("-".into(), |a| format!("{a:.3}")),
                r.mean_secant_iters.map_or("-".into(), |i| format!("{i:.2}")),
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    report(
        "AC5",
        "scans previous-step <= random <= radix, alpha previous-step > random",
        scans_ok && alpha_ok,
        &detail,
    );
    assert!(alpha_ok, "{detail}");
    assert!(scans_ok, "{detail}");
}

#[test]
fn ac6_prior_dominance() {
    const ROWS: u64 = 100;
    let synth = ScoreSynth::new(&RopeConfig::default(), N_SYNTH).unwrap();
    let prior = synth.static_prior(N_SYNTH, K).unwrap();
    let peaks = anchor_to_query(&peak_pre_idx(synth.freqs(), N_SYNTH, K).unwrap(), N_SYNTH - 1);
    let mut wins = 0usize;
    let (mut sum_prior, mut sum_peak) = (0.0, 0.0);
    for seed in 0..ROWS {
        let row = synth.generate(1000 + seed, N_SYNTH, 0.1).unwrap();
        let mut truth: Vec<u32> = gvr_core::baselines::oracle_topk(&row, K)
            .unwrap()
            .iter()
            .map(|s| s.index)
            .collect();
        truth.sort_unstable();
        let a = prior_overlap(&prior, &truth).unwrap();
        let b = prior_overlap(&peaks, &truth).unwrap();
        sum_prior += a;
        sum_peak += b;
        if a > b {
            wins += 1;
        }
    }
    let pass = wins * 100 >= 95 * ROWS as usize;
    report(
        "AC6",
        "static prior beats peak prior on >= 95% of rows",
        pass,
        &format!(
            "{wins}/{ROWS} rows, mean overlap {:.3} vs {:.3}",
            sum_prior / ROWS as f64,
            sum_peak / ROWS as f64
        ),
    );
    assert!(pass);
}

#[test]
fn ac7_rope_math() {
    let yarn = yarn_inv_freq(&RopeConfig::default()).unwrap();
    let standard = yarn_inv_freq(&RopeConfig::standard()).unwrap();
    let g0 = g_delta(&yarn, 0);
    let g0_ok = g0 == 64.0 && g_delta(&standard, 0) == 64.0;

    let far_peak = |f| {
        (10_000u64..=58_600)
            .map(|d| g_delta(f, d) / g_delta(f, 0))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let (py, ps) = (far_peak(&yarn), far_peak(&standard));
    let far_ok = py > ps;

    let synth = ScoreSynth::new(&RopeConfig::default(), N_SYNTH).unwrap();
    let row = synth.generate(11, N_SYNTH, 0.0).unwrap();
    let table = g_table(&yarn, N_SYNTH).unwrap();
    let off = row
        .scores()
        .iter()
        .enumerate()
        .filter(|&(j, &x)| x != table[N_SYNTH - 1 - j] as f32)
        .count();
    let am0_ok = off == 0;

    let pass = g0_ok && far_ok && am0_ok;
    report(
        "AC7",
        "rope math",
        pass,
        &format!(
            "g(0) = {g0}; far-range normalized peak yarn {py:.4} vs standard {ps:.4}; \
             {off} of {N_SYNTH} offsets differ from f32(g) at Am = 0"
        ),
    );
    assert!(g0_ok);
    assert!(far_ok);
    assert!(am0_ok);
}

fn bench_once(dir: &Path, config: &Path) -> (std::process::ExitStatus, Vec<u8>, Vec<u8>) {
    let status = Command::new(env!("CARGO_BIN_EXE_gvr-bench"))
        .args(["--seed", "17", "--config"])
        .arg(config)
        .arg("--out")
        .arg(dir)
        .args(["bench", "--rows-per-n", "2"])
        .status()
        .unwrap();
    (
        status,
        std::fs::read(dir.join("bench.csv")).unwrap_or_default(),
        std::fs::read(dir.join("summary.md")).unwrap_or_default(),
    )
}

#[test]
fn ac8_bench_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("bench.toml");
    std::fs::write(
        &config,
        "n-values = [8192, 32768]\nk = 1024\nprovenances = [\"none\", \"random\", \"previous-step\", \"static-prior\"]\n",
    )
    .unwrap();
    let (s1, csv1, md1) = bench_once(&tmp.path().join("a"), &config);
    let (s2, csv2, md2) = bench_once(&tmp.path().join("b"), &config);
    let pass = s1.success() && s2.success() && !csv1.is_empty() && csv1 == csv2 && md1 == md2;
    report(
        "AC8",
        "bench output is byte-identical across runs",
        pass,
        &format!(
            "exit {:?}/{:?}, csv {} bytes, identical csv {}, identical summary {}",
            s1.code(),
            s2.code(),
            csv1.len(),
            csv1 == csv2,
            md1 == md2
        ),
    );
    assert!(pass);
}

#[test]
fn ac9_traffic_proxy_trend() {
    const NS: [usize; 3] = [32768, 65536, 131072];
    let cfg = BenchConfig {
        seed: 9,
        n_values: NS.to_vec(),
        rows_per_n: 8,
        algorithms: vec!["gvr".into(), "radix".into()],
        provenances: vec![Provenance::PreviousStep, Provenance::StaticPrior],
        ..BenchConfig::default()
    };
    let records = run_bench(&cfg).unwrap();
    assert!(records.iter().all(|r| r.exact_match));
    let table = proxy_table(&records);
    let proxies = |p| -> Vec<f64> {
        NS.iter()
            .map(|&n| table.get(n, "gvr", p).unwrap().proxy.unwrap())
            .collect()
    };
    let stat = proxies(Provenance::StaticPrior);
    let prev = proxies(Provenance::PreviousStep);
    let increasing = stat.windows(2).all(|w| w[1] > w[0]);
    let above_one = stat[NS.len() - 1] > 1.0;
    let fmt = |v: &[f64]| {
        NS.iter()
            .zip(v)
            .map(|(n, p)| format!("{n}: {p:.3}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    report(
        "AC9",
        "static-prior proxy over radix > 1 at 131072 and increasing in n",
        increasing && above_one,
        &format!("static-prior {}; previous-step {}", fmt(&stat), fmt(&prev)),
    );
    assert!(above_one, "static-prior proxies {stat:?}");
    assert!(increasing, "static-prior proxies {stat:?}");
}
