//! Markdown reports built from bench CSV records.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use gvr_core::gvr::DoneKind;
use gvr_core::metrics::{speedup_proxy, BenchRecord, IterationHistogram, TrafficReport};
use gvr_core::Provenance;

#[derive(Clone, Debug, PartialEq)]
pub struct ProxyRow {
    pub n: usize,
    pub algorithm: String,
    pub provenance: Provenance,
    pub rows: usize,
    pub mean_full_row_scans: f64,
    pub mean_candidate_scans: f64,
    pub mean_bytes: f64,
    pub mean_secant_iters: Option<f64>,
    /// Baseline bytes over this group's bytes on the same rows.
    pub proxy: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProxyTable {
    pub baseline: Option<String>,
    pub rows: Vec<ProxyRow>,
}

impl ProxyTable {
    pub fn get(&self, n: usize, algorithm: &str, provenance: Provenance) -> Option<&ProxyRow> {
        self.rows
            .iter()
            .find(|r| r.n == n && r.algorithm == algorithm && r.provenance == provenance)
    }
}

/// `radix` when present, otherwise `oracle`.
pub fn baseline_name(records: &[BenchRecord]) -> Option<&'static str> {
    ["radix", "oracle"]
        .into_iter()
        .find(|b| records.iter().any(|r| r.algorithm == *b))
}

pub fn proxy_table(records: &[BenchRecord]) -> ProxyTable {
    let baseline = baseline_name(records);
    let base_bytes: BTreeMap<(usize, u64), u64> = records
        .iter()
        .filter(|r| Some(r.algorithm.as_str()) == baseline)
        .map(|r| ((r.n, r.row_id), r.bytes_read))
        .collect();

    let mut groups: BTreeMap<(usize, &str, Provenance), Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.n, r.algorithm.as_str(), r.provenance))
            .or_default()
            .push(r);
    }

    let rows = groups
        .into_iter()
        .map(|((n, algorithm, provenance), rs)| {
            let count = rs.len() as f64;
            let bytes: u64 = rs.iter().map(|r| r.bytes_read).sum();
            let base: Option<u64> = rs
                .iter()
                .map(|r| base_bytes.get(&(r.n, r.row_id)).copied())
                .sum();
            let proxy = base.and_then(|b| {
                let own = TrafficReport {
                    bytes_read: bytes,
                    ..TrafficReport::default()
                };
                let reference = TrafficReport {
                    bytes_read: b,
                    ..TrafficReport::default()
                };
                speedup_proxy(&own, &reference).ok()
            });
            let iters: Vec<u32> = rs.iter().filter_map(|r| r.secant_iters).collect();
            ProxyRow {
                n,
                algorithm: algorithm.to_string(),
                provenance,
                rows: rs.len(),
                mean_full_row_scans: rs.iter().map(|r| r.full_row_scans as f64).sum::<f64>() / count,
                mean_candidate_scans: rs.iter().map(|r| r.candidate_scans as f64).sum::<f64>()
                    / count,
                mean_bytes: bytes as f64 / count,
                mean_secant_iters: (!iters.is_empty())
                    .then(|| iters.iter().map(|&i| i as f64).sum::<f64>() / iters.len() as f64),
                proxy,
            }
        })
        .collect();

    ProxyTable {
        baseline: baseline.map(str::to_string),
        rows,
    }
}

/// GVR records grouped by provenance.
pub fn histograms(records: &[BenchRecord]) -> BTreeMap<Provenance, IterationHistogram> {
    let mut out: BTreeMap<Provenance, IterationHistogram> = BTreeMap::new();
    for r in records {
        if let (Some(i), Some(done)) = (r.secant_iters, r.done_kind) {
            out.entry(r.provenance)
                .or_default()
                .add(i, r.snap_iters.unwrap_or(0), done);
        }
    }
    out
}

fn overall(hists: &BTreeMap<Provenance, IterationHistogram>) -> IterationHistogram {
    let mut all = IterationHistogram::default();
    for h in hists.values() {
        for (v, c, _) in h.secant.table() {
            for _ in 0..c {
                all.secant.add(v);
            }
        }
        for (v, c, _) in h.snap.table() {
            for _ in 0..c {
                all.snap.add(v);
            }
        }
        for (&kind, &c) in &h.done_kinds {
            *all.done_kinds.entry(kind).or_default() += c;
        }
    }
    all
}

fn pct(x: f64) -> String {
    format!("{:.1}%", 100.0 * x)
}

fn opt_num(x: Option<f64>, digits: usize) -> String {
    x.map(|v| format!("{v:.digits$}")).unwrap_or_else(|| "-".into())
}

fn cdf_table(
    out: &mut String,
    title: &str,
    symbol: &str,
    columns: &[(String, &IterationHistogram)],
    pick: fn(&IterationHistogram) -> &gvr_core::metrics::Distribution,
) {
    let values: BTreeSet<u32> = columns
        .iter()
        .flat_map(|(_, h)| pick(h).table().into_iter().map(|(v, _, _)| v))
        .collect();
    let _ = writeln!(out, "## {title}\n");
    let _ = write!(out, "| {symbol} |");
    for (name, _) in columns {
        let _ = write!(out, " {name} |");
    }
    let _ = write!(out, "\n|---|");
    for _ in columns {
        let _ = write!(out, "---|");
    }
    out.push('\n');
    for v in values {
        let _ = write!(out, "| ≤ {v} |");
        for (_, h) in columns {
            let _ = write!(out, " {} |", pct(pick(h).cdf(v)));
        }
        out.push('\n');
    }
    out.push('\n');
}

fn done_table(out: &mut String, columns: &[(String, &IterationHistogram)]) {
    let _ = writeln!(out, "## Exit paths\n");
    let _ = write!(out, "| provenance | rows |");
    for kind in DoneKind::ALL {
        let _ = write!(out, " {kind} |");
    }
    let _ = write!(out, "\n|---|---|");
    for _ in DoneKind::ALL {
        let _ = write!(out, "---|");
    }
    out.push('\n');
    for (name, h) in columns {
        let _ = write!(out, "| {name} | {} |", h.total());
        for kind in DoneKind::ALL {
            let c = h.done_kinds.get(&kind).copied().unwrap_or(0);
            let _ = write!(out, " {c} ({}) |", pct(h.done_fraction(kind)));
        }
        out.push('\n');
    }
    out.push('\n');
}

fn iteration_sections(out: &mut String, records: &[BenchRecord], with_overall: bool) {
    let hists = histograms(records);
    if hists.is_empty() {
        let _ = writeln!(out, "No GVR selections in the input.\n");
        return;
    }
    let all = overall(&hists);
    let mut columns: Vec<(String, &IterationHistogram)> = Vec::new();
    if with_overall {
        columns.push(("all".into(), &all));
    }
    columns.extend(hists.iter().map(|(p, h)| (p.to_string(), h)));
    cdf_table(out, "Secant iterations (I), cumulative", "I", &columns, |h| &h.secant);
    cdf_table(out, "Snap iterations (S), cumulative", "S", &columns, |h| &h.snap);
    done_table(out, &columns);
}

pub fn bench_summary(records: &[BenchRecord]) -> String {
    let mut out = String::from("# Bench summary\n\n");
    let exact = records.iter().filter(|r| r.exact_match).count();
    let rows: BTreeSet<(usize, u64)> = records.iter().map(|r| (r.n, r.row_id)).collect();
    let _ = writeln!(
        out,
        "{} selections over {} score rows; {exact} of {} match the oracle.\n",
        records.len(),
        rows.len(),
        records.len()
    );

    let table = proxy_table(records);
    let _ = writeln!(out, "## Traffic proxy\n");
    match &table.baseline {
        Some(b) => {
            let _ = writeln!(
                out,
                "Proxy is `{b}` bytes read divided by the selector's bytes read, summed over the rows of each n. \
                 Bytes follow the 4-bytes-per-element pass model.\n"
            );
        }
        None => {
            let _ = writeln!(out, "No baseline selector in the run; proxies are omitted.\n");
        }
    }
    out.push_str(
        "| n | algorithm | provenance | rows | full-row scans | candidate scans | mean bytes | mean I | proxy |\n\
         |---|---|---|---|---|---|---|---|---|\n",
    );
    for r in &table.rows {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {:.2} | {:.2} | {:.0} | {} | {} |",
            r.n,
            r.algorithm,
            r.provenance,
            r.rows,
            r.mean_full_row_scans,
            r.mean_candidate_scans,
            r.mean_bytes,
            opt_num(r.mean_secant_iters, 2),
            opt_num(r.proxy, 3),
        );
    }
    out.push('\n');
    iteration_sections(&mut out, records, false);
    out
}

pub fn replay_report(records: &[BenchRecord]) -> String {
    let mut out = String::from("# Replay statistics\n\n");
    let hists = histograms(records);
    let gvr_rows: usize = hists.values().map(IterationHistogram::total).sum();
    let _ = writeln!(out, "{} records, {gvr_rows} with GVR phase statistics.\n", records.len());
    iteration_sections(&mut out, records, true);
    if hists.is_empty() {
        return out;
    }

    let _ = writeln!(out, "## By provenance\n");
    out.push_str(
        "| provenance | rows | mean I | median I | max I | I ≤ 1 | mean S | median S | fallback-sort |\n\
         |---|---|---|---|---|---|---|---|---|\n",
    );
    let all = overall(&hists);
    let rows = std::iter::once(("all".to_string(), &all))
        .chain(hists.iter().map(|(p, h)| (p.to_string(), h)));
    for (name, h) in rows {
        let _ = writeln!(
            out,
            "| {name} | {} | {} | {} | {} | {} | {} | {} | {} |",
            h.total(),
            opt_num(h.secant.mean(), 2),
            h.secant.median().map(|v| v.to_string()).unwrap_or_default(),
            h.secant.max().map(|v| v.to_string()).unwrap_or_default(),
            pct(h.secant.cdf(1)),
            opt_num(h.snap.mean(), 2),
            h.snap.median().map(|v| v.to_string()).unwrap_or_default(),
            pct(h.done_fraction(DoneKind::FallbackSort)),
        );
    }
    out.push('\n');
    out
}
