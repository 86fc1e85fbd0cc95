//! Per-selection CSV records.
//!
//! One row per selection with a fixed column order. Floats are written with
//! nine significant digits in the shortest of fixed or exponent notation;
//! fields that do not apply to an algorithm are left empty.

use std::io::{Read, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gvr::DoneKind;
use crate::row::Provenance;

pub const COLUMNS: [&str; 15] = [
    "row_id",
    "n",
    "k",
    "provenance",
    "algorithm",
    "secant_iters",
    "snap_iters",
    "candidate_count",
    "done_kind",
    "full_row_scans",
    "candidate_scans",
    "bytes_read",
    "hit_ratio_raw",
    "hit_ratio_shifted",
    "exact_match",
];

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub row_id: u64,
    pub n: usize,
    pub k: usize,
    pub provenance: Provenance,
    pub algorithm: String,
    pub secant_iters: Option<u32>,
    pub snap_iters: Option<u32>,
    pub candidate_count: Option<usize>,
    pub done_kind: Option<DoneKind>,
    pub full_row_scans: usize,
    pub candidate_scans: usize,
    pub bytes_read: u64,
    pub hit_ratio_raw: Option<f64>,
    pub hit_ratio_shifted: Option<f64>,
    pub exact_match: bool,
}

/// `%.9g`-style formatting.
pub fn format_float(x: f64) -> String {
    format_sig(x, 9)
}

pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let p = digits.max(1);
    let sci = format!("{:.*e}", p - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl BenchRecord {
    pub fn to_fields(&self) -> [String; 15] {
        [
            self.row_id.to_string(),
            self.n.to_string(),
            self.k.to_string(),
            self.provenance.to_string(),
            self.algorithm.clone(),
            opt(self.secant_iters),
            opt(self.snap_iters),
            opt(self.candidate_count),
            opt(self.done_kind),
            self.full_row_scans.to_string(),
            self.candidate_scans.to_string(),
            self.bytes_read.to_string(),
            self.hit_ratio_raw.map(format_float).unwrap_or_default(),
            self.hit_ratio_shifted.map(format_float).unwrap_or_default(),
            self.exact_match.to_string(),
        ]
    }

    pub fn from_fields(rec: &csv::StringRecord) -> Result<Self> {
        if rec.len() != COLUMNS.len() {
            return Err(Error::Format(format!(
                "expected {} fields, found {}",
                COLUMNS.len(),
                rec.len()
            )));
        }
        let f = |i: usize| rec.get(i).expect("length checked");
        Ok(Self {
            row_id: parse(f(0), COLUMNS[0])?,
            n: parse(f(1), COLUMNS[1])?,
            k: parse(f(2), COLUMNS[2])?,
            provenance: parse(f(3), COLUMNS[3])?,
            algorithm: f(4).to_string(),
            secant_iters: parse_opt(f(5), COLUMNS[5])?,
            snap_iters: parse_opt(f(6), COLUMNS[6])?,
            candidate_count: parse_opt(f(7), COLUMNS[7])?,
            done_kind: parse_opt(f(8), COLUMNS[8])?,
            full_row_scans: parse(f(9), COLUMNS[9])?,
            candidate_scans: parse(f(10), COLUMNS[10])?,
            bytes_read: parse(f(11), COLUMNS[11])?,
            hit_ratio_raw: parse_opt(f(12), COLUMNS[12])?,
            hit_ratio_shifted: parse_opt(f(13), COLUMNS[13])?,
            exact_match: parse(f(14), COLUMNS[14])?,
        })
    }
}

fn parse<T: FromStr>(s: &str, column: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Format(format!("bad value `{s}` in column {column}")))
}

fn parse_opt<T: FromStr>(s: &str, column: &str) -> Result<Option<T>> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse(s, column).map(Some)
    }
}

pub fn write_records<W: Write>(out: W, records: &[BenchRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in records {
        w.write_record(r.to_fields())?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a CSV with exactly the expected header.
pub fn read_records<R: Read>(input: R) -> Result<Vec<BenchRecord>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(COLUMNS.iter().copied()) {
        return Err(Error::Format(format!(
            "unexpected header `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    r.records()
        .map(|rec| BenchRecord::from_fields(&rec?))
        .collect()
}
