//! Row and trace files.
//!
//! A row file is the 8-byte magic `GVRROW01`, the element count as a
//! little-endian `u32`, then that many little-endian `f32` scores. A trace
//! directory holds `step_00000.row`, `step_00001.row`, ... and a
//! `manifest.jsonl` with one object per step.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::row::{Provenance, ScoreRow};

pub const ROW_MAGIC: &[u8; 8] = b"GVRROW01";
pub const MANIFEST: &str = "manifest.jsonl";
const HEADER: usize = 12;

pub fn encode_row(row: &ScoreRow) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER + 4 * row.len());
    out.extend_from_slice(ROW_MAGIC);
    out.extend_from_slice(&(row.len() as u32).to_le_bytes());
    for x in row.scores() {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

pub fn decode_row(bytes: &[u8]) -> Result<ScoreRow> {
    if bytes.len() < 8 || &bytes[..8] != ROW_MAGIC {
        return Err(Error::BadMagic);
    }
    if bytes.len() < HEADER {
        return Err(Error::Truncated {
            expected: HEADER,
            actual: bytes.len(),
        });
    }
    let n = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
    let payload = &bytes[HEADER..];
    if payload.len() != 4 * n {
        return Err(Error::Truncated {
            expected: 4 * n,
            actual: payload.len(),
        });
    }
    let scores = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
        .collect();
    ScoreRow::new(scores)
}

pub fn write_row(path: &Path, row: &ScoreRow) -> Result<()> {
    fs::write(path, encode_row(row))?;
    Ok(())
}

pub fn read_row(path: &Path) -> Result<ScoreRow> {
    decode_row(&fs::read(path)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub step: usize,
    pub n: usize,
    pub provenance: Provenance,
    pub file: String,
}

pub fn step_file_name(step: usize) -> String {
    format!("step_{step:05}.row")
}

/// Writes every row and the manifest into `dir`, creating it if needed.
/// Step 0 is tagged with the static prior and later steps with the
/// previous-step prediction, matching how traces are simulated.
pub fn write_trace(dir: &Path, rows: &[ScoreRow]) -> Result<Vec<ManifestEntry>> {
    fs::create_dir_all(dir)?;
    let mut entries = Vec::with_capacity(rows.len());
    let mut manifest = BufWriter::new(File::create(dir.join(MANIFEST))?);
    for (step, row) in rows.iter().enumerate() {
        let entry = ManifestEntry {
            step,
            n: row.len(),
            provenance: if step == 0 {
                Provenance::StaticPrior
            } else {
                Provenance::PreviousStep
            },
            file: step_file_name(step),
        };
        write_row(&dir.join(&entry.file), row)?;
        serde_json::to_writer(&mut manifest, &entry)?;
        manifest.write_all(b"\n")?;
        entries.push(entry);
    }
    manifest.flush()?;
    Ok(entries)
}

pub fn read_manifest(dir: &Path) -> Result<Vec<ManifestEntry>> {
    let file = File::open(dir.join(MANIFEST))?;
    let mut entries = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: ManifestEntry = serde_json::from_str(&line)?;
        if entry.step != entries.len() {
            return Err(Error::Format(format!(
                "manifest step {} out of order, expected {}",
                entry.step,
                entries.len()
            )));
        }
        entries.push(entry);
    }
    Ok(entries)
}

/// Rows of a trace directory in step order, checked against the manifest.
pub fn read_trace(dir: &Path) -> Result<Vec<(ManifestEntry, ScoreRow)>> {
    read_manifest(dir)?
        .into_iter()
        .map(|e| {
            let row = read_row(&dir.join(&e.file))?;
            if row.len() != e.n {
                return Err(Error::Format(format!(
                    "{}: manifest says {} scores, file holds {}",
                    e.file,
                    e.n,
                    row.len()
                )));
            }
            let step = e.step as u32;
            Ok((e, row.with_step(step)))
        })
        .collect()
}
