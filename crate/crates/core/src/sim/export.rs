use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::curve::{CurveResult, CurveRow, TrialRecord};
use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;
pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");

/// JSON written next to every CSV artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub schema_version: u32,
    pub library_version: String,
    pub command: String,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    /// Seconds since the Unix epoch; the only field that differs between
    /// otherwise identical runs.
    pub timestamp: u64,
}

impl Sidecar {
    pub fn new<C: Serialize>(command: &str, seed: Option<u64>, config: &C) -> Result<Self> {
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            library_version: LIBRARY_VERSION.to_string(),
            command: command.to_string(),
            seed,
            config: serde_json::to_value(config)?,
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        })
    }
}

/// `out.csv` → `out.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

pub fn write_sidecar(path: &Path, sidecar: &Sidecar) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, sidecar)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_sidecar(path: &Path) -> Result<Sidecar> {
    Ok(serde_json::from_reader(File::open(path)?)?)
}

fn write_rows<W: Write, T: Serialize>(writer: W, header: &[&str], rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub const CURVE_HEADER: [&str; 8] = [
    "x",
    "array",
    "antenna_count",
    "designer",
    "mean_rate",
    "std_rate",
    "trials",
    "nonconverged",
];

pub const TRIAL_HEADER: [&str; 6] = ["x", "array", "designer", "trial", "rate", "converged"];

/// Curve rows; an empty result still gets the header line.
pub fn write_curve_csv<W: Write>(writer: W, result: &CurveResult) -> Result<()> {
    write_rows(writer, &CURVE_HEADER, &result.rows)
}

pub fn write_trials_csv<W: Write>(writer: W, result: &CurveResult) -> Result<()> {
    write_rows(writer, &TRIAL_HEADER, &result.records)
}

pub fn read_curve_csv<R: Read>(reader: R) -> Result<Vec<CurveRow>> {
    let mut r = csv::Reader::from_reader(reader);
    let rows = r.deserialize().collect::<std::result::Result<Vec<CurveRow>, _>>()?;
    Ok(rows)
}

pub fn read_trials_csv<R: Read>(reader: R) -> Result<Vec<TrialRecord>> {
    let mut r = csv::Reader::from_reader(reader);
    let rows = r.deserialize().collect::<std::result::Result<Vec<TrialRecord>, _>>()?;
    Ok(rows)
}
