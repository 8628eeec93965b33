//! Series CSV files, sample-rate sidecars and decomposition artifacts.
//!
//! A series file holds one value per line, or two columns `time,value`
//! whose time column must be uniformly spaced (it is otherwise ignored).
//! A single non-numeric header line is allowed. The sample rate comes from
//! the caller or from a sidecar `<stem>.json` holding
//! `{ "sample_rate_hz": <number> }`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modes::{DecompositionConfig, ModeReport, ModeSet};
use crate::signals::{Spectrum, TimeSeries};

pub const MODESET_SCHEMA_VERSION: u32 = 1;

/// Relative tolerance on the spacing of the time column.
const TIME_SPACING_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub sample_rate_hz: f64,
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn read_sidecar(path: &Path) -> Result<Sidecar> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_sidecar(csv: &Path, sample_rate_hz: f64) -> Result<PathBuf> {
    let path = sidecar_path(csv);
    let body = serde_json::to_string_pretty(&Sidecar { sample_rate_hz }).expect("plain struct");
    fs::write(&path, body + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Parses series text; `path` is only used in error messages.
pub fn parse_series(text: &str, path: &Path, sample_rate: f64) -> Result<TimeSeries> {
    let perr = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut values = Vec::new();
    let mut times: Vec<(usize, f64)> = Vec::new();
    let mut columns: Option<usize> = None;
    let mut seen_content = false;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let first_line = !seen_content;
        seen_content = true;
        if first_line && fields[0].parse::<f64>().is_err() {
            // Header.
            continue;
        }
        match (columns, fields.len()) {
            (_, n) if n > 2 => {
                return Err(perr(lineno, format!("expected 1 or 2 columns, found {n}")))
            }
            (None, n) => columns = Some(n),
            (Some(c), n) if c != n => {
                return Err(perr(lineno, format!("expected {c} columns, found {n}")))
            }
            _ => {}
        }
        let parse = |s: &str| -> Result<f64> {
            let v: f64 = s
                .parse()
                .map_err(|_| perr(lineno, format!("`{s}` is not a number")))?;
            if !v.is_finite() {
                return Err(perr(lineno, format!("non-finite value `{s}`")));
            }
            Ok(v)
        };
        if fields.len() == 2 {
            times.push((lineno, parse(fields[0])?));
            values.push(parse(fields[1])?);
        } else {
            values.push(parse(fields[0])?);
        }
    }
    if values.is_empty() {
        return Err(perr(0, "file contains no samples".into()));
    }
    if times.len() >= 3 {
        let dt0 = times[1].1 - times[0].1;
        if dt0 <= 0.0 {
            return Err(perr(times[1].0, "time column is not increasing".into()));
        }
        for w in times.windows(2).skip(1) {
            let dt = w[1].1 - w[0].1;
            if ((dt - dt0) / dt0).abs() > TIME_SPACING_TOL {
                return Err(perr(
                    w[1].0,
                    format!("non-uniform time step {dt} (first step {dt0})"),
                ));
            }
        }
    }
    TimeSeries::new(values, sample_rate).map_err(|e| perr(0, e.to_string()))
}

/// Reads a series; without an explicit rate the sidecar is consulted.
pub fn load_signal_csv(path: &Path, sample_rate_hz: Option<f64>) -> Result<TimeSeries> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let fs_hz = match sample_rate_hz {
        Some(r) => r,
        None => read_sidecar(&sidecar_path(path))?.sample_rate_hz,
    };
    if !(fs_hz.is_finite() && fs_hz > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sample rate must be finite and positive, got {fs_hz}"
        )));
    }
    parse_series(&text, path, fs_hz)
}

/// `time,value` rows with `time = n / fs`.
pub fn series_to_csv(x: &TimeSeries) -> String {
    let mut out = String::with_capacity(x.len() * 24);
    out.push_str("time,value\n");
    let fs = x.sample_rate();
    for (n, v) in x.samples().iter().enumerate() {
        let _ = writeln!(out, "{},{}", n as f64 / fs, v);
    }
    out
}

pub fn write_series_csv(path: &Path, x: &TimeSeries) -> Result<()> {
    fs::write(path, series_to_csv(x)).map_err(|e| Error::io(path, e))
}

pub fn spectrum_to_csv(s: &Spectrum) -> String {
    let mut out = String::from("frequency_hz,power\n");
    for (f, p) in s.frequencies.iter().zip(&s.power) {
        let _ = writeln!(out, "{f},{p}");
    }
    out
}

pub(crate) fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// One mode entry of `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeEntry {
    pub index: usize,
    pub file: String,
    #[serde(flatten)]
    pub report: ModeReport,
}

/// Contents of `report.json` for a decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSetReport {
    pub schema_version: u32,
    pub n_samples: usize,
    pub sample_rate_hz: f64,
    pub embedding_dim: usize,
    pub config: DecompositionConfig,
    pub incomplete: bool,
    pub variance_ratio: f64,
    pub modes: Vec<ModeEntry>,
    pub residual_file: String,
}

pub fn mode_file_name(index: usize) -> String {
    format!("mode_{:02}.csv", index + 1)
}

impl ModeSetReport {
    pub fn from_mode_set(ms: &ModeSet) -> Self {
        Self {
            schema_version: MODESET_SCHEMA_VERSION,
            n_samples: ms.residual.len(),
            sample_rate_hz: ms.residual.sample_rate(),
            embedding_dim: ms.embedding_dim,
            config: ms.config.clone(),
            incomplete: ms.incomplete,
            variance_ratio: ms.variance_ratio,
            modes: ms
                .reports
                .iter()
                .enumerate()
                .map(|(i, r)| ModeEntry {
                    index: i + 1,
                    file: mode_file_name(i),
                    report: r.clone(),
                })
                .collect(),
            residual_file: "residual.csv".into(),
        }
    }
}

/// Writes `report.json`, `mode_NN.csv` per mode and `residual.csv` into `dir`.
pub fn write_mode_set(ms: &ModeSet, dir: &Path) -> Result<Vec<PathBuf>> {
    create_dir(dir)?;
    let mut written = Vec::new();
    for (i, m) in ms.modes.iter().enumerate() {
        let p = dir.join(mode_file_name(i));
        write_series_csv(&p, m)?;
        written.push(p);
    }
    let p = dir.join("residual.csv");
    write_series_csv(&p, &ms.residual)?;
    written.push(p);
    let p = dir.join("report.json");
    let body =
        serde_json::to_string_pretty(&ModeSetReport::from_mode_set(ms)).expect("serializable");
    fs::write(&p, body + "\n").map_err(|e| Error::io(&p, e))?;
    written.push(p);
    Ok(written)
}
