//! Report types, aggregation and artifact emission.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rmd_core::{DiffOrder, Error, ModeMetrics, Result, SimilarityMeasure};
use serde::{Deserialize, Serialize};

use crate::spec::ExperimentSpec;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// A frequency band used to annotate recovered modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub name: String,
    pub low_hz: f64,
    pub high_hz: f64,
}

impl Band {
    pub fn contains(&self, f: f64) -> bool {
        (self.low_hz..=self.high_hz).contains(&f)
    }
}

/// Respiration and heartbeat bands for vital-sign recordings.
pub fn vital_sign_bands() -> Vec<Band> {
    vec![
        Band {
            name: "respiration".into(),
            low_hz: 0.1,
            high_hz: 0.5,
        },
        Band {
            name: "heartbeat".into(),
            low_hz: 0.8,
            high_hz: 2.0,
        },
    ]
}

/// One recovered mode of a cell. The residual, when listed, comes last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveredMode {
    /// 1-based mode number; 0 for the residual.
    pub index: usize,
    pub residual: bool,
    pub peak_frequency_hz: Option<f64>,
    pub gamma_sum: f64,
    pub mu: f64,
    pub members: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<String>,
}

/// Power at the AM sidebands of the mode assigned to a modulated truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SidebandCheck {
    pub lower_hz: f64,
    pub upper_hz: f64,
    pub lower_power: f64,
    pub upper_power: f64,
    pub floor_median: f64,
    pub present: bool,
}

/// Outcome for one true component in one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthScore {
    pub label: String,
    pub true_freq_hz: f64,
    pub true_amplitude: f64,
    /// Assigned to a mode peaking within the match tolerance.
    pub matched: bool,
    /// Position in the cell's `modes` of the nearest free candidate.
    pub candidate: Option<usize>,
    pub from_residual: bool,
    /// Scores against the nearest candidate, matched or not.
    pub metrics: Option<ModeMetrics>,
    pub peak_error_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sidebands: Option<SidebandCheck>,
}

/// One (snr, seed, config) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub snr_db: Option<f64>,
    pub seed: u64,
    pub alpha: f64,
    pub diff_order: DiffOrder,
    pub measure: SimilarityMeasure,
    pub ok: bool,
    pub error: Option<String>,
    pub wall_ms: f64,
    pub embedding_dim: Option<usize>,
    pub incomplete: Option<bool>,
    pub variance_ratio: Option<f64>,
    /// `max |sum(modes) + residual - x| / max |x|`.
    pub completeness_error: Option<f64>,
    pub modes: Vec<RecoveredMode>,
    pub truths: Vec<TruthScore>,
}

impl CellResult {
    pub(crate) fn failed(
        snr_db: Option<f64>,
        seed: u64,
        alpha: f64,
        diff_order: DiffOrder,
        measure: SimilarityMeasure,
        error: String,
        wall_ms: f64,
    ) -> Self {
        Self {
            snr_db,
            seed,
            alpha,
            diff_order,
            measure,
            ok: false,
            error: Some(error),
            wall_ms,
            embedding_dim: None,
            incomplete: None,
            variance_ratio: None,
            completeness_error: None,
            modes: Vec::new(),
            truths: Vec::new(),
        }
    }

    /// Recovered modes proper, without the residual.
    pub fn proper_modes(&self) -> impl Iterator<Item = &RecoveredMode> {
        self.modes.iter().filter(|m| !m.residual)
    }

    pub fn truth(&self, freq_hz: f64) -> Option<&TruthScore> {
        self.truths.iter().find(|t| t.true_freq_hz == freq_hz)
    }
}

/// Statistics for one true component under one (snr, config) setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthAggregate {
    pub snr_db: Option<f64>,
    pub alpha: f64,
    pub diff_order: DiffOrder,
    pub measure: SimilarityMeasure,
    pub label: String,
    pub true_freq_hz: f64,
    pub cells: usize,
    pub matched: usize,
    /// Correlation and peak statistics are over matched cells only.
    pub mean_correlation: Option<f64>,
    pub min_correlation: Option<f64>,
    pub mean_abs_peak_error_hz: Option<f64>,
    pub max_abs_peak_error_hz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub name: String,
    pub spec: ExperimentSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bands: Vec<Band>,
    pub cells: Vec<CellResult>,
    pub aggregates: Vec<TruthAggregate>,
}

impl ExperimentReport {
    pub fn new(spec: ExperimentSpec, bands: Vec<Band>, cells: Vec<CellResult>) -> Self {
        let aggregates = aggregate(&cells);
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            name: spec.name.clone(),
            spec,
            bands,
            cells,
            aggregates,
        }
    }

    pub fn failed_cells(&self) -> usize {
        self.cells.iter().filter(|c| !c.ok).count()
    }

    /// Copy with every timing field zeroed, for determinism comparisons.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        for c in &mut r.cells {
            c.wall_ms = 0.0;
        }
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable") + "\n"
    }
}

/// Groups cells by (snr, alpha, order, measure, truth) in first-seen order.
pub fn aggregate(cells: &[CellResult]) -> Vec<TruthAggregate> {
    let mut out: Vec<(TruthAggregate, Vec<f64>, Vec<f64>)> = Vec::new();
    for c in cells {
        for t in &c.truths {
            let key = |a: &TruthAggregate| {
                a.snr_db == c.snr_db
                    && a.alpha == c.alpha
                    && a.diff_order == c.diff_order
                    && a.measure == c.measure
                    && a.true_freq_hz == t.true_freq_hz
                    && a.label == t.label
            };
            let slot = match out.iter().position(|(a, _, _)| key(a)) {
                Some(i) => i,
                None => {
                    out.push((
                        TruthAggregate {
                            snr_db: c.snr_db,
                            alpha: c.alpha,
                            diff_order: c.diff_order,
                            measure: c.measure,
                            label: t.label.clone(),
                            true_freq_hz: t.true_freq_hz,
                            cells: 0,
                            matched: 0,
                            mean_correlation: None,
                            min_correlation: None,
                            mean_abs_peak_error_hz: None,
                            max_abs_peak_error_hz: None,
                        },
                        Vec::new(),
                        Vec::new(),
                    ));
                    out.len() - 1
                }
            };
            let (agg, corr, err) = &mut out[slot];
            agg.cells += 1;
            if t.matched {
                agg.matched += 1;
                if let Some(m) = &t.metrics {
                    corr.push(m.correlation);
                }
                if let Some(e) = t.peak_error_hz {
                    err.push(e.abs());
                }
            }
        }
    }
    out.into_iter()
        .map(|(mut agg, corr, err)| {
            agg.mean_correlation = mean(&corr);
            agg.min_correlation = corr.iter().copied().reduce(f64::min);
            agg.mean_abs_peak_error_hz = mean(&err);
            agg.max_abs_peak_error_hz = err.iter().copied().reduce(f64::max);
            agg
        })
        .collect()
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub const SUMMARY_HEADER: &str =
    "snr_db,seed,alpha,diff_order,measure,true_freq_hz,matched,peak_freq_hz,correlation,rmse,wall_ms";

/// One row per cell and true component; cells without truths (file runs,
/// failures) get a single row with the truth columns empty.
pub fn summary_csv(report: &ExperimentReport) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for c in &report.cells {
        let prefix = format!(
            "{},{},{},{},{}",
            opt(c.snr_db),
            c.seed,
            c.alpha,
            c.diff_order,
            c.measure
        );
        if c.truths.is_empty() {
            let _ = writeln!(out, "{prefix},,,,,,{}", c.wall_ms);
            continue;
        }
        for t in &c.truths {
            let m = t.metrics.as_ref();
            let _ = writeln!(
                out,
                "{prefix},{},{},{},{},{},{}",
                t.true_freq_hz,
                t.matched,
                opt(m.map(|m| m.peak_frequency)),
                opt(m.map(|m| m.correlation)),
                opt(m.map(|m| m.rmse)),
                c.wall_ms
            );
        }
    }
    out
}

/// Per mode slot (`mode_01.csv`, ..., `residual.csv`): one row per cell.
pub fn mode_csvs(report: &ExperimentReport) -> Vec<(String, String)> {
    let slots = report
        .cells
        .iter()
        .map(|c| c.proper_modes().count())
        .max()
        .unwrap_or(0);
    let header = "snr_db,seed,alpha,diff_order,measure,peak_freq_hz,gamma_sum,mu,members,band\n";
    let row = |out: &mut String, c: &CellResult, m: &RecoveredMode| {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            opt(c.snr_db),
            c.seed,
            c.alpha,
            c.diff_order,
            c.measure,
            opt(m.peak_frequency_hz),
            m.gamma_sum,
            m.mu,
            m.members,
            m.band.as_deref().unwrap_or("")
        );
    };
    let mut files = Vec::new();
    for slot in 1..=slots {
        let mut out = String::from(header);
        for c in &report.cells {
            if let Some(m) = c.modes.iter().find(|m| !m.residual && m.index == slot) {
                row(&mut out, c, m);
            }
        }
        files.push((rmd_core::io::mode_file_name(slot - 1), out));
    }
    let mut out = String::from(header);
    for c in &report.cells {
        if let Some(m) = c.modes.iter().find(|m| m.residual) {
            row(&mut out, c, m);
        }
    }
    files.push(("residual.csv".into(), out));
    files
}

/// Writes `report.json`, `summary.csv` and the per-mode CSVs into `dir`.
pub fn write_report(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let put = |name: &str, body: &str| -> Result<PathBuf> {
        let p = dir.join(name);
        fs::write(&p, body).map_err(|source| Error::Io {
            path: p.clone(),
            source,
        })?;
        Ok(p)
    };
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = vec![
        put("report.json", &report.to_json())?,
        put("summary.csv", &summary_csv(report))?,
    ];
    for (name, body) in mode_csvs(report) {
        written.push(put(&name, &body)?);
    }
    Ok(written)
}

pub fn read_report(path: &Path) -> Result<ExperimentReport> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}
