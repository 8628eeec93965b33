//! Experiment specifications, as read from JSON.

use std::path::{Path, PathBuf};

use rmd_core::{
    AmMixtureParams, DecompositionConfig, DiffOrder, Error, ModeProjection, Result,
    SimilarityMeasure, SineComponent,
};
use serde::{Deserialize, Serialize};

/// Embedding dimension used for the synthetic sweeps.
pub const DEFAULT_K: usize = 200;

/// Where the signal of every cell comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Generator {
    SineMixture(SineMixtureSpec),
    AmMixture(AmMixtureParams),
    File(FileSpec),
}

impl Generator {
    pub fn is_synthetic(&self) -> bool {
        !matches!(self, Generator::File(_))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Generator::SineMixture(_) => "sine-mixture",
            Generator::AmMixture(_) => "am-mixture",
            Generator::File(_) => "file",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SineMixtureSpec {
    pub components: Vec<SineComponent>,
    pub sample_rate_hz: f64,
    pub duration_s: f64,
}

impl Default for SineMixtureSpec {
    fn default() -> Self {
        Self {
            components: rmd_core::three_tone_components(),
            sample_rate_hz: 200.0,
            duration_s: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileSpec {
    pub path: PathBuf,
    /// Falls back to the sidecar next to `path`.
    #[serde(default)]
    pub sample_rate_hz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// A truth counts as matched only if the assigned mode peaks within this
    /// many Hz of it.
    pub match_hz: f64,
    /// AM sidebands must exceed this multiple of the median spectral power.
    pub sideband_floor_factor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            match_hz: 2.0,
            sideband_floor_factor: 1.0,
        }
    }
}

fn default_orders() -> Vec<DiffOrder> {
    vec![DiffOrder::First]
}

fn default_k() -> Option<usize> {
    Some(DEFAULT_K)
}

fn default_n_modes() -> usize {
    3
}

fn default_theta() -> f64 {
    0.85
}

fn default_true() -> bool {
    true
}

/// A sweep over SNR levels, seeds and decomposition settings.
///
/// `snr_db` entries of `null` mean no noise is added.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub name: String,
    pub generator: Generator,
    #[serde(default)]
    pub snr_db: Vec<Option<f64>>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    pub alphas: Vec<f64>,
    #[serde(default = "default_orders")]
    pub diff_orders: Vec<DiffOrder>,
    #[serde(default)]
    pub measure: SimilarityMeasure,
    /// `null` selects K per signal with the spectral heuristic.
    #[serde(default = "default_k")]
    pub k_override: Option<usize>,
    #[serde(default = "default_n_modes")]
    pub n_modes: usize,
    #[serde(default = "default_theta")]
    pub merge_threshold: f64,
    #[serde(default)]
    pub projection: ModeProjection,
    #[serde(default)]
    pub shrinkage: bool,
    /// Whether the residual may be assigned to a truth, standing in for the
    /// noise-like extra mode of a four-mode decomposition.
    #[serde(default = "default_true")]
    pub match_residual: bool,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Reads a spec; relative file-generator paths resolve against the
    /// spec's own directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut spec = Self::from_json(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        if let Generator::File(f) = &mut spec.generator {
            if f.path.is_relative() {
                if let Some(dir) = path.parent() {
                    f.path = dir.join(&f.path);
                }
            }
        }
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.generator.is_synthetic() {
            if self.seeds.is_empty() {
                return bad("seed list is empty".into());
            }
            if self.snr_db.is_empty() {
                return bad("snr_db list is empty".into());
            }
        }
        if self.alphas.is_empty() {
            return bad("alpha list is empty".into());
        }
        if self.diff_orders.is_empty() {
            return bad("diff_orders list is empty".into());
        }
        if let Some(s) = self.snr_db.iter().flatten().find(|s| !s.is_finite()) {
            return bad(format!("snr_db {s} is not finite"));
        }
        if !(self.tolerances.match_hz.is_finite() && self.tolerances.match_hz >= 0.0) {
            return bad(format!(
                "match_hz must be >= 0, got {}",
                self.tolerances.match_hz
            ));
        }
        if !(self.tolerances.sideband_floor_factor.is_finite()
            && self.tolerances.sideband_floor_factor >= 0.0)
        {
            return bad("sideband_floor_factor must be >= 0".into());
        }
        for &alpha in &self.alphas {
            self.config(alpha, self.diff_orders[0]).validate()?;
        }
        match &self.generator {
            Generator::SineMixture(s) if s.components.is_empty() => {
                bad("sine-mixture has no components".into())
            }
            _ => Ok(()),
        }
    }

    pub fn config(&self, alpha: f64, diff_order: DiffOrder) -> DecompositionConfig {
        DecompositionConfig {
            n_modes: self.n_modes,
            merge_threshold: self.merge_threshold,
            alpha,
            diff_order,
            similarity: self.measure,
            k_override: self.k_override,
            shrinkage: self.shrinkage,
            projection: self.projection,
            ..DecompositionConfig::default()
        }
    }

    /// SNR levels actually swept; file runs without a list use the raw signal.
    pub(crate) fn snr_levels(&self) -> Vec<Option<f64>> {
        if self.snr_db.is_empty() {
            vec![None]
        } else {
            self.snr_db.clone()
        }
    }

    pub(crate) fn seed_list(&self) -> Vec<u64> {
        if self.seeds.is_empty() {
            vec![0]
        } else {
            self.seeds.clone()
        }
    }
}
