//! The decomposition pipeline: eigenvector similarity, greedy clustering and
//! merging, mode reconstruction, and the SSA baseline.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::eigen::{self, DiffOrder, EigenBasis};
use crate::embedding::{
    build_trajectory_matrix, diagonal_average, diagonal_average_outer, select_embedding_dimension,
    TrajectoryMatrix, MIN_SIGNAL_LEN,
};
use crate::error::{Error, Result};
use crate::signals::{dft_magnitudes, dominant_frequency, periodogram, TimeSeries};

/// How two eigenvectors are compared during merging. All measures are
/// insensitive to the sign of either vector.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimilarityMeasure {
    /// `|a . b| / (|a| |b|)`.
    Cosine,
    /// Absolute Pearson correlation.
    Pearson,
    /// `1 / (1 + d)` for the per-coordinate standardized Euclidean distance `d`.
    NormalizedEuclidean,
    /// Cosine similarity of the DFT magnitude sequences. Two phases of the
    /// same oscillation score near one.
    #[default]
    Spectral,
}

impl SimilarityMeasure {
    pub const ALL: [SimilarityMeasure; 4] = [
        SimilarityMeasure::Cosine,
        SimilarityMeasure::Pearson,
        SimilarityMeasure::NormalizedEuclidean,
        SimilarityMeasure::Spectral,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SimilarityMeasure::Cosine => "cosine",
            SimilarityMeasure::Pearson => "pearson",
            SimilarityMeasure::NormalizedEuclidean => "normalized-euclidean",
            SimilarityMeasure::Spectral => "spectral",
        }
    }
}

impl fmt::Display for SimilarityMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SimilarityMeasure {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown similarity measure `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecompositionConfig {
    /// Number of merged modes to extract.
    pub n_modes: usize,
    /// Eigenvectors more similar than this to a cluster seed are merged.
    /// Values above one disable merging.
    pub merge_threshold: f64,
    /// Weight of the roughness penalty.
    pub alpha: f64,
    pub diff_order: DiffOrder,
    pub similarity: SimilarityMeasure,
    /// Embedding dimension; chosen from the spectral peak when absent.
    pub k_override: Option<usize>,
    /// Scale each mode by `1 / (1 + alpha mu)`.
    pub shrinkage: bool,
    /// Eigenvalues at or below `eigen_floor * gamma_max` go to the residual.
    pub eigen_floor: f64,
    pub projection: ModeProjection,
}

/// How a cluster's trajectory is rebuilt from `X`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeProjection {
    /// Orthogonal projection onto the span of all cluster members,
    /// `X Q Q^T`. Both phases of an oscillation are kept.
    #[default]
    Subspace,
    /// Rank-one projection `X v v^T` onto the merged vector alone.
    MergedVector,
}

impl ModeProjection {
    pub fn as_str(self) -> &'static str {
        match self {
            ModeProjection::Subspace => "subspace",
            ModeProjection::MergedVector => "merged-vector",
        }
    }
}

impl FromStr for ModeProjection {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "subspace" => Ok(ModeProjection::Subspace),
            "merged-vector" => Ok(ModeProjection::MergedVector),
            _ => Err(format!("unknown projection `{s}`")),
        }
    }
}

impl Default for DecompositionConfig {
    fn default() -> Self {
        Self {
            n_modes: 3,
            merge_threshold: 0.85,
            alpha: 0.3,
            diff_order: DiffOrder::First,
            similarity: SimilarityMeasure::Spectral,
            k_override: None,
            shrinkage: false,
            eigen_floor: 1e-12,
            projection: ModeProjection::Subspace,
        }
    }
}

impl DecompositionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_modes == 0 {
            return Err(Error::InvalidParameter("n_modes must be >= 1".into()));
        }
        if !(self.merge_threshold > 0.0 && self.merge_threshold <= 1.01) {
            return Err(Error::InvalidParameter(format!(
                "merge threshold must lie in (0, 1.01], got {}",
                self.merge_threshold
            )));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be finite and >= 0, got {}",
                self.alpha
            )));
        }
        if !(self.eigen_floor.is_finite() && self.eigen_floor >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "eigen floor must be finite and >= 0, got {}",
                self.eigen_floor
            )));
        }
        if self.k_override == Some(0) {
            return Err(Error::InvalidParameter(
                "K override must be positive".into(),
            ));
        }
        Ok(())
    }
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn abs_cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return Err(Error::Degenerate(
            "zero-norm vector in cosine similarity".into(),
        ));
    }
    let d: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    Ok((d / (na * nb)).abs().min(1.0))
}

fn standardized_distance(a: &[f64], b: &[f64], scale: Option<&[f64]>, sign: f64) -> f64 {
    let mut s = 0.0;
    for (k, (x, y)) in a.iter().zip(b).enumerate() {
        let sd = scale.map_or(1.0, |sc| sc[k]);
        if sd > 0.0 {
            let d = x - sign * y;
            s += d * d / (sd * sd);
        }
    }
    s.sqrt()
}

/// Similarity of two equal-length vectors; see [`SimilarityMeasure`].
///
/// The normalized Euclidean measure uses unit coordinate scales here; the
/// merging step supplies scales from the whole candidate set via
/// [`similarity_scaled`].
pub fn similarity(a: &[f64], b: &[f64], measure: SimilarityMeasure) -> Result<f64> {
    similarity_scaled(a, b, measure, None)
}

/// Like [`similarity`], with per-coordinate standard deviations for the
/// normalized Euclidean distance. Zero-deviation coordinates are skipped.
pub fn similarity_scaled(
    a: &[f64],
    b: &[f64],
    measure: SimilarityMeasure,
    scale: Option<&[f64]>,
) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "vectors of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    if let Some(sc) = scale {
        if sc.len() != a.len() {
            return Err(Error::DimensionMismatch("scale length".into()));
        }
    }
    match measure {
        SimilarityMeasure::Cosine => abs_cosine(a, b),
        SimilarityMeasure::Pearson => Ok(crate::signals::pearson(a, b)?.abs()),
        SimilarityMeasure::NormalizedEuclidean => {
            let d = standardized_distance(a, b, scale, 1.0)
                .min(standardized_distance(a, b, scale, -1.0));
            Ok(1.0 / (1.0 + d))
        }
        SimilarityMeasure::Spectral => abs_cosine(&dft_magnitudes(a), &dft_magnitudes(b)),
    }
}

/// One merged group of eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    /// Indices into the basis, seed first.
    pub members: Vec<usize>,
    /// Unit-norm eigenvalue-weighted mean of the sign-aligned members.
    pub vector: Vec<f64>,
    pub gamma_sum: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MergeOutcome {
    pub main: Vec<Cluster>,
    /// Basis indices not absorbed into any cluster.
    pub residual: Vec<usize>,
}

/// Greedy clustering in descending eigenvalue order.
///
/// Each unconsumed vector seeds a cluster and absorbs every later
/// unconsumed vector whose similarity to the seed exceeds the threshold.
/// Stops after `n_modes` clusters; numerically null pairs never join.
pub fn cluster_and_merge(basis: &EigenBasis, config: &DecompositionConfig) -> Result<MergeOutcome> {
    if basis.is_empty() {
        return Err(Error::EmptyBasis);
    }
    let live = basis.significant(config.eigen_floor);
    let pairs = &basis.pairs[..live];

    let spectra: Vec<Vec<f64>> = if config.similarity == SimilarityMeasure::Spectral {
        pairs.iter().map(|p| dft_magnitudes(&p.vector)).collect()
    } else {
        Vec::new()
    };
    let scale = if config.similarity == SimilarityMeasure::NormalizedEuclidean {
        Some(coordinate_std(pairs.iter().map(|p| p.vector.as_slice())))
    } else {
        None
    };
    let sim = |i: usize, j: usize| -> Result<f64> {
        match config.similarity {
            SimilarityMeasure::Spectral => abs_cosine(&spectra[i], &spectra[j]),
            m => similarity_scaled(&pairs[i].vector, &pairs[j].vector, m, scale.as_deref()),
        }
    };

    let mut consumed = vec![false; live];
    let mut main = Vec::new();
    for i in 0..live {
        if main.len() >= config.n_modes {
            break;
        }
        if consumed[i] {
            continue;
        }
        consumed[i] = true;
        let mut members = vec![i];
        for (j, used) in consumed.iter_mut().enumerate().take(live).skip(i + 1) {
            if !*used && sim(i, j)? > config.merge_threshold {
                *used = true;
                members.push(j);
            }
        }
        main.push(merge(basis, members));
    }
    let residual = (0..basis.len())
        .filter(|&j| j >= live || !consumed[j])
        .collect();
    Ok(MergeOutcome { main, residual })
}

/// Orthonormal basis of the span of `vectors` (modified Gram-Schmidt with
/// one reorthogonalization pass); dependent directions are dropped.
pub fn orthonormalize<'a>(vectors: impl Iterator<Item = &'a [f64]>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let n0 = norm(v);
        if n0 == 0.0 {
            continue;
        }
        let mut w = v.to_vec();
        for _ in 0..2 {
            for q in &out {
                let d: f64 = w.iter().zip(q).map(|(a, b)| a * b).sum();
                for (a, b) in w.iter_mut().zip(q) {
                    *a -= d * b;
                }
            }
        }
        let n = norm(&w);
        if n > 1e-10 * n0 {
            out.push(w.into_iter().map(|a| a / n).collect());
        }
    }
    out
}

fn coordinate_std<'a>(vectors: impl Iterator<Item = &'a [f64]>) -> Vec<f64> {
    let vs: Vec<&[f64]> = vectors.collect();
    let Some(first) = vs.first() else {
        return Vec::new();
    };
    let k = first.len();
    let n = vs.len() as f64;
    (0..k)
        .map(|c| {
            let mean = vs.iter().map(|v| v[c]).sum::<f64>() / n;
            (vs.iter().map(|v| (v[c] - mean).powi(2)).sum::<f64>() / n).sqrt()
        })
        .collect()
}

fn merge(basis: &EigenBasis, members: Vec<usize>) -> Cluster {
    let seed = &basis.pairs[members[0]].vector;
    let k = seed.len();
    let gamma_sum: f64 = members.iter().map(|&m| basis.pairs[m].gamma).sum();
    let mut acc = vec![0.0; k];
    for &m in &members {
        let p = &basis.pairs[m];
        let d: f64 = p.vector.iter().zip(seed).map(|(a, b)| a * b).sum();
        let w = if d < 0.0 { -p.gamma } else { p.gamma };
        for (a, v) in acc.iter_mut().zip(&p.vector) {
            *a += w * v;
        }
    }
    let n = norm(&acc);
    let vector = if n > 0.0 {
        acc.iter().map(|a| a / n).collect()
    } else {
        seed.clone()
    };
    Cluster {
        members,
        vector,
        gamma_sum,
    }
}

/// Mode series `g * diag_avg(X v v^T)` for a unit vector `v`.
pub fn reconstruct_mode(x: &TrajectoryMatrix, v: &[f64], g: f64) -> Result<Vec<f64>> {
    if v.len() != x.embedding_dim() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for embedding dimension {}",
            v.len(),
            x.embedding_dim()
        )));
    }
    if (norm(v) - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "projection vector must have unit norm, got {}",
            norm(v)
        )));
    }
    if !(g > 0.0 && g <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "shrinkage weight {g} outside (0, 1]"
        )));
    }
    let s = x.data() * DVector::from_column_slice(v);
    Ok(diagonal_average_outer(s.as_slice(), v, g))
}

/// Mode series `g * diag_avg(X Q Q^T)` where `Q` is an orthonormal basis
/// of the span of `vectors`.
pub fn reconstruct_subspace(x: &TrajectoryMatrix, vectors: &[&[f64]], g: f64) -> Result<Vec<f64>> {
    let mut out = vec![0.0; x.n_samples()];
    for q in orthonormalize(vectors.iter().copied()) {
        for (o, v) in out.iter_mut().zip(reconstruct_mode(x, &q, g)?) {
            *o += v;
        }
    }
    Ok(out)
}

/// Per-mode summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeReport {
    /// Sum of member eigenvalues; modes are ordered by this, descending.
    pub gamma_sum: f64,
    /// Roughness of the merged vector.
    pub mu: f64,
    /// `v^T G v` of the merged vector.
    pub energy: f64,
    pub members: Vec<usize>,
    /// Weight applied at reconstruction (1 unless shrinkage is on).
    pub weight: f64,
    /// Dominant frequency of the reconstructed mode, if it has one.
    pub peak_frequency_hz: Option<f64>,
}

/// Reconstructed modes plus the residual; together they sum to the input.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    pub modes: Vec<TimeSeries>,
    pub residual: TimeSeries,
    pub reports: Vec<ModeReport>,
    pub config: DecompositionConfig,
    pub embedding_dim: usize,
    /// Fewer than `n_modes` clusters were available.
    pub incomplete: bool,
    /// `(1/r) sum 1 / (1 + alpha mu_i)^2` over the extracted modes.
    pub variance_ratio: f64,
}

impl ModeSet {
    /// `sum(modes) + residual`.
    pub fn reassemble(&self) -> Vec<f64> {
        let mut out = self.residual.samples().to_vec();
        for m in &self.modes {
            for (o, v) in out.iter_mut().zip(m.samples()) {
                *o += v;
            }
        }
        out
    }
}

fn peak_of(samples: &[f64], fs: f64) -> Result<Option<f64>> {
    let ts = TimeSeries::new(samples.to_vec(), fs)?;
    match dominant_frequency(&periodogram(&ts)) {
        Ok(f) => Ok(Some(f)),
        Err(Error::NoDominantFrequency) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Robust mode decomposition of a series.
pub fn rmd_decompose(x: &TimeSeries, config: &DecompositionConfig) -> Result<ModeSet> {
    config.validate()?;
    if x.len() < MIN_SIGNAL_LEN {
        return Err(Error::SignalTooShort {
            len: x.len(),
            min: MIN_SIGNAL_LEN,
        });
    }
    let k = match config.k_override {
        Some(k) => k,
        None => select_embedding_dimension(x)?,
    };
    let traj = build_trajectory_matrix(x, k)?;
    let (g, r, _m, basis) = eigen::regularized_basis(&traj, config.alpha, config.diff_order)?;
    let merged = cluster_and_merge(&basis, config)?;

    let fs = x.sample_rate();
    let mut built = Vec::with_capacity(merged.main.len());
    let mut remainder = traj.data().clone();
    for c in &merged.main {
        let mu = r.quadratic(&c.vector).max(0.0);
        let weight = if config.shrinkage {
            1.0 / (1.0 + config.alpha * mu)
        } else {
            1.0
        };
        let v = DVector::from_column_slice(&c.vector);
        let directions = match config.projection {
            ModeProjection::Subspace => {
                orthonormalize(c.members.iter().map(|&m| basis.pairs[m].vector.as_slice()))
            }
            ModeProjection::MergedVector => vec![c.vector.clone()],
        };
        let mut samples = vec![0.0; x.len()];
        for q in &directions {
            let qv = DVector::from_column_slice(q);
            let s = traj.data() * &qv;
            remainder -= (&s * weight) * qv.transpose();
            for (a, b) in samples
                .iter_mut()
                .zip(diagonal_average_outer(s.as_slice(), q, weight))
            {
                *a += b;
            }
        }
        let report = ModeReport {
            gamma_sum: c.gamma_sum,
            mu,
            energy: v.dot(&(g.matrix() * &v)),
            members: c.members.clone(),
            weight,
            peak_frequency_hz: peak_of(&samples, fs)?,
        };
        built.push((samples, report));
    }
    // Stable: ties keep cluster order.
    built.sort_by(|a, b| b.1.gamma_sum.total_cmp(&a.1.gamma_sum));

    let residual = diagonal_average(&remainder, x.len())?;
    let variance_ratio = eigen::variance_ratio(
        config.alpha,
        &built.iter().map(|b| b.1.mu).collect::<Vec<_>>(),
    );
    let incomplete = built.len() < config.n_modes;
    let (modes, reports): (Vec<_>, Vec<_>) = built.into_iter().unzip();
    Ok(ModeSet {
        modes: modes
            .into_iter()
            .map(|m| TimeSeries::new(m, fs))
            .collect::<Result<_>>()?,
        residual: TimeSeries::new(residual, fs)?,
        reports,
        config: DecompositionConfig {
            k_override: Some(k),
            ..config.clone()
        },
        embedding_dim: k,
        incomplete,
        variance_ratio,
    })
}

/// Singular spectrum analysis keeping the leading `r` elementary components.
pub fn ssa_decompose(x: &TimeSeries, k: usize, r: usize) -> Result<ModeSet> {
    let groups: Vec<Vec<usize>> = (0..r).map(|i| vec![i]).collect();
    ssa_decompose_grouped(x, k, &groups)
}

/// SSA with explicit grouping: each group of singular-triple indices (in
/// descending singular value order) becomes one component.
pub fn ssa_decompose_grouped(x: &TimeSeries, k: usize, groups: &[Vec<usize>]) -> Result<ModeSet> {
    if groups.is_empty() || groups.iter().any(|g| g.is_empty()) {
        return Err(Error::InvalidParameter(
            "SSA groups must be non-empty".into(),
        ));
    }
    let traj = build_trajectory_matrix(x, k)?;
    let svd = traj.data().clone().svd(true, true);
    let (u, vt) = match (svd.u, svd.v_t) {
        (Some(u), Some(vt)) => (u, vt),
        _ => return Err(Error::NoConvergence { index: 0 }),
    };
    let sv = svd.singular_values;
    let rank = sv.len();
    let mut order: Vec<usize> = (0..rank).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    if let Some(bad) = groups.iter().flatten().find(|&&i| i >= rank) {
        return Err(Error::InvalidParameter(format!(
            "SSA component {bad} exceeds rank {rank}"
        )));
    }

    let r_mat = eigen::smoothing_matrix(&eigen::diff_operator(DiffOrder::First, k)?);
    let fs = x.sample_rate();
    let mut remainder = traj.data().clone();
    let mut modes = Vec::with_capacity(groups.len());
    let mut reports = Vec::with_capacity(groups.len());
    for group in groups {
        let mut z = DMatrix::zeros(traj.rows(), k);
        let mut gamma_sum = 0.0;
        let mut mu = 0.0;
        for &gi in group {
            let idx = order[gi];
            let s = sv[idx];
            let ui = u.column(idx);
            let vi = vt.row(idx).transpose();
            z += (ui * s) * vi.transpose();
            gamma_sum += s * s;
            mu += r_mat.quadratic(vi.as_slice());
        }
        remainder -= &z;
        let samples = diagonal_average(&z, x.len())?;
        reports.push(ModeReport {
            gamma_sum,
            mu: mu / group.len() as f64,
            energy: gamma_sum,
            members: group.clone(),
            weight: 1.0,
            peak_frequency_hz: peak_of(&samples, fs)?,
        });
        modes.push(TimeSeries::new(samples, fs)?);
    }
    let residual = diagonal_average(&remainder, x.len())?;
    Ok(ModeSet {
        modes,
        residual: TimeSeries::new(residual, fs)?,
        reports,
        config: DecompositionConfig {
            n_modes: groups.len(),
            merge_threshold: 1.01,
            alpha: 0.0,
            k_override: Some(k),
            ..DecompositionConfig::default()
        },
        embedding_dim: k,
        incomplete: false,
        variance_ratio: 1.0,
    })
}
