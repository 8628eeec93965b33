//! Robust mode decomposition (RMD) of univariate time series.
//!
//! A series is embedded into a Hankel trajectory matrix, the trajectory
//! Gram matrix is decomposed against a difference-operator penalty that
//! favors narrowband eigenvectors, similar eigenvectors are merged, and
//! each merged direction is projected back to a mode by diagonal averaging.
//! With zero regularization the pipeline reduces to singular spectrum
//! analysis.

pub mod eigen;
pub mod embedding;
pub mod error;
pub mod io;
pub mod linalg;
pub mod modes;
pub mod signals;

pub use eigen::{
    augmented, diff_operator, gram, smoothing_matrix, solve_generalized, variance_ratio,
    AugmentedMatrix, DiffOrder, DifferenceOperator, EigenBasis, EigenPair, GramMatrix,
    SmoothingMatrix,
};
pub use embedding::{
    build_trajectory_matrix, diagonal_average, select_embedding_dimension, TrajectoryMatrix,
};
pub use error::{Error, Result};
pub use modes::{
    cluster_and_merge, orthonormalize, reconstruct_mode, reconstruct_subspace, rmd_decompose,
    similarity, ssa_decompose, ssa_decompose_grouped, Cluster, DecompositionConfig, MergeOutcome,
    ModeProjection, ModeReport, ModeSet, SimilarityMeasure,
};
pub use signals::{
    add_noise_at_snr, dominant_frequency, gen_am_mixture, gen_sinusoid_mixture, periodogram,
    score_mode, three_tone_components, AmMixtureParams, Mixture, ModeMetrics, Noisy, SineComponent,
    Spectrum, TimeSeries,
};
