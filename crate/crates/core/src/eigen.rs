//! Bandwidth-regularized spectral core.
//!
//! The trajectory Gram matrix `G = X^T X` is decomposed against the
//! augmented matrix `M = I + alpha R`, where `R = D^T D` is built from a
//! finite-difference stencil `D`. Solving `G v = gamma M v` trades captured
//! energy `v^T G v` against roughness `v^T R v`: for a unit vector the
//! generalized eigenvalue is `gamma = v^T G v / (1 + alpha v^T R v)`, so
//! broadband (rough) directions are pushed down the spectrum while smooth,
//! narrowband ones keep their rank. With `alpha = 0` this is plain PCA of the
//! trajectory matrix, i.e. SSA.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::embedding::TrajectoryMatrix;
use crate::error::{Error, Result};
use crate::linalg;

/// Order of the finite-difference stencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum DiffOrder {
    /// Rows `[-1, 1]`; annihilates constants.
    First,
    /// Rows `[1, -2, 1]`; annihilates affine sequences.
    Second,
}

impl DiffOrder {
    pub fn as_usize(self) -> usize {
        match self {
            DiffOrder::First => 1,
            DiffOrder::Second => 2,
        }
    }

    fn stencil(self) -> &'static [f64] {
        match self {
            DiffOrder::First => &[-1.0, 1.0],
            DiffOrder::Second => &[1.0, -2.0, 1.0],
        }
    }
}

impl TryFrom<u8> for DiffOrder {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(DiffOrder::First),
            2 => Ok(DiffOrder::Second),
            _ => Err(format!("difference order must be 1 or 2, got {v}")),
        }
    }
}

impl From<DiffOrder> for u8 {
    fn from(o: DiffOrder) -> u8 {
        o.as_usize() as u8
    }
}

impl std::fmt::Display for DiffOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.as_usize())
    }
}

/// `(K - order) x K` finite-difference matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceOperator {
    order: DiffOrder,
    matrix: DMatrix<f64>,
}

impl DifferenceOperator {
    pub fn order(&self) -> DiffOrder {
        self.order
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.ncols()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    matrix: DMatrix<f64>,
}

impl GramMatrix {
    /// Wraps a symmetric positive semi-definite matrix.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        check_symmetric(&matrix, "Gram")?;
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// `R = D^T D`, symmetric positive semi-definite.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingMatrix {
    order: DiffOrder,
    matrix: DMatrix<f64>,
}

impl SmoothingMatrix {
    pub fn order(&self) -> DiffOrder {
        self.order
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Roughness `v^T R v`.
    pub fn quadratic(&self, v: &[f64]) -> f64 {
        quad(&self.matrix, v)
    }
}

/// `M = I + alpha R`, symmetric positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedMatrix {
    alpha: f64,
    matrix: DMatrix<f64>,
}

impl AugmentedMatrix {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// One solution of `G v = gamma M v`, with `v` scaled to unit Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub gamma: f64,
    pub vector: Vec<f64>,
    /// Roughness `v^T R v`.
    pub mu: f64,
    /// Captured energy `v^T G v`.
    pub energy: f64,
    /// Shrinkage weight `1 / (1 + alpha mu)`.
    pub shrinkage: f64,
}

/// All `K` generalized eigenpairs, sorted by `gamma` descending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBasis {
    pub alpha: f64,
    pub pairs: Vec<EigenPair>,
}

impl EigenBasis {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn gamma_max(&self) -> f64 {
        self.pairs.first().map_or(0.0, |p| p.gamma)
    }

    /// Number of leading pairs with `gamma > floor * gamma_max`; the rest
    /// are numerically null.
    pub fn significant(&self, floor: f64) -> usize {
        let gmax = self.gamma_max();
        if gmax <= 0.0 {
            return 0;
        }
        self.pairs
            .iter()
            .take_while(|p| p.gamma > floor * gmax)
            .count()
    }

    pub fn gammas(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.gamma).collect()
    }

    /// Largest `|v_i^T M v_j| / (|v_i|_M |v_j|_M)` over distinct pairs.
    pub fn max_m_coherence(&self, m: &AugmentedMatrix) -> f64 {
        let mv: Vec<DVector<f64>> = self
            .pairs
            .iter()
            .map(|p| m.matrix() * DVector::from_column_slice(&p.vector))
            .collect();
        let norms: Vec<f64> = self
            .pairs
            .iter()
            .zip(&mv)
            .map(|(p, w)| dot(&p.vector, w.as_slice()).sqrt())
            .collect();
        let mut worst: f64 = 0.0;
        for i in 0..self.pairs.len() {
            for j in i + 1..self.pairs.len() {
                let c = dot(&self.pairs[i].vector, mv[j].as_slice()).abs() / (norms[i] * norms[j]);
                worst = worst.max(c);
            }
        }
        worst
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn quad(m: &DMatrix<f64>, v: &[f64]) -> f64 {
    let v = DVector::from_column_slice(v);
    v.dot(&(m * &v))
}

fn check_symmetric(m: &DMatrix<f64>, what: &str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "{what} matrix is {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let n = m.nrows();
    for j in 0..n {
        for i in j + 1..n {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-10 * scale {
                return Err(Error::InvalidParameter(format!(
                    "{what} matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}

/// `X^T X`, symmetrized to remove rounding asymmetry.
pub fn gram(x: &TrajectoryMatrix) -> GramMatrix {
    let xm = x.data();
    let g = xm.tr_mul(xm);
    let matrix = (&g + g.transpose()) * 0.5;
    GramMatrix { matrix }
}

pub fn diff_operator(order: DiffOrder, k: usize) -> Result<DifferenceOperator> {
    let w = order.stencil();
    if k < w.len() {
        return Err(Error::InvalidParameter(format!(
            "order-{order} difference operator needs K >= {}, got {k}",
            w.len()
        )));
    }
    let rows = k + 1 - w.len();
    let mut matrix = DMatrix::zeros(rows, k);
    for r in 0..rows {
        for (c, &s) in w.iter().enumerate() {
            matrix[(r, r + c)] = s;
        }
    }
    Ok(DifferenceOperator { order, matrix })
}

pub fn smoothing_matrix(d: &DifferenceOperator) -> SmoothingMatrix {
    SmoothingMatrix {
        order: d.order,
        matrix: d.matrix.tr_mul(&d.matrix),
    }
}

pub fn augmented(r: &SmoothingMatrix, alpha: f64) -> Result<AugmentedMatrix> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be finite and >= 0, got {alpha}"
        )));
    }
    let k = r.dim();
    let mut matrix = DMatrix::identity(k, k);
    if alpha != 0.0 {
        matrix += r.matrix() * alpha;
    }
    Ok(AugmentedMatrix { alpha, matrix })
}

/// Solves `G v = gamma M v` by Cholesky reduction `M = L L^T`.
///
/// The reduced problem `L^-1 G L^-T y = gamma y` is solved with a symmetric
/// eigensolver and mapped back through `v = L^-T y`. Vectors come out
/// M-orthonormal and are rescaled to unit Euclidean norm.
pub fn solve_generalized(
    g: &GramMatrix,
    m: &AugmentedMatrix,
    r: &SmoothingMatrix,
) -> Result<EigenBasis> {
    let k = g.dim();
    if m.dim() != k || r.dim() != k {
        return Err(Error::DimensionMismatch(format!(
            "G is {k}x{k}, M is {0}x{0}, R is {1}x{1}",
            m.dim(),
            r.dim()
        )));
    }
    let l = linalg::cholesky(m.matrix())?;

    // C = L^-1 G L^-T, built as (L^-1 (L^-1 G)^T)^T.
    let mut y = g.matrix().clone();
    linalg::solve_lower_in_place(&l, &mut y);
    let mut c = y.transpose();
    linalg::solve_lower_in_place(&l, &mut c);
    let c = (&c + c.transpose()) * 0.5;

    let (gammas, mut vecs) = linalg::symmetric_eigen(&c)?;
    linalg::solve_upper_transposed_in_place(&l, &mut vecs);

    let mut order: Vec<usize> = (0..k).collect();
    // Stable sort keeps ties in solver order.
    order.sort_by(|&a, &b| gammas[b].total_cmp(&gammas[a]));

    let alpha = m.alpha();
    let pairs = order
        .into_iter()
        .map(|idx| {
            let col = vecs.column(idx);
            let norm = col.norm();
            let vector: Vec<f64> = col.iter().map(|v| v / norm).collect();
            let mu = r.quadratic(&vector).max(0.0);
            EigenPair {
                gamma: gammas[idx],
                energy: quad(g.matrix(), &vector),
                shrinkage: 1.0 / (1.0 + alpha * mu),
                mu,
                vector,
            }
        })
        .collect();
    Ok(EigenBasis { alpha, pairs })
}

/// Convenience: builds `D`, `R`, `M` and solves for the trajectory's basis.
pub fn regularized_basis(
    x: &TrajectoryMatrix,
    alpha: f64,
    order: DiffOrder,
) -> Result<(GramMatrix, SmoothingMatrix, AugmentedMatrix, EigenBasis)> {
    let g = gram(x);
    let r = smoothing_matrix(&diff_operator(order, x.embedding_dim())?);
    let m = augmented(&r, alpha)?;
    let basis = solve_generalized(&g, &m, &r)?;
    Ok((g, r, m, basis))
}

/// `(1/r) sum 1 / (1 + alpha mu_i)^2`: variance of the regularized
/// reconstruction relative to plain PCA. Never exceeds one for `alpha >= 0`.
pub fn variance_ratio(alpha: f64, mus: &[f64]) -> f64 {
    if mus.is_empty() {
        return 1.0;
    }
    mus.iter()
        .map(|mu| 1.0 / (1.0 + alpha * mu).powi(2))
        .sum::<f64>()
        / mus.len() as f64
}
