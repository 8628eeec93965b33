//! Delay embedding of a series into a Hankel trajectory matrix and back.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::signals::{dominant_frequency, periodogram, TimeSeries};

/// Shortest series the embedding heuristic accepts.
pub const MIN_SIGNAL_LEN: usize = 12;
/// Smallest embedding dimension the heuristic returns.
pub const MIN_EMBEDDING_DIM: usize = 4;

/// `L x K` Hankel matrix whose row `i` is the window `x[i..i + K]` (delay 1).
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMatrix {
    data: DMatrix<f64>,
    n_samples: usize,
}

impl TrajectoryMatrix {
    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    /// Number of windows, `L = N - K + 1`.
    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn embedding_dim(&self) -> usize {
        self.data.ncols()
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn delay(&self) -> usize {
        1
    }

    #[cfg(test)]
    pub(crate) fn from_raw(data: DMatrix<f64>) -> Self {
        let n_samples = data.nrows() + data.ncols() - 1;
        Self { data, n_samples }
    }
}

/// Embedding dimension from the dominant spectral peak: `round(1.2 Fs / f_max)`.
///
/// Falls back to `N / 3` when there is no peak or the peak sits below
/// `1e-3 Fs`; the result is clamped to `[4, N / 3]`.
pub fn select_embedding_dimension(x: &TimeSeries) -> Result<usize> {
    let n = x.len();
    if n < MIN_SIGNAL_LEN {
        return Err(Error::SignalTooShort {
            len: n,
            min: MIN_SIGNAL_LEN,
        });
    }
    let upper = n / 3;
    let fs = x.sample_rate();
    let raw = match dominant_frequency(&periodogram(x)) {
        Ok(f) if f / fs >= 1e-3 => (1.2 * fs / f).round() as usize,
        Ok(_) | Err(Error::NoDominantFrequency) => upper,
        Err(e) => return Err(e),
    };
    Ok(raw.clamp(MIN_EMBEDDING_DIM, upper))
}

pub fn build_trajectory_matrix(x: &TimeSeries, k: usize) -> Result<TrajectoryMatrix> {
    let n = x.len();
    if k < 2 || k + 1 > n {
        return Err(Error::InvalidParameter(format!(
            "embedding dimension {k} outside [2, {}]",
            n - 1
        )));
    }
    let l = n - k + 1;
    let s = x.samples();
    Ok(TrajectoryMatrix {
        data: DMatrix::from_fn(l, k, |i, j| s[i + j]),
        n_samples: n,
    })
}

/// Number of entries on anti-diagonal `d` of an `l x k` matrix.
fn antidiagonal_len(d: usize, l: usize, k: usize) -> usize {
    let lo = l.min(k);
    let n = l + k - 1;
    (d + 1).min(lo).min(n - d)
}

/// Hankelization: sample `d` is the mean of all entries `(i, j)` with `i + j = d`.
pub fn diagonal_average(m: &DMatrix<f64>, n_samples: usize) -> Result<Vec<f64>> {
    let (l, k) = m.shape();
    if l == 0 || k == 0 || l + k - 1 != n_samples {
        return Err(Error::DimensionMismatch(format!(
            "{l}x{k} matrix cannot be averaged into {n_samples} samples"
        )));
    }
    let mut out = vec![0.0; n_samples];
    for j in 0..k {
        let col = m.column(j);
        for (i, v) in col.iter().enumerate() {
            out[i + j] += v;
        }
    }
    for (d, v) in out.iter_mut().enumerate() {
        *v /= antidiagonal_len(d, l, k) as f64;
    }
    Ok(out)
}

/// Diagonal average of the rank-one matrix `scale * s v^T` without forming it.
pub(crate) fn diagonal_average_outer(s: &[f64], v: &[f64], scale: f64) -> Vec<f64> {
    let (l, k) = (s.len(), v.len());
    let n = l + k - 1;
    let mut out = vec![0.0; n];
    for (j, &vj) in v.iter().enumerate() {
        let w = scale * vj;
        for (o, &si) in out[j..j + l].iter_mut().zip(s) {
            *o += si * w;
        }
    }
    for (d, o) in out.iter_mut().enumerate() {
        *o /= antidiagonal_len(d, l, k) as f64;
    }
    out
}
