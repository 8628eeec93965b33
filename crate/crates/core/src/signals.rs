//! Signal containers, synthetic test signals, noise injection, spectra and scoring.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniformly sampled real signal.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    samples: Vec<f64>,
    sample_rate: f64,
}

impl TimeSeries {
    pub fn new(samples: Vec<f64>, sample_rate: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidSignal(format!(
                "need at least 2 samples, got {}",
                samples.len()
            )));
        }
        validate_rate(sample_rate)?;
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSignal(format!(
                "sample {i} is not finite ({})",
                samples[i]
            )));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false; a valid series has at least two samples.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    /// Mean squared sample value.
    pub fn power(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum::<f64>() / self.samples.len() as f64
    }

    /// Series with the same rate and new samples.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self> {
        Self::new(samples, self.sample_rate)
    }
}

fn validate_rate(sample_rate: f64) -> Result<()> {
    if !(sample_rate.is_finite() && sample_rate > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sample rate must be finite and positive, got {sample_rate}"
        )));
    }
    Ok(())
}

fn sample_count(sample_rate: f64, duration: f64) -> Result<usize> {
    validate_rate(sample_rate)?;
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "duration must be finite and positive, got {duration}"
        )));
    }
    let n = (duration * sample_rate).round();
    if n < 2.0 {
        return Err(Error::InvalidParameter(format!(
            "duration x sample rate = {} yields fewer than 2 samples",
            duration * sample_rate
        )));
    }
    Ok(n as usize)
}

/// One sinusoid `amplitude * sin(2 pi frequency t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SineComponent {
    pub frequency: f64,
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
}

impl SineComponent {
    pub fn new(frequency: f64, amplitude: f64, phase: f64) -> Self {
        Self {
            frequency,
            amplitude,
            phase,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.frequency.is_finite() && self.frequency >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "component frequency must be >= 0, got {}",
                self.frequency
            )));
        }
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "component amplitude must be >= 0, got {}",
                self.amplitude
            )));
        }
        if !self.phase.is_finite() {
            return Err(Error::InvalidParameter(
                "component phase is not finite".into(),
            ));
        }
        Ok(())
    }
}

/// The three-tone test mixture: 2 Hz, 5 Hz and 19 Hz with amplitudes 3, 0.5 and 4.
pub fn three_tone_components() -> Vec<SineComponent> {
    vec![
        SineComponent::new(2.0, 3.0, 0.0),
        SineComponent::new(5.0, 0.5, 0.0),
        SineComponent::new(19.0, 4.0, 0.0),
    ]
}

/// A synthetic mixture together with its noiseless constituents.
#[derive(Debug, Clone)]
pub struct Mixture {
    pub mixture: TimeSeries,
    pub components: Vec<TimeSeries>,
}

/// Sum of sinusoids sampled at `n / sample_rate`.
///
/// The returned components are in input order and add up to the mixture exactly.
pub fn gen_sinusoid_mixture(
    components: &[SineComponent],
    sample_rate: f64,
    duration: f64,
) -> Result<Mixture> {
    if components.is_empty() {
        return Err(Error::InvalidParameter("component list is empty".into()));
    }
    let n = sample_count(sample_rate, duration)?;
    let mut parts = Vec::with_capacity(components.len());
    for c in components {
        c.validate()?;
        let s: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 / sample_rate;
                c.amplitude * (2.0 * PI * c.frequency * t + c.phase).sin()
            })
            .collect();
        parts.push(s);
    }
    assemble(parts, sample_rate)
}

fn assemble(parts: Vec<Vec<f64>>, sample_rate: f64) -> Result<Mixture> {
    let n = parts[0].len();
    let mut sum = vec![0.0; n];
    for p in &parts {
        for (acc, v) in sum.iter_mut().zip(p) {
            *acc += v;
        }
    }
    let components = parts
        .into_iter()
        .map(|p| TimeSeries::new(p, sample_rate))
        .collect::<Result<Vec<_>>>()?;
    Ok(Mixture {
        mixture: TimeSeries::new(sum, sample_rate)?,
        components,
    })
}

/// Parameters of the amplitude-modulated test mixture
/// `2 sin(2 pi f1 t) [1 + 0.5 sin(2 pi f_mod t)] + sin(2 pi f2 t) + cos(2 pi f3 t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AmMixtureParams {
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub f_mod: f64,
    pub sample_rate: f64,
    pub duration: f64,
}

impl Default for AmMixtureParams {
    fn default() -> Self {
        Self {
            f1: 3.0,
            f2: 8.0,
            f3: 31.0,
            f_mod: 0.5,
            sample_rate: 200.0,
            duration: 10.0,
        }
    }
}

/// Ground truth is `[am_component, sine_f2, cosine_f3]`.
pub fn gen_am_mixture(p: &AmMixtureParams) -> Result<Mixture> {
    let n = sample_count(p.sample_rate, p.duration)?;
    for (name, f) in [("f1", p.f1), ("f2", p.f2), ("f3", p.f3), ("f_mod", p.f_mod)] {
        if !(f.is_finite() && f >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "{name} must be finite and >= 0, got {f}"
            )));
        }
    }
    let t = |i: usize| i as f64 / p.sample_rate;
    let am = (0..n)
        .map(|i| {
            let t = t(i);
            2.0 * (2.0 * PI * p.f1 * t).sin() * (1.0 + 0.5 * (2.0 * PI * p.f_mod * t).sin())
        })
        .collect();
    let sine = (0..n).map(|i| (2.0 * PI * p.f2 * t(i)).sin()).collect();
    let cosine = (0..n).map(|i| (2.0 * PI * p.f3 * t(i)).cos()).collect();
    assemble(vec![am, sine, cosine], p.sample_rate)
}

/// Noisy signal and the noise realization that was added.
#[derive(Debug, Clone)]
pub struct Noisy {
    pub noisy: TimeSeries,
    pub noise: TimeSeries,
}

/// Adds white Gaussian noise with variance `P_signal / 10^(snr_db / 10)`.
///
/// Noise is drawn from `ChaCha8Rng::seed_from_u64(seed)` through
/// `rand_distr::StandardNormal`, so a seed reproduces the same realization.
pub fn add_noise_at_snr(x: &TimeSeries, snr_db: f64, seed: u64) -> Result<Noisy> {
    if !snr_db.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "snr_db must be finite, got {snr_db}"
        )));
    }
    let p = x.power();
    if p == 0.0 {
        return Err(Error::ZeroPower);
    }
    let sigma = (p / 10f64.powf(snr_db / 10.0)).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<f64> = (0..x.len())
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            sigma * z
        })
        .collect();
    let noisy = x.samples.iter().zip(&noise).map(|(a, b)| a + b).collect();
    Ok(Noisy {
        noisy: x.with_samples(noisy)?,
        noise: x.with_samples(noise)?,
    })
}

/// One-sided power spectrum.
///
/// `power[k]` is the mean-square contribution of bin `k`: `|X_k|^2 / N^2`,
/// doubled for every bin strictly between DC and Nyquist. With this
/// convention the bins sum to the mean squared sample value.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub frequencies: Vec<f64>,
    pub power: Vec<f64>,
    /// Number of samples the spectrum was computed from.
    pub n_samples: usize,
    /// Whether interior bins carry the doubled one-sided power.
    pub one_sided_doubled: bool,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.power.len()
    }

    pub fn is_empty(&self) -> bool {
        self.power.is_empty()
    }

    pub fn total_power(&self) -> f64 {
        self.power.iter().sum()
    }

    pub fn resolution(&self) -> f64 {
        if self.frequencies.len() > 1 {
            self.frequencies[1] - self.frequencies[0]
        } else {
            0.0
        }
    }
}

pub(crate) fn fft_plan(n: usize) -> Arc<dyn Fft<f64>> {
    FftPlanner::new().plan_fft_forward(n)
}

/// Magnitudes `|X_k|` of the full-length DFT of a real vector.
pub(crate) fn dft_magnitudes(x: &[f64]) -> Vec<f64> {
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft_plan(x.len()).process(&mut buf);
    buf.iter().map(|c| c.norm()).collect()
}

/// Plain periodogram (no window, no zero padding) on the one-sided grid.
pub fn periodogram(x: &TimeSeries) -> Spectrum {
    let n = x.len();
    let mut buf: Vec<Complex<f64>> = x.samples.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft_plan(n).process(&mut buf);
    let bins = n / 2 + 1;
    let scale = 1.0 / (n as f64 * n as f64);
    let df = x.sample_rate / n as f64;
    let mut frequencies = Vec::with_capacity(bins);
    let mut power = Vec::with_capacity(bins);
    for (k, c) in buf.iter().take(bins).enumerate() {
        let nyquist = n.is_multiple_of(2) && k == n / 2;
        let mult = if k == 0 || nyquist { 1.0 } else { 2.0 };
        frequencies.push(k as f64 * df);
        power.push(mult * c.norm_sqr() * scale);
    }
    Spectrum {
        frequencies,
        power,
        n_samples: n,
        one_sided_doubled: true,
    }
}

/// Bins at or below this fraction of the total power count as empty.
const NEGLIGIBLE_POWER: f64 = 1e-20;

/// Frequency of the strongest non-DC bin; ties go to the lower frequency.
pub fn dominant_frequency(s: &Spectrum) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::InvalidParameter("empty spectrum".into()));
    }
    let floor = NEGLIGIBLE_POWER * s.total_power();
    let mut best: Option<(usize, f64)> = None;
    for (k, &p) in s.power.iter().enumerate().skip(1) {
        if p > floor && best.is_none_or(|(_, bp)| p > bp) {
            best = Some((k, p));
        }
    }
    best.map(|(k, _)| s.frequencies[k])
        .ok_or(Error::NoDominantFrequency)
}

/// Quality of a recovered mode against a known component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeMetrics {
    pub peak_frequency: f64,
    pub correlation: f64,
    pub rmse: f64,
}

/// Pearson correlation of two equal-length sequences.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::Degenerate(
            "zero-variance input to correlation".into(),
        ));
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// Scores a candidate mode after aligning its sign to the truth.
pub fn score_mode(candidate: &TimeSeries, truth: &TimeSeries) -> Result<ModeMetrics> {
    if candidate.len() != truth.len() {
        return Err(Error::DimensionMismatch(format!(
            "candidate has {} samples, truth has {}",
            candidate.len(),
            truth.len()
        )));
    }
    if candidate.sample_rate != truth.sample_rate {
        return Err(Error::DimensionMismatch(format!(
            "sample rates {} and {} differ",
            candidate.sample_rate, truth.sample_rate
        )));
    }
    let r = pearson(&candidate.samples, &truth.samples)?;
    let sign = if r < 0.0 { -1.0 } else { 1.0 };
    let mse = candidate
        .samples
        .iter()
        .zip(&truth.samples)
        .map(|(c, t)| (sign * c - t).powi(2))
        .sum::<f64>()
        / truth.len() as f64;
    Ok(ModeMetrics {
        peak_frequency: dominant_frequency(&periodogram(candidate))?,
        correlation: r.abs(),
        rmse: mse.sqrt(),
    })
}
