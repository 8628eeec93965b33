//! Sweep execution: signal generation, decomposition and scoring per cell.

use std::time::Instant;

use rayon::prelude::*;
use rmd_core::{
    add_noise_at_snr, dominant_frequency, gen_am_mixture, gen_sinusoid_mixture, periodogram,
    rmd_decompose, score_mode, DiffOrder, Error, ModeSet, Result, TimeSeries,
};

use crate::report::{
    vital_sign_bands, Band, CellResult, ExperimentReport, RecoveredMode, SidebandCheck, TruthScore,
};
use crate::spec::{ExperimentSpec, Generator};

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    /// Run cells on the rayon pool. Results do not depend on this.
    pub parallel: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { parallel: true }
    }
}

/// A noiseless ground-truth component.
#[derive(Debug, Clone)]
struct Truth {
    label: String,
    freq: f64,
    amplitude: f64,
    series: TimeSeries,
    /// Modulation frequency of an AM component.
    f_mod: Option<f64>,
}

fn source(spec: &ExperimentSpec) -> Result<(TimeSeries, Vec<Truth>)> {
    match &spec.generator {
        Generator::SineMixture(g) => {
            let mix = gen_sinusoid_mixture(&g.components, g.sample_rate_hz, g.duration_s)?;
            let truths = g
                .components
                .iter()
                .zip(mix.components)
                .map(|(c, series)| Truth {
                    label: format!("sine {} Hz", c.frequency),
                    freq: c.frequency,
                    amplitude: c.amplitude,
                    series,
                    f_mod: None,
                })
                .collect();
            Ok((mix.mixture, truths))
        }
        Generator::AmMixture(p) => {
            let mix = gen_am_mixture(p)?;
            let mut parts = mix.components.into_iter();
            let mut next = || parts.next().expect("three components");
            let truths = vec![
                Truth {
                    label: format!("am {} Hz", p.f1),
                    freq: p.f1,
                    amplitude: 2.0,
                    series: next(),
                    f_mod: Some(p.f_mod),
                },
                Truth {
                    label: format!("sine {} Hz", p.f2),
                    freq: p.f2,
                    amplitude: 1.0,
                    series: next(),
                    f_mod: None,
                },
                Truth {
                    label: format!("cosine {} Hz", p.f3),
                    freq: p.f3,
                    amplitude: 1.0,
                    series: next(),
                    f_mod: None,
                },
            ];
            Ok((mix.mixture, truths))
        }
        Generator::File(f) => Ok((
            rmd_core::io::load_signal_csv(&f.path, f.sample_rate_hz)?,
            Vec::new(),
        )),
    }
}

/// Assigns truths to candidates by peak distance, visiting truths in
/// descending amplitude (ties keep input order) and taking the nearest free
/// candidate (ties go to the lower index). A candidate is consumed only when
/// it lies within `tol_hz`. Returns `(candidate, matched)` per truth in input
/// order.
pub fn assign_by_peak(
    truths: &[(f64, f64)],
    peaks: &[Option<f64>],
    tol_hz: f64,
) -> Vec<(Option<usize>, bool)> {
    let mut order: Vec<usize> = (0..truths.len()).collect();
    order.sort_by(|&a, &b| truths[b].1.total_cmp(&truths[a].1));
    let mut used = vec![false; peaks.len()];
    let mut out = vec![(None, false); truths.len()];
    for t in order {
        let f = truths[t].0;
        let best = peaks
            .iter()
            .enumerate()
            .filter(|&(i, p)| !used[i] && p.is_some())
            .map(|(i, p)| (i, (p.unwrap() - f).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((i, d)) = best {
            let matched = d <= tol_hz;
            if matched {
                used[i] = true;
            }
            out[t] = (Some(i), matched);
        }
    }
    out
}

fn peak_of(x: &TimeSeries) -> Option<f64> {
    dominant_frequency(&periodogram(x)).ok()
}

fn sidebands(mode: &TimeSeries, f: f64, f_mod: f64, factor: f64) -> SidebandCheck {
    let s = periodogram(mode);
    let res = s.resolution();
    let at = |hz: f64| {
        let i = ((hz / res).round().max(0.0) as usize).min(s.len() - 1);
        s.power[i]
    };
    let mut sorted = s.power.clone();
    sorted.sort_by(f64::total_cmp);
    // Noiseless spectra have a rounding-level median; keep the floor above it.
    let median = sorted[sorted.len() / 2].max(1e-12 * s.total_power());
    let (lower_hz, upper_hz) = (f - f_mod, f + f_mod);
    let (lower_power, upper_power) = (at(lower_hz), at(upper_hz));
    SidebandCheck {
        lower_hz,
        upper_hz,
        lower_power,
        upper_power,
        floor_median: median,
        present: lower_power > factor * median && upper_power > factor * median,
    }
}

struct CellKey {
    snr_db: Option<f64>,
    seed: u64,
    alpha: f64,
    diff_order: DiffOrder,
}

fn completeness_error(ms: &ModeSet, x: &TimeSeries) -> f64 {
    let scale = x.samples().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let err = ms
        .reassemble()
        .iter()
        .zip(x.samples())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if scale > 0.0 {
        err / scale
    } else {
        err
    }
}

fn run_cell(
    spec: &ExperimentSpec,
    clean: &TimeSeries,
    truths: &[Truth],
    bands: &[Band],
    key: &CellKey,
) -> CellResult {
    let start = Instant::now();
    let result = (|| -> Result<CellResult> {
        let x = match key.snr_db {
            Some(snr) => add_noise_at_snr(clean, snr, key.seed)?.noisy,
            None => clean.clone(),
        };
        let ms = rmd_decompose(&x, &spec.config(key.alpha, key.diff_order))?;

        let band_of = |f: Option<f64>| {
            f.and_then(|f| bands.iter().find(|b| b.contains(f)))
                .map(|b| b.name.clone())
        };
        let mut modes: Vec<RecoveredMode> = ms
            .modes
            .iter()
            .zip(&ms.reports)
            .enumerate()
            .map(|(i, (m, r))| {
                let peak = peak_of(m);
                RecoveredMode {
                    index: i + 1,
                    residual: false,
                    peak_frequency_hz: peak,
                    gamma_sum: r.gamma_sum,
                    mu: r.mu,
                    members: r.members.len(),
                    band: band_of(peak),
                }
            })
            .collect();
        let residual_peak = peak_of(&ms.residual);
        modes.push(RecoveredMode {
            index: 0,
            residual: true,
            peak_frequency_hz: residual_peak,
            gamma_sum: 0.0,
            mu: 0.0,
            members: 0,
            band: band_of(residual_peak),
        });

        let mut series: Vec<&TimeSeries> = ms.modes.iter().collect();
        series.push(&ms.residual);
        let mut peaks: Vec<Option<f64>> = modes.iter().map(|m| m.peak_frequency_hz).collect();
        if !spec.match_residual {
            *peaks.last_mut().expect("residual listed") = None;
        }
        let pairs: Vec<(f64, f64)> = truths.iter().map(|t| (t.freq, t.amplitude)).collect();
        let assignment = assign_by_peak(&pairs, &peaks, spec.tolerances.match_hz);
        let scores = truths
            .iter()
            .zip(assignment)
            .map(|(t, (cand, matched))| {
                let mode = cand.map(|i| series[i]);
                let metrics = mode.and_then(|m| score_mode(m, &t.series).ok());
                TruthScore {
                    label: t.label.clone(),
                    true_freq_hz: t.freq,
                    true_amplitude: t.amplitude,
                    matched,
                    candidate: cand,
                    from_residual: cand.is_some_and(|i| modes[i].residual),
                    peak_error_hz: metrics.as_ref().map(|m| m.peak_frequency - t.freq),
                    metrics,
                    sidebands: match (mode, t.f_mod) {
                        (Some(m), Some(f_mod)) => Some(sidebands(
                            m,
                            t.freq,
                            f_mod,
                            spec.tolerances.sideband_floor_factor,
                        )),
                        _ => None,
                    },
                }
            })
            .collect();

        Ok(CellResult {
            snr_db: key.snr_db,
            seed: key.seed,
            alpha: key.alpha,
            diff_order: key.diff_order,
            measure: spec.measure,
            ok: true,
            error: None,
            wall_ms: 0.0,
            embedding_dim: Some(ms.embedding_dim),
            incomplete: Some(ms.incomplete),
            variance_ratio: Some(ms.variance_ratio),
            completeness_error: Some(completeness_error(&ms, &x)),
            modes,
            truths: scores,
        })
    })();
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    match result {
        Ok(mut cell) => {
            cell.wall_ms = wall_ms;
            cell
        }
        Err(e) => {
            let mut cell = CellResult::failed(
                key.snr_db,
                key.seed,
                key.alpha,
                key.diff_order,
                spec.measure,
                e.to_string(),
                wall_ms,
            );
            cell.truths = truths
                .iter()
                .map(|t| TruthScore {
                    label: t.label.clone(),
                    true_freq_hz: t.freq,
                    true_amplitude: t.amplitude,
                    matched: false,
                    candidate: None,
                    from_residual: false,
                    metrics: None,
                    peak_error_hz: None,
                    sidebands: None,
                })
                .collect();
            cell
        }
    }
}

/// Runs every (snr, alpha, order, seed) cell of `spec`. Only an invalid spec
/// or an unreadable input file is an error; per-cell failures are recorded.
pub fn run_experiment_with(spec: &ExperimentSpec, opts: &RunOptions) -> Result<ExperimentReport> {
    spec.validate()?;
    let (clean, truths) = source(spec)?;
    let bands = if spec.generator.is_synthetic() {
        Vec::new()
    } else {
        vital_sign_bands()
    };
    let mut keys = Vec::new();
    for snr_db in spec.snr_levels() {
        for &alpha in &spec.alphas {
            for &diff_order in &spec.diff_orders {
                for seed in spec.seed_list() {
                    keys.push(CellKey {
                        snr_db,
                        seed,
                        alpha,
                        diff_order,
                    });
                }
            }
        }
    }
    let run = |k: &CellKey| run_cell(spec, &clean, &truths, &bands, k);
    let cells: Vec<CellResult> = if opts.parallel {
        keys.par_iter().map(run).collect()
    } else {
        keys.iter().map(run).collect()
    };
    Ok(ExperimentReport::new(spec.clone(), bands, cells))
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    run_experiment_with(spec, &RunOptions::default())
}

fn expect_kind(spec: &ExperimentSpec, kind: &str) -> Result<()> {
    if spec.generator.kind() == kind {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "expected a {kind} generator, got {}",
            spec.generator.kind()
        )))
    }
}

/// Sinusoid mixture under additive noise.
pub fn run_sine_snr_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    expect_kind(spec, "sine-mixture")?;
    run_experiment(spec)
}

/// AM mixture; the modulated component is also checked for sidebands.
pub fn run_nonlinear_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    expect_kind(spec, "am-mixture")?;
    run_experiment(spec)
}

/// Recorded signal; modes are annotated with vital-sign bands.
pub fn run_file_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    expect_kind(spec, "file")?;
    run_experiment(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn greedy_prefers_large_amplitude() {
        // The 4 Hz truth is larger, so it claims the 4.2 Hz peak first.
        let truths = [(4.5, 1.0), (4.0, 3.0)];
        let peaks = [Some(4.2), Some(5.0)];
        let a = assign_by_peak(&truths, &peaks, 2.0);
        assert_eq!(a, vec![(Some(1), true), (Some(0), true)]);
    }

    #[test]
    fn out_of_tolerance_does_not_consume() {
        let truths = [(2.0, 3.0), (19.0, 4.0)];
        let peaks = [Some(19.0), Some(10.0), None];
        let a = assign_by_peak(&truths, &peaks, 2.0);
        assert_eq!(a[1], (Some(0), true));
        assert_eq!(a[0], (Some(1), false));
        assert_eq!(
            assign_by_peak(&truths, &[None, None], 2.0),
            vec![(None, false); 2]
        );
    }

    #[test]
    fn assignment_is_injective() {
        let mut s = 7u64;
        let mut next = || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..500 {
            let truths: Vec<(f64, f64)> = (0..3).map(|_| (next() * 20.0, next())).collect();
            let peaks: Vec<Option<f64>> = (0..4).map(|_| Some(next() * 20.0)).collect();
            let a = assign_by_peak(&truths, &peaks, 5.0);
            let mut taken: Vec<usize> = a.iter().filter(|x| x.1).filter_map(|x| x.0).collect();
            let n = taken.len();
            taken.sort();
            taken.dedup();
            assert_eq!(taken.len(), n);
        }
    }

    #[test]
    fn sidebands_of_am_tone() {
        let p = rmd_core::AmMixtureParams::default();
        let am = &gen_am_mixture(&p).unwrap().components[0];
        let c = sidebands(am, p.f1, p.f_mod, 1.0);
        assert!(c.present);
        assert_eq!((c.lower_hz, c.upper_hz), (2.5, 3.5));
        let tone =
            gen_sinusoid_mixture(&[rmd_core::SineComponent::new(3.0, 2.0, 0.0)], 200.0, 10.0)
                .unwrap()
                .mixture;
        assert!(!sidebands(&tone, 3.0, 0.5, 1.0).present);
    }
}
