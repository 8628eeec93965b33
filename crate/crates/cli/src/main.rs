//! `rmd`: decompose signal files, synthesize test signals, run experiment
//! sweeps and inspect spectra.
//!
//! Exit codes: 0 success, 2 bad arguments or parameters, 3 I/O or parse
//! failure, 4 numerical failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rmd_bench::{run_experiment_with, write_report, ExperimentReport, ExperimentSpec, RunOptions};
use rmd_core::io::{
    load_signal_csv, spectrum_to_csv, write_mode_set, write_series_csv, write_sidecar,
};
use rmd_core::{
    add_noise_at_snr, dominant_frequency, gen_am_mixture, gen_sinusoid_mixture, periodogram,
    rmd_decompose, select_embedding_dimension, three_tone_components, AmMixtureParams,
    DecompositionConfig, DiffOrder, Error, Mixture, ModeProjection, SimilarityMeasure,
    SineComponent, TimeSeries,
};

const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

#[derive(Parser)]
#[command(name = "rmd", version, about = "Robust mode decomposition toolkit")]
#[command(
    after_help = "Exit codes: 0 ok, 2 bad arguments, 3 I/O or parse error, 4 numerical failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a signal file into modes and a residual.
    Decompose(DecomposeArgs),
    /// Write a synthetic test signal.
    Synth(SynthArgs),
    /// Run an experiment spec and write its report.
    Bench(BenchArgs),
    /// Write the periodogram and report the embedding-dimension heuristic.
    Spectrum(SpectrumArgs),
}

#[derive(Args)]
struct RateArg {
    /// Sample rate in Hz; read from the `<stem>.json` sidecar when omitted.
    #[arg(long, short = 's')]
    sample_rate: Option<f64>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct DecomposeArgs {
    /// Input series (one value per line, or `time,value`).
    input: PathBuf,
    #[command(flatten)]
    rate: RateArg,
    /// Number of modes to extract.
    #[arg(long, short = 'r', default_value_t = 3)]
    modes: usize,
    /// Regularization weight.
    #[arg(long, short = 'a', default_value_t = 0.3)]
    alpha: f64,
    /// Difference-operator order (1 or 2).
    #[arg(long, default_value_t = 1)]
    order: u8,
    /// Merge threshold; values above 1 disable merging.
    #[arg(long, default_value_t = 0.85)]
    theta: f64,
    #[arg(long, value_enum, default_value_t = Measure::Spectral)]
    measure: Measure,
    /// Embedding dimension; chosen from the spectrum when omitted.
    #[arg(long, short = 'k')]
    k: Option<usize>,
    /// Scale each mode by its shrinkage weight 1/(1 + alpha mu).
    #[arg(long)]
    shrinkage: bool,
    #[arg(long, value_enum, default_value_t = Projection::Subspace)]
    projection: Projection,
    /// Output directory for mode CSVs and report.json.
    #[arg(long, short = 'o')]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Measure {
    Cosine,
    Pearson,
    NormalizedEuclidean,
    Spectral,
}

impl From<Measure> for SimilarityMeasure {
    fn from(m: Measure) -> Self {
        match m {
            Measure::Cosine => SimilarityMeasure::Cosine,
            Measure::Pearson => SimilarityMeasure::Pearson,
            Measure::NormalizedEuclidean => SimilarityMeasure::NormalizedEuclidean,
            Measure::Spectral => SimilarityMeasure::Spectral,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Projection {
    Subspace,
    MergedVector,
}

impl From<Projection> for ModeProjection {
    fn from(p: Projection) -> Self {
        match p {
            Projection::Subspace => ModeProjection::Subspace,
            Projection::MergedVector => ModeProjection::MergedVector,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthKind {
    /// 2, 5 and 19 Hz tones with amplitudes 3, 0.5 and 4.
    Sine3,
    /// AM tone at f1 plus a sine at f2 and a cosine at f3.
    Am,
    /// Tones given with --tone.
    Tones,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct SynthArgs {
    #[arg(value_enum)]
    kind: SynthKind,
    /// Output CSV; a sample-rate sidecar is written next to it.
    #[arg(long, short = 'o')]
    out: PathBuf,
    /// Add white Gaussian noise at this SNR (dB) and write the clean
    /// components alongside.
    #[arg(long)]
    snr: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200.0)]
    sample_rate: f64,
    /// Duration in seconds.
    #[arg(long, default_value_t = 10.0)]
    duration: f64,
    /// Tone as FREQ:AMP or FREQ:AMP:PHASE (repeatable, `tones` only).
    #[arg(long = "tone", value_parser = parse_tone)]
    tones: Vec<SineComponent>,
    #[arg(long, default_value_t = 3.0)]
    f1: f64,
    #[arg(long, default_value_t = 8.0)]
    f2: f64,
    #[arg(long, default_value_t = 31.0)]
    f3: f64,
    /// Modulation frequency of the AM tone.
    #[arg(long, default_value_t = 0.5)]
    f_mod: f64,
}

fn parse_tone(s: &str) -> Result<SineComponent, String> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad number `{p}` in `{s}`"))
        })
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [f, a] => Ok(SineComponent::new(f, a, 0.0)),
        [f, a, p] => Ok(SineComponent::new(f, a, p)),
        _ => Err(format!("expected FREQ:AMP[:PHASE], got `{s}`")),
    }
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct BenchArgs {
    /// Experiment spec (JSON).
    spec: PathBuf,
    /// Output directory for report.json, summary.csv and per-mode CSVs.
    #[arg(long, short = 'o')]
    out: PathBuf,
    /// Override the spec's seed list.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Override the spec's alpha list.
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// Run cells one at a time.
    #[arg(long)]
    serial: bool,
}

#[derive(Args)]
struct SpectrumArgs {
    input: PathBuf,
    #[command(flatten)]
    rate: RateArg,
    /// Periodogram CSV (`frequency_hz,power`).
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

fn exit_code(e: &Error) -> u8 {
    if e.is_io() {
        EXIT_IO
    } else if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_USAGE
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Decompose(a) => decompose(a),
        Command::Synth(a) => synth(a),
        Command::Bench(a) => bench(a),
        Command::Spectrum(a) => spectrum(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rmd: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn diff_order(order: u8) -> Result<DiffOrder, Error> {
    DiffOrder::try_from(order).map_err(|_| {
        Error::InvalidParameter(format!("difference order must be 1 or 2, got {order}"))
    })
}

fn fmt_hz(f: Option<f64>) -> String {
    f.map(|f| format!("{f:.3} Hz"))
        .unwrap_or_else(|| "none".into())
}

fn decompose(a: DecomposeArgs) -> Result<(), Error> {
    // Flags are checked before the input is read.
    let config = DecompositionConfig {
        n_modes: a.modes,
        merge_threshold: a.theta,
        alpha: a.alpha,
        diff_order: diff_order(a.order)?,
        similarity: a.measure.into(),
        k_override: a.k,
        shrinkage: a.shrinkage,
        projection: a.projection.into(),
        ..DecompositionConfig::default()
    };
    config.validate()?;
    if let Some(r) = a.rate.sample_rate {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sample rate must be positive, got {r}"
            )));
        }
    }
    let x = load_signal_csv(&a.input, a.rate.sample_rate)?;
    let ms = rmd_decompose(&x, &config)?;
    write_mode_set(&ms, &a.out)?;
    println!(
        "N={} fs={} Hz K={} modes={}{}",
        x.len(),
        x.sample_rate(),
        ms.embedding_dim,
        ms.modes.len(),
        if ms.incomplete { " (incomplete)" } else { "" }
    );
    for (i, r) in ms.reports.iter().enumerate() {
        println!(
            "mode {}: gamma={:.6e} mu={:.6e} peak={}",
            i + 1,
            r.gamma_sum,
            r.mu,
            fmt_hz(r.peak_frequency_hz)
        );
    }
    Ok(())
}

fn synth(a: SynthArgs) -> Result<(), Error> {
    let mix: Mixture = match a.kind {
        SynthKind::Sine3 => {
            gen_sinusoid_mixture(&three_tone_components(), a.sample_rate, a.duration)?
        }
        SynthKind::Tones => {
            if a.tones.is_empty() {
                return Err(Error::InvalidParameter(
                    "`tones` needs at least one --tone".into(),
                ));
            }
            gen_sinusoid_mixture(&a.tones, a.sample_rate, a.duration)?
        }
        SynthKind::Am => gen_am_mixture(&AmMixtureParams {
            f1: a.f1,
            f2: a.f2,
            f3: a.f3,
            f_mod: a.f_mod,
            sample_rate: a.sample_rate,
            duration: a.duration,
        })?,
    };
    let signal = match a.snr {
        Some(snr) => {
            if !snr.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "snr must be finite, got {snr}"
                )));
            }
            add_noise_at_snr(&mix.mixture, snr, a.seed)?.noisy
        }
        None => mix.mixture.clone(),
    };
    write_with_sidecar(&a.out, &signal)?;
    println!(
        "wrote {} ({} samples at {} Hz)",
        a.out.display(),
        signal.len(),
        signal.sample_rate()
    );
    if a.snr.is_some() {
        for (i, c) in mix.components.iter().enumerate() {
            let p = truth_path(&a.out, i);
            write_with_sidecar(&p, c)?;
            println!("wrote {}", p.display());
        }
        let p = truth_path_named(&a.out, "clean");
        write_with_sidecar(&p, &mix.mixture)?;
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn write_with_sidecar(path: &Path, x: &TimeSeries) -> Result<(), Error> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    write_series_csv(path, x)?;
    write_sidecar(path, x.sample_rate())?;
    Ok(())
}

fn truth_path_named(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("signal");
    out.with_file_name(format!("{stem}_{suffix}.csv"))
}

/// `<stem>_truth_NN.csv` for component `i`.
fn truth_path(out: &Path, i: usize) -> PathBuf {
    truth_path_named(out, &format!("truth_{:02}", i + 1))
}

fn bench(a: BenchArgs) -> Result<(), Error> {
    let mut spec = ExperimentSpec::load(&a.spec).map_err(|e| match e {
        // A spec that reads but does not parse is a bad spec, not an I/O fault.
        Error::Json { path, source } => {
            Error::InvalidParameter(format!("{}: {source}", path.display()))
        }
        e => e,
    })?;
    if let Some(s) = a.seeds {
        spec.seeds = s;
    }
    if let Some(al) = a.alphas {
        spec.alphas = al;
    }
    let report = run_experiment_with(
        &spec,
        &RunOptions {
            parallel: !a.serial,
        },
    )
    .map_err(|e| {
        if e.is_io() {
            e
        } else {
            Error::InvalidParameter(e.to_string())
        }
    })?;
    write_report(&report, &a.out)?;
    print_table(&report);
    Ok(())
}

fn print_table(r: &ExperimentReport) {
    let name = if r.name.is_empty() {
        "experiment"
    } else {
        &r.name
    };
    println!(
        "{name}: {} cells, {} failed",
        r.cells.len(),
        r.failed_cells()
    );
    if r.aggregates.is_empty() {
        for c in &r.cells {
            let peaks: Vec<String> = c
                .modes
                .iter()
                .map(|m| {
                    let tag = if m.residual {
                        "residual".to_string()
                    } else {
                        format!("mode {}", m.index)
                    };
                    let band = m
                        .band
                        .as_deref()
                        .map(|b| format!(" [{b}]"))
                        .unwrap_or_default();
                    format!("{tag} {}{band}", fmt_hz(m.peak_frequency_hz))
                })
                .collect();
            println!(
                "alpha={} order={} seed={}: {}",
                c.alpha,
                c.diff_order,
                c.seed,
                peaks.join(", ")
            );
        }
        return;
    }
    println!(
        "{:>8} {:>6} {:>5} {:<16} {:>9} {:>9} {:>9} {:>12}",
        "snr_db", "alpha", "order", "component", "matched", "mean_r", "min_r", "mean|df|Hz"
    );
    let f = |v: Option<f64>, p: usize| v.map(|v| format!("{v:.p$}")).unwrap_or_else(|| "-".into());
    for g in &r.aggregates {
        println!(
            "{:>8} {:>6} {:>5} {:<16} {:>9} {:>9} {:>9} {:>12}",
            g.snr_db
                .map(|s| s.to_string())
                .unwrap_or_else(|| "clean".into()),
            g.alpha,
            g.diff_order.to_string(),
            g.label,
            format!("{}/{}", g.matched, g.cells),
            f(g.mean_correlation, 3),
            f(g.min_correlation, 3),
            f(g.mean_abs_peak_error_hz, 3)
        );
    }
}

fn spectrum(a: SpectrumArgs) -> Result<(), Error> {
    let x = load_signal_csv(&a.input, a.rate.sample_rate)?;
    let s = periodogram(&x);
    let k = select_embedding_dimension(&x)?;
    if let Some(out) = &a.out {
        std::fs::write(out, spectrum_to_csv(&s)).map_err(|source| Error::Io {
            path: out.clone(),
            source,
        })?;
    }
    match dominant_frequency(&s) {
        Ok(f) => println!("dominant frequency: {f:.3} Hz"),
        Err(_) => println!("dominant frequency: none (no peak above DC)"),
    }
    println!("embedding dimension K: {k}");
    Ok(())
}
