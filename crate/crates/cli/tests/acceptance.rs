//! Acceptance suite: one test per criterion, each printing a single
//! `criterion N [PASS|FAIL] ...` line. Run with `--nocapture` to see them.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rmd_bench::{
    read_report, run_nonlinear_experiment, run_sine_snr_experiment, CellResult, ExperimentSpec,
};
use rmd_core::{
    augmented, build_trajectory_matrix, diagonal_average, diff_operator, dominant_frequency,
    gen_sinusoid_mixture, periodogram, rmd_decompose, score_mode, smoothing_matrix,
    solve_generalized, three_tone_components, DecompositionConfig, DiffOrder, GramMatrix, ModeSet,
    TimeSeries,
};

fn verdict(n: u32, name: &str, pass: bool, detail: String) {
    println!(
        "criterion {n} [{}] {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {n} ({name}) failed: {detail}");
}

/// Variance-ratio bound and completeness, applied to every decomposition here.
fn audit(ms: &ModeSet, x: &TimeSeries) -> (f64, f64) {
    let scale = x.samples().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let err = ms
        .reassemble()
        .iter()
        .zip(x.samples())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let rel = if scale > 0.0 { err / scale } else { err };
    assert!(
        ms.variance_ratio <= 1.0,
        "variance ratio {}",
        ms.variance_ratio
    );
    assert!(rel <= 1e-9, "completeness error {rel}");
    (ms.variance_ratio, rel)
}

fn audit_cells(cells: &[CellResult]) {
    for c in cells {
        assert!(c.ok, "cell failed: {:?}", c.error);
        assert!(c.variance_ratio.unwrap() <= 1.0);
        assert!(c.completeness_error.unwrap() <= 1e-9);
    }
}

fn normal_series(rng: &mut ChaCha8Rng, n: usize, fs: f64) -> TimeSeries {
    let v = (0..n)
        .map(|_| {
            // Box-Muller keeps the oracle free of the library's noise code.
            let u1: f64 = rng.random_range(f64::EPSILON..1.0);
            let u2: f64 = rng.random();
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        })
        .collect();
    TimeSeries::new(v, fs).unwrap()
}

#[test]
fn criterion_01_hankel_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(3..=512);
        let k = rng.random_range(2..n);
        let x = normal_series(&mut rng, n, 1.0);
        let t = build_trajectory_matrix(&x, k).unwrap();
        let back = diagonal_average(t.data(), n).unwrap();
        for (a, b) in back.iter().zip(x.samples()) {
            worst = worst.max((a - b).abs());
        }
    }
    verdict(
        1,
        "Hankel round trip",
        worst <= 1e-12,
        format!("200 cases, max abs error {worst:.2e} (tol 1e-12)"),
    );
}

/// Independent SSA: SVD of the Hankel matrix, elementary components
/// averaged over anti-diagonals by direct summation.
fn ssa_oracle(x: &[f64], k: usize, r: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let l = n - k + 1;
    let h = DMatrix::from_fn(l, k, |i, j| x[i + j]);
    let svd = h.svd(true, true);
    let u = svd.u.unwrap();
    let vt = svd.v_t.unwrap();
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    idx.iter()
        .take(r)
        .map(|&c| {
            let s = svd.singular_values[c];
            let mut sum = vec![0.0; n];
            let mut cnt = vec![0usize; n];
            for i in 0..l {
                for j in 0..k {
                    sum[i + j] += s * u[(i, c)] * vt[(c, j)];
                    cnt[i + j] += 1;
                }
            }
            sum.iter().zip(&cnt).map(|(s, &c)| s / c as f64).collect()
        })
        .collect()
}

#[test]
fn criterion_02_alpha_zero_is_ssa() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = rng.random_range(24..=240);
        let k = rng.random_range(4..=n / 3);
        let r = rng.random_range(1..=k.min(5));
        let x = normal_series(&mut rng, n, 10.0);
        let cfg = DecompositionConfig {
            n_modes: r,
            alpha: 0.0,
            merge_threshold: 1.01,
            k_override: Some(k),
            ..Default::default()
        };
        let ms = rmd_decompose(&x, &cfg).unwrap();
        audit(&ms, &x);
        let oracle = ssa_oracle(x.samples(), k, r);
        assert_eq!(ms.modes.len(), r);
        for (m, o) in ms.modes.iter().zip(&oracle) {
            let err = |sign: f64| {
                m.samples()
                    .iter()
                    .zip(o)
                    .fold(0.0f64, |acc, (a, b)| acc.max((a - sign * b).abs()))
            };
            worst = worst.max(err(1.0).min(err(-1.0)));
        }
    }
    verdict(
        2,
        "alpha=0 equals SSA",
        worst <= 1e-7,
        format!("50 signals, max component error {worst:.2e} up to sign (tol 1e-7)"),
    );
}

fn random_psd(rng: &mut ChaCha8Rng, k: usize) -> DMatrix<f64> {
    let rank = rng.random_range(1..=k);
    let scale = 10f64.powf(rng.random_range(-2.0..3.0));
    let b = DMatrix::from_fn(k, rank, |_, _| rng.random_range(-1.0..1.0) * scale);
    let g = &b * b.transpose();
    (&g + g.transpose()) * 0.5
}

#[test]
fn criterion_03_generalized_eigen_contracts() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut coh, mut ray, mut mono) = (0.0f64, 0.0f64, 0.0f64);
    for case in 0..100 {
        let k = rng.random_range(3..=64);
        let g = GramMatrix::from_matrix(random_psd(&mut rng, k)).unwrap();
        let order = if case % 2 == 0 {
            DiffOrder::First
        } else {
            DiffOrder::Second
        };
        let r = smoothing_matrix(&diff_operator(order, k).unwrap());
        let mut previous: Option<Vec<f64>> = None;
        for alpha in [0.0, 0.1, 1.0, 10.0] {
            let m = augmented(&r, alpha).unwrap();
            let basis = solve_generalized(&g, &m, &r).unwrap();
            coh = coh.max(basis.max_m_coherence(&m));
            let gmax = basis.gamma_max();
            for p in &basis.pairs {
                let lhs = p.gamma * (1.0 + alpha * p.mu);
                ray = ray.max((lhs - p.energy).abs() / p.energy.abs().max(1e-4 * gmax));
            }
            let gammas = basis.gammas();
            if let Some(prev) = &previous {
                for (a, b) in gammas.iter().zip(prev) {
                    mono = mono.max((a - b) / gmax.max(f64::MIN_POSITIVE));
                }
            }
            previous = Some(gammas);
        }
    }
    let pass = coh <= 1e-8 && ray <= 1e-8 && mono <= 1e-12;
    verdict(
        3,
        "generalized eigen contracts",
        pass,
        format!(
            "100 PSD matrices x 4 alphas: M-coherence {coh:.2e} (tol 1e-8), Rayleigh rel {ray:.2e} (tol 1e-8), max gamma increase {mono:.2e} of gamma_max"
        ),
    );
}

#[test]
fn criterion_04_differential_energy_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let n = rng.random_range(30..=200);
        let k = rng.random_range(3..=n / 3);
        let x = normal_series(&mut rng, n, 1.0);
        let traj = build_trajectory_matrix(&x, k).unwrap();
        let order = if case % 2 == 0 {
            DiffOrder::First
        } else {
            DiffOrder::Second
        };
        let d = diff_operator(order, k).unwrap();
        let r = smoothing_matrix(&d);
        let g = rmd_core::gram(&traj);
        let basis = solve_generalized(&g, &augmented(&r, 0.0).unwrap(), &r).unwrap();
        let v = nalgebra::DVector::from_column_slice(
            &basis.pairs[rng.random_range(0..basis.len())].vector,
        );
        let xv = traj.data() * &v;
        let u = &xv / xv.norm();
        let xi = &u * v.transpose();
        let lhs = (d.matrix() * xi.transpose()).norm_squared();
        let rhs = r.quadratic(v.as_slice());
        worst = worst.max((lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE));
    }
    verdict(
        4,
        "differential energy identity",
        worst <= 1e-10,
        format!("100 rank-1 cases, max rel error {worst:.2e} (tol 1e-10)"),
    );
}

fn battery() -> Vec<(TimeSeries, DecompositionConfig)> {
    let mut rng = ChaCha8Rng::seed_from_u64(56);
    let mut out = Vec::new();
    let mix = gen_sinusoid_mixture(&three_tone_components(), 200.0, 10.0)
        .unwrap()
        .mixture;
    for (i, measure) in rmd_core::SimilarityMeasure::ALL.into_iter().enumerate() {
        for alpha in [0.0, 0.3, 3.0, 10.0] {
            for order in [DiffOrder::First, DiffOrder::Second] {
                let n = rng.random_range(60..=400);
                let x = normal_series(&mut rng, n, 50.0);
                let cfg = DecompositionConfig {
                    n_modes: rng.random_range(1..=4),
                    alpha,
                    diff_order: order,
                    similarity: measure,
                    shrinkage: (i + n) % 2 == 0,
                    k_override: Some(rng.random_range(4..=n / 3)),
                    ..Default::default()
                };
                out.push((x, cfg));
            }
        }
        out.push((
            mix.clone(),
            DecompositionConfig {
                similarity: measure,
                k_override: Some(200),
                ..Default::default()
            },
        ));
    }
    out
}

#[test]
fn criterion_05_variance_ratio_bound() {
    let mut worst = 0.0f64;
    let cases = battery();
    for (x, cfg) in &cases {
        let ms = rmd_decompose(x, cfg).unwrap();
        worst = worst.max(audit(&ms, x).0);
    }
    verdict(
        5,
        "variance-ratio bound",
        worst <= 1.0,
        format!(
            "{} decompositions here (every decomposition in the suite is also audited), max ratio {worst:.6}",
            cases.len()
        ),
    );
}

#[test]
fn criterion_06_completeness() {
    let mut worst = 0.0f64;
    let cases = battery();
    for (x, cfg) in &cases {
        let ms = rmd_decompose(x, cfg).unwrap();
        worst = worst.max(audit(&ms, x).1);
    }
    verdict(
        6,
        "completeness",
        worst <= 1e-9,
        format!(
            "{} decompositions here (every decomposition in the suite is also audited), max rel error {worst:.2e} (tol 1e-9)",
            cases.len()
        ),
    );
}

/// Verdict inputs for the noiseless run: (pass, detail).
fn judge_noiseless(cells: &[CellResult]) -> (bool, String) {
    let c = &cells[0];
    let mut pass = c.ok;
    let mut parts = Vec::new();
    for t in &c.truths {
        let m = t.metrics.unwrap();
        let ok = t.matched
            && !t.from_residual
            && m.correlation >= 0.99
            && (m.peak_frequency - t.true_freq_hz).abs() < 0.05;
        pass &= ok;
        parts.push(format!(
            "{} Hz: peak {:.1}, r {:.4}",
            t.true_freq_hz, m.peak_frequency, m.correlation
        ));
    }
    (pass, parts.join("; "))
}

#[test]
fn criterion_07_noiseless_separation() {
    let x = gen_sinusoid_mixture(&three_tone_components(), 200.0, 10.0).unwrap();
    let ms = rmd_decompose(
        &x.mixture,
        &DecompositionConfig {
            k_override: Some(200),
            ..Default::default()
        },
    )
    .unwrap();
    audit(&ms, &x.mixture);
    let mut peaks: Vec<f64> = ms
        .modes
        .iter()
        .map(|m| dominant_frequency(&periodogram(m)).unwrap())
        .collect();
    let mut pass = ms.modes.len() == 3;
    let mut parts = Vec::new();
    for (truth, f) in x.components.iter().zip([2.0, 5.0, 19.0]) {
        let Some(i) = peaks.iter().position(|p| (p - f).abs() < 0.05) else {
            pass = false;
            parts.push(format!("{f} Hz missing"));
            continue;
        };
        peaks[i] = f64::NAN;
        let s = score_mode(&ms.modes[i], truth).unwrap();
        pass &= s.correlation >= 0.99;
        parts.push(format!("{f} Hz: r {:.4}", s.correlation));
    }
    verdict(7, "noiseless separation", pass, parts.join("; "));
}

fn sine_spec(snr: f64, alpha: f64) -> ExperimentSpec {
    ExperimentSpec::from_json(&format!(
        r#"{{ "generator": {{ "kind": "sine-mixture" }}, "snr_db": [{snr}],
              "seeds": [0,1,2,3,4,5,6,7,8,9], "alphas": [{alpha}], "diff_orders": [1],
              "k_override": 200, "n_modes": 3 }}"#
    ))
    .unwrap()
}

fn select(cells: &[CellResult], snr: f64, alpha: f64) -> Vec<CellResult> {
    cells
        .iter()
        .filter(|c| c.snr_db == Some(snr) && c.alpha == alpha && c.diff_order == DiffOrder::First)
        .cloned()
        .collect()
}

fn judge_minus5(cells: &[CellResult]) -> (bool, String) {
    let all_matched = cells
        .iter()
        .filter(|c| c.truths.iter().all(|t| t.matched))
        .count();
    let errs: Vec<f64> = cells
        .iter()
        .flat_map(|c| c.truths.iter())
        .filter(|t| t.matched)
        .map(|t| t.peak_error_hz.unwrap().abs())
        .collect();
    let mean_err = errs.iter().sum::<f64>() / errs.len().max(1) as f64;
    let mean_corr = |f: f64| {
        let v: Vec<f64> = cells
            .iter()
            .filter_map(|c| c.truth(f))
            .filter(|t| t.matched)
            .map(|t| t.metrics.unwrap().correlation)
            .collect();
        v.iter().sum::<f64>() / v.len().max(1) as f64
    };
    let five = cells
        .iter()
        .filter(|c| c.truth(5.0).unwrap().matched)
        .count();
    let (c2, c19) = (mean_corr(2.0), mean_corr(19.0));
    let pass = all_matched == cells.len() && mean_err <= 0.5 && c2 >= 0.7 && c19 >= 0.7;
    (
        pass,
        format!(
            "all three matched in {all_matched}/{} seeds (5 Hz in {five}), mean |peak error| {mean_err:.3} Hz, mean r 2 Hz {c2:.3}, 19 Hz {c19:.3}",
            cells.len()
        ),
    )
}

#[test]
fn criterion_08_minus_5_db() {
    let t = Instant::now();
    let r = run_sine_snr_experiment(&sine_spec(-5.0, 8.0)).unwrap();
    let secs = t.elapsed().as_secs_f64();
    audit_cells(&r.cells);
    let (pass, detail) = judge_minus5(&r.cells);
    verdict(
        8,
        "-5 dB reproduction",
        pass && secs <= 60.0,
        format!("{detail}, {secs:.1} s"),
    );
}

fn judge_minus15(cells: &[CellResult]) -> (bool, String) {
    let within = |f: f64| {
        cells
            .iter()
            .filter(|c| {
                let t = c.truth(f).unwrap();
                t.matched && t.peak_error_hz.unwrap().abs() <= 0.3
            })
            .count()
    };
    let via_residual = cells
        .iter()
        .filter(|c| c.truth(19.0).unwrap().from_residual)
        .count();
    let third = cells
        .iter()
        .filter(|c| {
            c.proper_modes().any(|m| {
                m.peak_frequency_hz
                    .is_some_and(|p| (3.0..=7.0).contains(&p))
            })
        })
        .count();
    let (n2, n19) = (within(2.0), within(19.0));
    (
        n2 >= 8 && n19 >= 8 && third >= 6,
        format!(
            "2 Hz within 0.3 Hz in {n2}/10, 19 Hz in {n19}/10 ({via_residual} via residual), mode in [3, 7] Hz in {third}/10"
        ),
    )
}

#[test]
fn criterion_09_minus_15_db() {
    let t = Instant::now();
    let r = run_sine_snr_experiment(&sine_spec(-15.0, 10.0)).unwrap();
    let secs = t.elapsed().as_secs_f64();
    audit_cells(&r.cells);
    let (pass, detail) = judge_minus15(&r.cells);
    verdict(
        9,
        "-15 dB reproduction",
        pass && secs <= 60.0,
        format!("{detail}, {secs:.1} s"),
    );
}

fn judge_nonlinear(cells: &[CellResult]) -> (bool, String) {
    let near = |c: &CellResult, f: f64| {
        c.truth(f)
            .is_some_and(|t| t.matched && t.peak_error_hz.unwrap().abs() <= 0.5)
    };
    let pair = cells
        .iter()
        .filter(|c| near(c, 3.0) && near(c, 8.0))
        .count();
    let high = cells.iter().filter(|c| near(c, 31.0)).count();
    let via_residual = cells
        .iter()
        .filter(|c| near(c, 31.0) && c.truth(31.0).unwrap().from_residual)
        .count();
    (
        pair >= 8 && high >= 9,
        format!(
            "3 Hz and 8 Hz distinct in {pair}/{}, 31 Hz in {high}/{} ({via_residual} via residual)",
            cells.len(),
            cells.len()
        ),
    )
}

#[test]
fn criterion_10_nonlinear() {
    let spec = ExperimentSpec::from_json(
        r#"{ "generator": { "kind": "am-mixture" }, "snr_db": [0],
             "seeds": [0,1,2,3,4,5,6,7,8,9], "alphas": [2], "diff_orders": [1],
             "k_override": 200, "n_modes": 3 }"#,
    )
    .unwrap();
    let r = run_nonlinear_experiment(&spec).unwrap();
    audit_cells(&r.cells);
    let (pass, detail) = judge_nonlinear(&r.cells);
    verdict(10, "nonlinear reproduction", pass, detail);
}

#[test]
fn criterion_11_performance() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let x = normal_series(&mut rng, 2000, 200.0);
    let t = Instant::now();
    let ms = rmd_decompose(
        &x,
        &DecompositionConfig {
            alpha: 8.0,
            k_override: Some(200),
            ..Default::default()
        },
    )
    .unwrap();
    let small = t.elapsed().as_secs_f64();
    audit(&ms, &x);
    let x = normal_series(&mut rng, 2048, 100.0);
    let t = Instant::now();
    let ms = rmd_decompose(
        &x,
        &DecompositionConfig {
            alpha: 2.0,
            k_override: Some(682),
            ..Default::default()
        },
    )
    .unwrap();
    let large = t.elapsed().as_secs_f64();
    audit(&ms, &x);
    verdict(
        11,
        "performance",
        small <= 10.0 && large <= 120.0,
        format!(
            "N=2000 K=200 in {small:.2} s (limit 10), N=2048 K=682 in {large:.2} s (limit 120)"
        ),
    );
}

fn rmd_bin(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_rmd"))
        .args(args)
        .output()
        .unwrap()
}

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("specs")
        .join(name)
}

/// File contents with the timing fields blanked.
fn untimed(path: &Path) -> String {
    let text = fs::read_to_string(path).unwrap();
    if path.extension().is_some_and(|e| e == "csv") {
        let header = text.lines().next().unwrap_or("");
        let col = header.split(',').position(|h| h == "wall_ms");
        return text
            .lines()
            .map(|l| match col {
                Some(i) => {
                    let mut f: Vec<&str> = l.split(',').collect();
                    if f.len() > i && l != header {
                        f[i] = "";
                    }
                    f.join(",")
                }
                None => l.to_string(),
            })
            .collect::<Vec<_>>()
            .join("\n");
    }
    text.lines()
        .map(|l| {
            if l.trim_start().starts_with("\"wall_ms\"") {
                "wall_ms"
            } else {
                l
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn bench_twice(spec: &str, dir: &Path) -> (rmd_bench::ExperimentReport, bool) {
    let a = dir.join(format!("{spec}.a"));
    let b = dir.join(format!("{spec}.b"));
    for out in [&a, &b] {
        let o = rmd_bin(&[
            "bench",
            bundled(spec).to_str().unwrap(),
            "-o",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let mut stable = true;
    for entry in fs::read_dir(&a).unwrap() {
        let name = entry.unwrap().file_name();
        stable &= untimed(&a.join(&name)) == untimed(&b.join(&name));
    }
    (read_report(&a.join("report.json")).unwrap(), stable)
}

#[test]
fn criterion_12_cli_contract() {
    let dir = tempfile::tempdir().unwrap();

    // synth -> decompose, twice, byte for byte.
    let sig = dir.path().join("sine3.csv");
    assert!(rmd_bin(&["synth", "sine3", "-o", sig.to_str().unwrap()])
        .status
        .success());
    let mut outputs = Vec::new();
    for run in ["d1", "d2"] {
        let out = dir.path().join(run);
        let o = rmd_bin(&[
            "decompose",
            sig.to_str().unwrap(),
            "-k",
            "200",
            "-r",
            "3",
            "-o",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        outputs.push((String::from_utf8(o.stdout).unwrap(), out));
    }
    let files = [
        "mode_01.csv",
        "mode_02.csv",
        "mode_03.csv",
        "residual.csv",
        "report.json",
    ];
    let decompose_stable = outputs[0].0 == outputs[1].0
        && files.iter().all(|f| {
            fs::read(outputs[0].1.join(f)).unwrap() == fs::read(outputs[1].1.join(f)).unwrap()
        });
    let printed_peaks = ["2.000 Hz", "5.000 Hz", "19.000 Hz"]
        .iter()
        .all(|p| outputs[0].0.contains(p));

    // Bundled specs through `rmd bench`, twice; verdicts must match the library's.
    let (clean, s1) = bench_twice("noiseless.json", dir.path());
    let (snr, s2) = bench_twice("sine_snr.json", dir.path());
    let (am, s3) = bench_twice("nonlinear.json", dir.path());
    for r in [&clean, &snr, &am] {
        audit_cells(&r.cells);
    }
    let cli = [
        judge_noiseless(&clean.cells),
        judge_minus5(&select(&snr.cells, -5.0, 8.0)),
        judge_minus15(&select(&snr.cells, -15.0, 10.0)),
        judge_nonlinear(&select(&am.cells, 0.0, 2.0)),
    ];
    let lib = [
        judge_noiseless(
            &rmd_bench::run_experiment(&ExperimentSpec::load(&bundled("noiseless.json")).unwrap())
                .unwrap()
                .cells,
        ),
        judge_minus5(
            &run_sine_snr_experiment(&sine_spec(-5.0, 8.0))
                .unwrap()
                .cells,
        ),
        judge_minus15(
            &run_sine_snr_experiment(&sine_spec(-15.0, 10.0))
                .unwrap()
                .cells,
        ),
        judge_nonlinear(&select(
            &run_nonlinear_experiment(&ExperimentSpec::load(&bundled("nonlinear.json")).unwrap())
                .unwrap()
                .cells,
            0.0,
            2.0,
        )),
    ];
    let agree = cli == lib;
    let summary: Vec<String> = cli
        .iter()
        .zip(7..)
        .map(|((p, _), n)| format!("{n}:{}", if *p { "pass" } else { "fail" }))
        .collect();
    let stable = decompose_stable && s1 && s2 && s3;
    verdict(
        12,
        "CLI contract",
        stable && agree && printed_peaks,
        format!(
            "synth->decompose byte-stable {decompose_stable} with peaks 2/5/19 Hz {printed_peaks}; bench reruns stable {}; CLI verdicts equal library verdicts {agree} ({})",
            s1 && s2 && s3,
            summary.join(" ")
        ),
    );
}
