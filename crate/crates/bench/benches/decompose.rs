use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rmd_core::{
    add_noise_at_snr, augmented, build_trajectory_matrix, diff_operator, gen_sinusoid_mixture,
    gram, rmd_decompose, smoothing_matrix, solve_generalized, ssa_decompose, three_tone_components,
    DecompositionConfig, DiffOrder, TimeSeries,
};

fn noisy(duration: f64, sample_rate: f64) -> TimeSeries {
    let clean = gen_sinusoid_mixture(&three_tone_components(), sample_rate, duration)
        .unwrap()
        .mixture;
    add_noise_at_snr(&clean, -5.0, 0).unwrap().noisy
}

fn pipeline(c: &mut Criterion) {
    let x = noisy(10.0, 200.0);
    let cfg = DecompositionConfig {
        alpha: 8.0,
        k_override: Some(200),
        ..Default::default()
    };
    c.bench_function("rmd N=2000 K=200", |b| {
        b.iter(|| rmd_decompose(black_box(&x), &cfg).unwrap())
    });
    c.bench_function("ssa N=2000 K=200", |b| {
        b.iter(|| ssa_decompose(black_box(&x), 200, 3).unwrap())
    });
}

fn kernels(c: &mut Criterion) {
    let x = noisy(10.0, 200.0);
    let traj = build_trajectory_matrix(&x, 200).unwrap();
    c.bench_function("trajectory+gram K=200", |b| {
        b.iter(|| gram(&build_trajectory_matrix(black_box(&x), 200).unwrap()))
    });
    let g = gram(&traj);
    let r = smoothing_matrix(&diff_operator(DiffOrder::First, 200).unwrap());
    let m = augmented(&r, 8.0).unwrap();
    c.bench_function("generalized eigen K=200", |b| {
        b.iter(|| solve_generalized(black_box(&g), &m, &r).unwrap())
    });
}

fn radar_scale(c: &mut Criterion) {
    let x = noisy(20.48, 100.0);
    let cfg = DecompositionConfig {
        alpha: 2.0,
        k_override: Some(682),
        ..Default::default()
    };
    let mut group = c.benchmark_group("radar scale");
    group.sample_size(10);
    group.bench_function("rmd N=2048 K=682", |b| {
        b.iter(|| rmd_decompose(black_box(&x), &cfg).unwrap())
    });
    group.finish();
}

criterion_group!(benches, pipeline, kernels, radar_scale);
criterion_main!(benches);
