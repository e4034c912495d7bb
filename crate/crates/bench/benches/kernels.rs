use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use tracelab_core::dixmier::slope_estimator;
use tracelab_core::geomspec::{synthetic_model, torus_model, SyntheticKind};
use tracelab_core::matrixlab::random::{random_matrix, trial_rng};
use tracelab_core::matrixlab::singular_values;

fn svd(c: &mut Criterion) {
    let mut group = c.benchmark_group("jacobi_svd");
    for n in [4usize, 16, 64] {
        let a = random_matrix(&mut trial_rng(1, n as u64), n, n, true);
        group.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| {
            b.iter(|| singular_values(black_box(a)).unwrap())
        });
    }
    group.finish();
}

fn torus(c: &mut Criterion) {
    let mut group = c.benchmark_group("torus_model");
    group.sample_size(10);
    for (n, r) in [(1u32, 1e6), (2, 500.0), (3, 100.0)] {
        group.bench_with_input(BenchmarkId::new(format!("n{n}"), r), &r, |b, &r| {
            b.iter(|| torus_model(n, black_box(r)).unwrap())
        });
    }
    group.finish();
}

fn slope(c: &mut Criterion) {
    let harmonic = synthetic_model(&SyntheticKind::Harmonic { l: 1.0 }).unwrap().into_sequence();
    let circle = torus_model(2, 500.0).unwrap().into_sequence();
    let cover = circle.coverage().unwrap();
    let mut group = c.benchmark_group("slope_estimator");
    group.bench_function("harmonic_2^20", |b| {
        b.iter(|| slope_estimator(black_box(&harmonic), 1 << 20, 0.125).unwrap())
    });
    group.bench_function("torus2_r500", |b| {
        b.iter(|| slope_estimator(black_box(&circle), cover, 0.125).unwrap())
    });
    group.finish();
}

criterion_group!(benches, svd, torus, slope);
criterion_main!(benches);
