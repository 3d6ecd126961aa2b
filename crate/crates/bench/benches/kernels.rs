use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use yukawa_bench::ARGUMENTS;
use yukawa_core::potentials::{euclid_hat, mixture_m, mixture_m_fast, windowed_v};
use yukawa_core::specfun::{k0, k1, lambert_w0};
use yukawa_core::{KernelKind, ScaleWindow};

fn bessel(c: &mut Criterion) {
    let mut group = c.benchmark_group("bessel");
    for &x in &ARGUMENTS {
        group.bench_with_input(BenchmarkId::new("k0", x), &x, |b, &x| b.iter(|| k0(black_box(x))));
        group.bench_with_input(BenchmarkId::new("k1", x), &x, |b, &x| b.iter(|| k1(black_box(x))));
    }
    group.finish();
    c.bench_function("lambert_w0", |b| b.iter(|| lambert_w0(black_box(-0.3))));
}

fn mixture(c: &mut Criterion) {
    let mut group = c.benchmark_group("mixture_m");
    for &s in &ARGUMENTS {
        group.bench_with_input(BenchmarkId::new("quadrature", s), &s, |b, &s| b.iter(|| mixture_m(black_box(s))));
        group.bench_with_input(BenchmarkId::new("table", s), &s, |b, &s| b.iter(|| mixture_m_fast(black_box(s))));
    }
    group.finish();
}

fn hat(c: &mut Criterion) {
    c.bench_function("euclid_hat", |b| b.iter(|| euclid_hat(black_box(0.5))));
    let window = ScaleWindow::new(1e-3, 1.0).unwrap();
    c.bench_function("windowed_v_hat", |b| {
        b.iter(|| windowed_v(KernelKind::EuclidHat, window, black_box(0.2)))
    });
}

criterion_group!(benches, bessel, mixture, hat);
criterion_main!(benches);
