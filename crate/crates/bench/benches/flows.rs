use std::f64::consts::PI;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use yukawa_bench::ring_flow;
use yukawa_core::majorant::{cn_system, tau_k};
use yukawa_core::ursell::ursell_flow;
use yukawa_core::{KernelKind, MajorantParams, OdeGridSpec, ScaleWindow, Variant};

fn ursell(c: &mut Criterion) {
    let grid = OdeGridSpec::default();
    let mut group = c.benchmark_group("ursell_flow");
    group.sample_size(10);
    for n in [2, 4, 6] {
        let ctx = ring_flow(n, KernelKind::EuclidHat);
        group.bench_with_input(BenchmarkId::from_parameter(n), &ctx, |b, ctx| b.iter(|| ursell_flow(ctx, &grid)));
    }
    group.finish();
}

fn majorant(c: &mut Criterion) {
    let grid = OdeGridSpec::default();
    let window = ScaleWindow::to_infinity(1e-3).unwrap();
    let mut group = c.benchmark_group("majorant");
    group.sample_size(10);
    for variant in [Variant::Plain, Variant::Lagrange, Variant::Improved] {
        let params = MajorantParams::new(5.0 * PI, 3, window, variant);
        group.bench_function(format!("cn_system/{variant:?}"), |b| b.iter(|| cn_system(&params, &grid)));
    }
    group.bench_function("tau_k", |b| b.iter(|| tau_k(5.0 * PI, 3, window)));
    group.finish();
}

criterion_group!(benches, ursell, majorant);
criterion_main!(benches);
