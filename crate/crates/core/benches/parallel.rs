//! Data-parallel core against a single-threaded pool on the same code path.
//!
//! Build with `--no-default-features` to time the sequential fallback
//! instead; both arms then run the same sequential loops.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use schottky_core::geom::{enumerate_classes, SchottkyData};
use schottky_core::trace::{kernel_difference_trace, KernelTraceOptions, RadialTestFunction};
use schottky_core::zeta::{Sigma, ZetaEngine};
use std::hint::black_box;

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    let all = rayon::current_num_threads();
    let mut v = vec![("1-thread", rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap())];
    if all > 1 {
        v.push(("all-threads", rayon::ThreadPoolBuilder::new().num_threads(all).build().unwrap()));
    }
    v
}

fn thin2() -> SchottkyData {
    SchottkyData::symmetric(2, 2.0, 0.1).unwrap()
}

fn classes(c: &mut Criterion) {
    let g = thin2();
    let mut group = c.benchmark_group("enumerate_classes");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new(name, 10), |b| {
            b.iter(|| pool.install(|| enumerate_classes(black_box(&g), 10).unwrap()))
        });
    }
    group.finish();
}

fn determinant(c: &mut Criterion) {
    let g = thin2();
    let engine = ZetaEngine::for_group(&g, 12).unwrap();
    let lambda = Complex64::new(-0.2, 0.7);
    let mut group = c.benchmark_group("zeta_determinant");
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new(name, 12), |b| {
            b.iter(|| pool.install(|| engine.zeta_determinant(Sigma::Trivial, black_box(lambda), 12).unwrap()))
        });
    }
    group.finish();
}

fn kernel_trace(c: &mut Criterion) {
    let g = thin2();
    let f = RadialTestFunction::heat(1.0).unwrap();
    let opts = KernelTraceOptions::default();
    let mut group = c.benchmark_group("kernel_difference_trace");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new(name, "t=1"), |b| {
            b.iter(|| pool.install(|| kernel_difference_trace(black_box(&g), &f, &opts).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, classes, determinant, kernel_trace);
criterion_main!(benches);
