//! Compares a single-thread rayon pool with the full pool on the two hot paths:
//! linear propagation of a large field and symbol-table quadrature.
//! Build with `--no-default-features` to measure the purely sequential code.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use levyheat::datum::random_band_limited;
use levyheat::evolve::{propagate_linear, LinearPropagator};
use levyheat::kernels::{LevyKernel, NearProfile, TailProfile};
use levyheat::spectral::PeriodicGrid;
use levyheat::symbol::{build_symbol_table, log_grid};

fn pools() -> Vec<(String, rayon::ThreadPool)> {
    let full = rayon::current_num_threads();
    let mut v = vec![("1".to_string(), rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap())];
    if full > 1 {
        v.push((full.to_string(), rayon::ThreadPoolBuilder::new().num_threads(full).build().unwrap()));
    }
    v
}

fn propagate(c: &mut Criterion) {
    let mut group = c.benchmark_group("propagate");
    let grid = PeriodicGrid::new(2, 16.0, 512).unwrap();
    let p = LinearPropagator::from_kernel(&LevyKernel::pure_power(2, 1.0).unwrap(), grid).unwrap();
    let u0 = random_band_limited(&grid, 40, 3).unwrap();
    for (label, pool) in pools() {
        group.bench_with_input(BenchmarkId::new("threads", &label), &pool, |b, pool| {
            b.iter(|| pool.install(|| propagate_linear(&p, black_box(&u0), 1.0).unwrap()))
        });
    }
    group.finish();
}

fn symbol_table(c: &mut Criterion) {
    let mut group = c.benchmark_group("symbol_table");
    group.sample_size(10);
    let k = LevyKernel::new(1, NearProfile::Borderline, TailProfile::PowerTail { alpha: 1.0 }).unwrap();
    let grid = log_grid(1e-2, 1e3, 16);
    for (label, pool) in pools() {
        group.bench_with_input(BenchmarkId::new("threads", &label), &pool, |b, pool| {
            b.iter(|| pool.install(|| build_symbol_table(&k, black_box(&grid)).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, propagate, symbol_table);
criterion_main!(benches);
