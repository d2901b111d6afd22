//! Sequential (one worker) against parallel (rayon pool) execution of the two
//! data-parallel workloads. Built without the `parallel` feature both
//! variants run sequentially.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use herald_core::analysis::sweep_with;
use herald_core::mc::{self, McConfig};
use herald_core::{DetectorParams, SqueezingParam, SweepGrid, TwoPortConfig, Workers};

const MODES: [(&str, Workers); 2] = [
    ("sequential", Workers::Count(1)),
    ("parallel", Workers::Auto),
];

fn bench_monte_carlo(c: &mut Criterion) {
    let det = DetectorParams::new(0.3, 1e-3).unwrap();
    let cfg = TwoPortConfig::symmetric(0.5, det).unwrap();
    let mc_cfg = McConfig::new(200_000, 42, SqueezingParam::new(0.3).unwrap(), cfg).unwrap();

    let mut group = c.benchmark_group("monte_carlo_200k");
    group.sample_size(20);
    for (name, workers) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &workers, |b, &w| {
            b.iter(|| mc::run_with(black_box(&mc_cfg), w).unwrap())
        });
    }
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let grid = SweepGrid::fig3(0.1);
    let mut group = c.benchmark_group("sweep_fig3_2500");
    group.sample_size(20);
    for (name, workers) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &workers, |b, &w| {
            b.iter(|| sweep_with(black_box(&grid), 1e-12, w).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_monte_carlo, bench_sweep);
criterion_main!(benches);
