//! Sequential versus data-parallel execution on the three hot loops: Cayley
//! ball BFS, exhaustive representation verification, and deviation rows.

use std::hint::black_box;

use cayley_core::measurement::{measure_h, MeasureOptions};
use cayley_core::metrics::ball;
use cayley_core::par::Exec;
use cayley_core::representations::{verify_rep, CayleyRep, RepSpec, VerifyOptions};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn rep(name: &str) -> CayleyRep {
    RepSpec::from_name(name).and_then(|s| s.build()).expect("built-in representation")
}

fn balls(c: &mut Criterion) {
    let mut group = c.benchmark_group("ball");
    group.sample_size(10);
    for (name, radius) in [("heisenberg", 9), ("lamplighter", 11)] {
        let g = rep(name).group().clone();
        for (label, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(label, format!("{name}/r{radius}")), &radius, |b, &r| {
                b.iter(|| ball(black_box(&g), r, 10_000_000, exec).expect("ball under cap").len())
            });
        }
    }
    group.finish();
}

fn verification(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify_rep");
    group.sample_size(10);
    for (name, k) in [("heisenberg-s", 8), ("z-free-z", 10)] {
        let r = rep(name);
        for (label, exec) in POLICIES {
            let mut opts = VerifyOptions::new(k);
            opts.exec = exec;
            group.bench_function(BenchmarkId::new(label, format!("{name}/k{k}")), |b| {
                b.iter(|| verify_rep(black_box(&r), &opts).expect("verification runs").passed)
            });
        }
    }
    group.finish();
}

fn deviation(c: &mut Criterion) {
    let mut group = c.benchmark_group("measure_h");
    group.sample_size(10);
    for (name, n) in [("binary-z-s", 16), ("lamplighter-s", 8)] {
        let r = rep(name);
        for (label, exec) in POLICIES {
            let opts = MeasureOptions { exec, ..MeasureOptions::default() };
            group.bench_function(BenchmarkId::new(label, format!("{name}/n{n}")), |b| {
                b.iter(|| measure_h(black_box(&r), n, &opts).expect("measurement runs").rows.len())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, balls, verification, deviation);
criterion_main!(benches);
