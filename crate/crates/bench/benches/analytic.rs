use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use mpath_bench::{analytic_schemes, balanced};
use mpath_core::age::paoi_curve;
use mpath_core::latency::latency_curve;
use mpath_core::queue::solve_sigma;
use mpath_core::Quality;

fn sigma(c: &mut Criterion) {
    c.bench_function("solve_sigma grid", |b| {
        b.iter(|| {
            for a in [1.01, 1.1, 1.5, 2.0, 4.0, 10.0, 50.0] {
                black_box(solve_sigma(black_box(a)).unwrap());
            }
        })
    });
}

fn latency_p99(c: &mut Criterion) {
    let mut g = c.benchmark_group("latency p99");
    for scheme in analytic_schemes() {
        let cfg = balanced(scheme, 1.5, 0.2);
        let q = *scheme.qualities().last().unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(scheme.label()), &cfg, |b, cfg| {
            b.iter(|| latency_curve(cfg, q).unwrap().percentile(0.99))
        });
    }
    g.finish();
}

fn paoi_p99(c: &mut Criterion) {
    let mut g = c.benchmark_group("paoi p99");
    g.sample_size(20);
    for scheme in analytic_schemes() {
        let cfg = balanced(scheme, 1.5, 0.2);
        let q = if scheme.qualities().len() > 1 { Quality::Hq } else { Quality::Whole };
        g.bench_with_input(BenchmarkId::from_parameter(scheme.label()), &cfg, |b, cfg| {
            b.iter(|| paoi_curve(cfg, q).unwrap().percentile(0.99))
        });
    }
    g.finish();
}

criterion_group!(benches, sigma, latency_p99, paoi_p99);
criterion_main!(benches);
