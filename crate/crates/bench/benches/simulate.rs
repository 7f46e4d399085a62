use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use mpath_bench::balanced;
use mpath_core::sim::{extract_paoi, run};
use mpath_core::{Quality, Scheme};

const FRAMES: usize = 100_000;

fn simulate(c: &mut Criterion) {
    let mut g = c.benchmark_group("simulate");
    g.sample_size(20);
    g.throughput(Throughput::Elements(FRAMES as u64));
    for scheme in [Scheme::Alternating, Scheme::Split, Scheme::QueueBased] {
        let cfg = balanced(scheme, 1.5, 0.2);
        g.bench_with_input(BenchmarkId::from_parameter(scheme.label()), &cfg, |b, cfg| {
            b.iter(|| run(cfg, FRAMES, 1).unwrap())
        });
    }
    g.finish();
}

fn paoi_extraction(c: &mut Criterion) {
    let trace = run(&balanced(Scheme::Alternating, 1.0, 0.2), FRAMES, 1).unwrap();
    c.bench_function("extract_paoi alternating", |b| b.iter(|| extract_paoi(&trace, Quality::Whole).unwrap()));
}

criterion_group!(benches, simulate, paoi_extraction);
criterion_main!(benches);
