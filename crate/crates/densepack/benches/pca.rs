use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use densepack::lattice::lookup;
use densepack::pca::full_cycle;
use densepack::{Configuration, Execution, PeriodicGraph, Pressure};

fn cycles(c: &mut Criterion) {
    let mut group = c.benchmark_group("full_cycle");
    for (name, side) in [("4^4", 200), ("3.6.3.6", 116), ("4.6.12", 58)] {
        let spec = lookup(name).unwrap();
        let g = Arc::new(PeriodicGraph::with_min_cells(spec, side).unwrap());
        group.throughput(Throughput::Elements(g.site_count() as u64));
        let start = Configuration::bernoulli(g.clone(), 0.3, 7);
        let pressure = Pressure::Uniform(0.8);
        for (label, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(label, name), &exec, |b, &exec| {
                let mut conf = start.clone();
                let mut t = 0;
                b.iter(|| {
                    full_cycle(&mut conf, &pressure, 1, t, exec);
                    t += 1;
                    black_box(conf.occupied_count())
                });
            });
        }
    }
    group.finish();
}

criterion_group!(benches, cycles);
criterion_main!(benches);
