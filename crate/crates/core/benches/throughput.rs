//! Sequential against rayon execution for the three verification loops.
//!
//! Run with: cargo bench -p fracplane --bench throughput
//! Without the `parallel` feature both variants run sequentially.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use fracplane::discharge::{verify_discharge, DischargeContext};
use fracplane::indsets::{count_mis, CoreSets, Scope};
use fracplane::par::Exec;
use fracplane::tiling::verify_tilings;
use fracplane::udgraph::build_core;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn discharge(c: &mut Criterion) {
    let ctx = DischargeContext::new(8);
    let mut g = c.benchmark_group("discharge_gpd8_64");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| black_box(verify_discharge(&ctx, CoreSets::Sampled { samples: 64, seed: 1 }, exec)))
        });
    }
    g.finish();
}

fn tiling(c: &mut Criterion) {
    let mut g = c.benchmark_group("tiling_c8_500");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| black_box(verify_tilings(8, CoreSets::Sampled { samples: 500, seed: 1 }, exec)))
        });
    }
    g.finish();
}

fn enumeration(c: &mut Criterion) {
    let core = build_core(3);
    let mut g = c.benchmark_group("mis_count_c3");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| black_box(count_mis(&core, Scope::CoreOnly, exec)))
        });
    }
    g.finish();
}

criterion_group!(benches, discharge, tiling, enumeration);
criterion_main!(benches);
