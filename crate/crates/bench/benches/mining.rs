use std::hint::black_box;
use std::sync::atomic::AtomicBool;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gpminer::base::compute_base_patterns;
use gpminer::miner::{discover, MinerConfig, NoCheckpoint};
use gpminer::ranges::{cluster_and_generalize, fit_gmm, RangeConfig};
use gpminer::rdf::{build_graph, parse_ntriples, ParseMode, RDF_TYPE};
use gpminer_bench::{registry, registry_source};

fn ingest(c: &mut Criterion) {
    let src = registry_source(2_000, 1);
    c.bench_function("ingest/2000", |b| {
        b.iter(|| {
            let parsed = parse_ntriples(black_box(src.as_bytes()), ParseMode::Strict).unwrap();
            build_graph(&parsed.triples, RDF_TYPE).unwrap()
        })
    });
}

fn base_patterns(c: &mut Criterion) {
    let g = registry(1_000, 2);
    c.bench_function("base/1000", |b| b.iter(|| compute_base_patterns(&g, 10, &RangeConfig::default(), 0)));
}

fn mining(c: &mut Criterion) {
    let mut group = c.benchmark_group("discover");
    group.sample_size(10);
    for n in [200, 800] {
        let g = registry(n, 3);
        let base = compute_base_patterns(&g, n / 20, &RangeConfig::default(), 0);
        let cfg = MinerConfig { min_support: n / 20, ..MinerConfig::default() };
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| {
                let mut store = base.clone();
                discover(&g, &mut store, &cfg, &AtomicBool::new(false), &mut NoCheckpoint).unwrap();
                store.len()
            })
        });
    }
    group.finish();
}

fn value_ranges(c: &mut Criterion) {
    let values: Vec<f64> = (0..1_000).map(|i| if i % 2 == 0 { -5.0 } else { 5.0 } + (i as f64 * 0.37).sin()).collect();
    c.bench_function("gmm/1000", |b| b.iter(|| fit_gmm(black_box(&values), 5, 3, 0)));
    let names: Vec<String> = (0..1_000).map(|i| format!("name{} x{}", "a".repeat(i % 9), i % 97)).collect();
    c.bench_function("regex/1000", |b| b.iter(|| cluster_and_generalize(black_box(&names), 1.0)));
}

criterion_group!(benches, ingest, base_patterns, mining, value_ranges);
criterion_main!(benches);
