mod support;

use gpminer::miner::Pruning;
use support::*;

fn check(seed: u64, cfg: &gpminer::miner::MinerConfig) -> (usize, usize, usize) {
    let graph = random_graph(seed);
    let store = mine(&graph, cfg, &test_ranges(), seed);
    let expected = Oracle::new(&graph, &store, cfg).expected();
    let got = summary(&store);
    let missing: Vec<_> = expected.difference(&got).take(5).collect();
    let extra: Vec<_> = got.difference(&expected).take(5).collect();
    assert!(
        missing.is_empty() && extra.is_empty(),
        "seed {seed} {cfg:?}: missing {missing:#?}\nextra {extra:#?}"
    );
    let deep = store.patterns().filter(|p| p.pattern.generation >= 2).count();
    let ranged = store.patterns().filter(|p| p.canonical.contains('~')).count();
    (got.len(), deep, ranged)
}

#[test]
fn miner_matches_brute_force_on_random_graphs() {
    let (mut deep, mut ranged) = (0, 0);
    for seed in 0..24u64 {
        let cfg = config(1 + (seed % 3) as usize, 1 + (seed / 3 % 3) as usize);
        let (_, d, r) = check(seed, &cfg);
        deep += d;
        ranged += r;
    }
    assert!(deep > 0, "no pattern reached generation 2");
    assert!(ranged > 0, "no value-range pattern was mined");
}

#[test]
fn brute_force_agreement_without_reduction_filter() {
    for seed in 100..112u64 {
        let mut cfg = config(2 + (seed % 2) as usize, 2);
        cfg.require_reduction = false;
        cfg.max_length = 3;
        check(seed, &cfg);
    }
}

#[test]
fn brute_force_agreement_dedup_only() {
    for seed in 200..212u64 {
        let mut cfg = config(1 + (seed % 3) as usize, 3);
        cfg.pruning = Pruning::DedupOnly;
        check(seed, &cfg);
    }
}
