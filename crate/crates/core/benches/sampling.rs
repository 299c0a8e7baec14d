use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use randturn::percolation::{crossing_probability_mc, estimate_pivotal};
use randturn::{par, BoardGraph, GameKind, GamePosition, GameSpec};

fn pivotal_estimate(c: &mut Criterion) {
    let mut group = c.benchmark_group("estimate_pivotal");
    group.sample_size(10);
    for l in [5usize, 11] {
        let spec = Arc::new(GameSpec::without_precoloring(GameKind::Hex { rows: l, cols: l }).unwrap());
        let pos = GamePosition::new(spec, 0.5).unwrap();
        group.bench_with_input(BenchmarkId::new("parallel", l), &pos, |b, pos| {
            b.iter(|| estimate_pivotal(pos, 2000, 7).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", l), &pos, |b, pos| {
            b.iter(|| par::sequential(|| estimate_pivotal(pos, 2000, 7).unwrap()))
        });
    }
    group.finish();
}

fn crossing(c: &mut Criterion) {
    let board = BoardGraph::hex(11, 11).unwrap();
    let mut group = c.benchmark_group("crossing_probability_mc");
    group.sample_size(10);
    group.bench_function("parallel", |b| b.iter(|| crossing_probability_mc(&board, 0.5, 20_000, 1).unwrap()));
    group.bench_function("sequential", |b| {
        b.iter(|| par::sequential(|| crossing_probability_mc(&board, 0.5, 20_000, 1).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, pivotal_estimate, crossing);
criterion_main!(benches);
