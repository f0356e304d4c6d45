//! Sequential versus rayon execution on the same random games.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use matchnuc::leastcore::{core_is_empty, decompose, solve_leastcore};
use matchnuc::maschler::nucleolus;
use matchnuc::oracle::{brute_nucleolus, random_game};
use matchnuc::{Execution, GameInstance, SolveOptions};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

/// First seeded game of the given size whose core is empty.
fn empty_core_game(nodes: usize) -> GameInstance {
    let options = SolveOptions::default();
    (0u64..)
        .map(|seed| random_game(seed, nodes))
        .find(|g| core_is_empty(&solve_leastcore(g, &options).unwrap()))
        .unwrap()
}

fn bench_nucleolus(c: &mut Criterion) {
    let mut group = c.benchmark_group("nucleolus");
    group.sample_size(10);
    for nodes in [7, 8] {
        let game = empty_core_game(nodes);
        for (name, execution) in MODES {
            let options = SolveOptions::default().with_execution(execution);
            group.bench_with_input(BenchmarkId::new(name, nodes), &game, |b, g| {
                b.iter(|| nucleolus(black_box(g), &options).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_decomposition(c: &mut Criterion) {
    let mut group = c.benchmark_group("decomposition");
    group.sample_size(10);
    let game = empty_core_game(8);
    for (name, execution) in MODES {
        let options = SolveOptions::default().with_execution(execution);
        group.bench_function(name, |b| b.iter(|| decompose(black_box(&game), &options).unwrap()));
    }
    group.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("brute_nucleolus");
    group.sample_size(10);
    let game = empty_core_game(7);
    for (name, execution) in MODES {
        let options = SolveOptions::default().with_execution(execution);
        group.bench_function(name, |b| b.iter(|| brute_nucleolus(black_box(&game), &options).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, bench_nucleolus, bench_decomposition, bench_oracle);
criterion_main!(benches);
