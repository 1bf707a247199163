use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use chaoswalk::coin::sample_cue;
use chaoswalk::par::Execution;
use chaoswalk::walk::{coin_density_with, walker_density_with, SectorBlocks, SectorState, WalkConfig, WalkerBasis};

const STEPS: usize = 20;

fn modes() -> Vec<(&'static str, Execution)> {
    let mut v = vec![("sequential", Execution::Sequential)];
    if cfg!(feature = "parallel") {
        v.push(("parallel", Execution::Parallel));
    }
    v
}

fn evolution(c: &mut Criterion) {
    let mut group = c.benchmark_group("advance");
    for (m, n) in [(64, 101), (256, 101), (100, 21)] {
        let cfg = WalkConfig::new(sample_cue(m, 7).unwrap(), n).unwrap();
        let blocks = SectorBlocks::new(&cfg);
        let start = SectorState::initial(&cfg);
        for (label, exec) in modes() {
            group.bench_with_input(BenchmarkId::new(label, format!("M{m}_N{n}")), &exec, |b, &exec| {
                b.iter(|| {
                    let mut s = start.clone();
                    s.advance(&blocks, STEPS, exec);
                    s
                })
            });
        }
    }
    group.finish();
}

fn densities(c: &mut Criterion) {
    let mut group = c.benchmark_group("reduced_density");
    let cfg = WalkConfig::new(sample_cue(100, 7).unwrap(), 101).unwrap();
    let mut state = SectorState::initial(&cfg);
    state.advance(&SectorBlocks::new(&cfg), 50, Execution::default());
    for (label, exec) in modes() {
        group.bench_function(BenchmarkId::new(label, "coin"), |b| b.iter(|| coin_density_with(&state, exec)));
        group.bench_function(BenchmarkId::new(label, "walker"), |b| {
            b.iter(|| walker_density_with(&state, WalkerBasis::Position, exec))
        });
    }
    group.finish();
}

criterion_group!(benches, evolution, densities);
criterion_main!(benches);
