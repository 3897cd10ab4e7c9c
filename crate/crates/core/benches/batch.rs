use std::sync::Arc;

use adic::decay::{from_level_stream, to_level_stream};
use adic::{par, random, theorem6_check, Field, ModulePresentation};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const VARS: [u32; 2] = [1, 2];

fn presentations() -> Vec<Arc<ModulePresentation>> {
    (0..16)
        .map(|k| Arc::new(random::presentation(&mut random::derive(0xbe, k), Field::Rational, &VARS, 2, 2, 2)))
        .collect()
}

fn completeness(m: &Arc<ModulePresentation>) -> bool {
    // Rebuilt so cached level data is not shared between runs.
    let m = ModulePresentation::new(m.field(), m.ideal().clone(), m.rank(), m.relations().to_vec()).unwrap();
    (0..=3).all(|level| theorem6_check(&m, level, 1).unwrap().passed())
}

fn round_trip(seed: &u64) -> bool {
    let s = random::decaying_stream(Field::Rational, &VARS, *seed, 1);
    let back = from_level_stream(&to_level_stream(&s, 6).unwrap(), 6).unwrap();
    back.agrees_with(&s, 6).unwrap()
}

fn batch(c: &mut Criterion) {
    let ms = presentations();
    let seeds: Vec<u64> = (0..32).collect();
    let mut group = c.benchmark_group("batch");
    group.sample_size(10);
    group.bench_function(BenchmarkId::new("completeness", "parallel"), |b| b.iter(|| par::map(&ms, completeness)));
    group.bench_function(BenchmarkId::new("completeness", "sequential"), |b| {
        b.iter(|| par::map_sequential(&ms, completeness))
    });
    group.bench_function(BenchmarkId::new("round_trip", "parallel"), |b| b.iter(|| par::map(&seeds, round_trip)));
    group.bench_function(BenchmarkId::new("round_trip", "sequential"), |b| {
        b.iter(|| par::map_sequential(&seeds, round_trip))
    });
    group.finish();
}

criterion_group!(benches, batch);
criterion_main!(benches);
