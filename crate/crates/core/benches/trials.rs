use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use germoid::experiments::run_cross;
use germoid::finite::FiniteGroupoid;
use germoid::par::Execution;
use germoid::perm::PermGroup;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn cross_trials(c: &mut Criterion) {
    let mut group = c.benchmark_group("cross_trials");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, 100), &exec, |b, &exec| b.iter(|| run_cross(100, 1, exec).unwrap()));
    }
    group.finish();
}

fn key_inequality(c: &mut Criterion) {
    let g = FiniteGroupoid::transformation(4, &PermGroup::symmetric(4)).unwrap();
    let mut group = c.benchmark_group("key_inequality_s4");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, 200), &exec, |b, &exec| {
            b.iter(|| g.key_inequality_check(200, 1, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, cross_trials, key_inequality);
criterion_main!(benches);
