use chsh_vertical::optimizer::{lambda_grid, maximize_bound, sweep_lambda};
use chsh_vertical::states::random_density;
use chsh_vertical::{Execution, OptimizerConfig};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn single_state(c: &mut Criterion) {
    let rho = random_density(1);
    let mut group = c.benchmark_group("maximize_bound");
    for (name, execution) in MODES {
        let cfg = OptimizerConfig {
            execution,
            ..OptimizerConfig::default()
        };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| maximize_bound(&rho, &cfg).unwrap())
        });
    }
    group.finish();
}

fn lambda_sweep(c: &mut Criterion) {
    let grid = lambda_grid(0.1);
    let mut group = c.benchmark_group("sweep_lambda");
    group.sample_size(10);
    for (name, execution) in MODES {
        let cfg = OptimizerConfig {
            execution,
            ..OptimizerConfig::default()
        };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| sweep_lambda(&grid, &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, single_state, lambda_sweep);
criterion_main!(benches);
