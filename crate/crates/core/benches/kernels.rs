use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use parm_core::fisher::{CSpec, FisherProblem};
use parm_core::manifold::{solve_homological, BlockInverse, BlockSystem, LinearData, ManifoldApprox};
use parm_core::manifold_validation::validate_manifold;
use parm_core::orbit::search_theta;
use parm_core::par::Exec;
use parm_core::Interval;
use std::hint::black_box;

const MODES: [(&str, Exec); 2] = [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)];

fn dec(s: &str) -> Interval {
    Interval::from_decimal(s).unwrap()
}

fn origin_2d(k: usize) -> (FisherProblem, LinearData) {
    let prob = FisherProblem::new(dec("2.1"), CSpec::Constant, k, dec("1.01")).unwrap();
    let lin = LinearData::origin(&prob, 2, vec![dec("0.01"), dec("0.04")]).unwrap();
    (prob, lin)
}

fn chart(k: usize, order: [usize; 2]) -> ManifoldApprox {
    let (prob, lin) = origin_2d(k);
    solve_homological(&lin, &prob, &order, Exec::Sequential).unwrap()
}

fn homological(c: &mut Criterion) {
    let (prob, lin) = origin_2d(20);
    let mut g = c.benchmark_group("solve_homological");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, "K20_M5x20"), |b| {
            b.iter(|| solve_homological(black_box(&lin), &prob, &[5, 20], exec).unwrap())
        });
    }
    g.finish();
}

fn block_inverse(c: &mut Criterion) {
    let sys = BlockSystem::new(&chart(12, [3, 10]));
    let mut g = c.benchmark_group("block_inverse");
    g.sample_size(20);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, "K12_M3x10"), |b| {
            b.iter(|| BlockInverse::new(black_box(&sys), exec).unwrap())
        });
    }
    g.finish();
}

fn validation(c: &mut Criterion) {
    let approx = chart(12, [3, 10]);
    let mut g = c.benchmark_group("validate_manifold");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, "K12_M3x10"), |b| {
            b.iter(|| validate_manifold(black_box(&approx), exec).unwrap())
        });
    }
    g.finish();
}

fn theta_search(c: &mut Criterion) {
    let approx = chart(20, [5, 20]);
    let mut g = c.benchmark_group("search_theta");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, "101x101"), |b| {
            b.iter(|| search_theta(black_box(&approx), 101, exec))
        });
    }
    g.finish();
}

criterion_group!(benches, homological, block_inverse, validation, theta_search);
criterion_main!(benches);
