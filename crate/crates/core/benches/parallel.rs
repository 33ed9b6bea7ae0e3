use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use padic_heisenberg::expr::parse_state;
use padic_heisenberg::modes::axioms;
use padic_heisenberg::modes::zero_mode_matrix_with;
use padic_heisenberg::modforms::{eisenstein_star_series, KummerChain};
use padic_heisenberg::onepoint::{z_function_with, TraceRoute};
use padic_heisenberg::{Exec, Prime};

const EXECS: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn traces(c: &mut Criterion) {
    let a = parse_state("h(-2)^2 h(-1)^2 vac + h(-3) h(-2) h(-1) vac", 30).unwrap();
    let mut g = c.benchmark_group("z_wick_q16");
    for (name, exec) in EXECS {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| z_function_with(black_box(&a), 16, TraceRoute::Wick, exec))
        });
    }
    g.finish();
}

fn matrices(c: &mut Criterion) {
    let a = parse_state("h(-2) h(-1)^2 vac", 30).unwrap();
    let mut g = c.benchmark_group("zero_mode_matrix_d10");
    for (name, exec) in EXECS {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| zero_mode_matrix_with(black_box(&a), 10, exec).unwrap())
        });
    }
    g.finish();
}

fn jacobi(c: &mut Criterion) {
    let mut g = c.benchmark_group("jacobi_20_trials");
    g.sample_size(10);
    for (name, exec) in EXECS {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| axioms::jacobi(20, 5, 2, 1, exec))
        });
    }
    g.finish();
}

fn star(c: &mut Criterion) {
    let chain = KummerChain::new(Prime::new(5).unwrap(), vec![6, 26, 126]).unwrap();
    let mut g = c.benchmark_group("eisenstein_star_q40");
    for (name, exec) in EXECS {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| eisenstein_star_series(black_box(&chain), 40, 2, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, traces, matrices, jacobi, star);
criterion_main!(benches);
