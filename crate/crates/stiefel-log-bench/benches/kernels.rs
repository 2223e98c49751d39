//! Microbenchmarks for the dense kernels that dominate a Newton solve:
//! the matrix exponential, the thin QR factorization, and the Sylvester
//! solve behind each correction step.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use stiefel_log::dense::{expm, frechet_expm_truncated, solve_sylvester, thin_qr};
use stiefel_log_bench::{random_skew, random_square, random_tall};

fn bench_expm(c: &mut Criterion) {
    let mut group = c.benchmark_group("expm");
    for &n in &[4usize, 8, 16, 32] {
        let a = random_skew(n, 1.5, 40 + n as u64);
        group.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| {
            b.iter(|| expm(black_box(a)).unwrap())
        });
    }
    group.finish();
}

fn bench_frechet_truncated(c: &mut Criterion) {
    let mut group = c.benchmark_group("frechet_expm_truncated");
    for &n in &[8usize, 32] {
        let a = random_skew(n, 1.0, 60 + n as u64);
        let e = expm(&a).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &(a, e), |b, (a, e)| {
            b.iter(|| frechet_expm_truncated(black_box(a), black_box(e)).unwrap())
        });
    }
    group.finish();
}

fn bench_thin_qr(c: &mut Criterion) {
    let mut group = c.benchmark_group("thin_qr");
    for &(n, p) in &[(100usize, 5usize), (500, 10), (1000, 10)] {
        let m = random_tall(n, p, 70 + n as u64);
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{n}x{p}")),
            &m,
            |b, m| b.iter(|| thin_qr(black_box(m)).unwrap()),
        );
    }
    group.finish();
}

fn bench_sylvester(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_sylvester");
    for &p in &[8usize, 16] {
        // Coefficients shaped like a Newton correction system: identity
        // plus skew plus a small symmetric part, well away from singular.
        let omega = random_skew(p, 0.8, 90 + p as u64);
        let sym = {
            let g = random_square(p, 0.1, 91 + p as u64);
            &g + &g.t()
        };
        let lhs_p = ndarray::Array2::eye(p) + &omega + &sym;
        let lhs_s = &omega * 0.5 - &sym;
        let rhs = random_square(p, 1.0, 92 + p as u64);
        group.bench_with_input(
            BenchmarkId::from_parameter(p),
            &(lhs_p, lhs_s, rhs),
            |b, (lp, ls, r)| {
                b.iter(|| solve_sylvester(black_box(lp), black_box(ls), black_box(r)).unwrap())
            },
        );
    }
    group.finish();
}

use stiefel_log::ndarray;

criterion_group!(
    kernels,
    bench_expm,
    bench_frechet_truncated,
    bench_thin_qr,
    bench_sylvester
);
criterion_main!(kernels);
