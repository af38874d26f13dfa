use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use matfrechet::conditioning::{kronecker_second_frechet, KroneckerOptions};
use matfrechet::engine::{frechet, FrechetOptions, Path};
use matfrechet::functions::{catalog_lookup, FunctionId};
use matfrechet::gallery::{generate, lesp, random_directions, DirectionKind, GalleryMatrix, GalleryParams};
use matfrechet::linalg::lu_factor;
use matfrechet::reference::{frechet_complex_step, frechet_hr};

fn paths(c: &mut Criterion) {
    let f = catalog_lookup(FunctionId::Exp);
    let mut g = c.benchmark_group("path");
    for n in [25usize, 50, 100] {
        let a = lesp(n);
        let d = random_directions(DirectionKind::UnitPairs, n, 3, 4);
        for path in [Path::Dense, Path::RankOne] {
            let opts = FrechetOptions { path: Some(path), ..FrechetOptions::default() };
            g.bench_with_input(BenchmarkId::new(path.name(), n), &n, |b, _| {
                b.iter(|| frechet(&f, black_box(&a), &d, &opts).unwrap())
            });
        }
    }
    g.finish();
}

fn order(c: &mut Criterion) {
    let f = catalog_lookup(FunctionId::Exp);
    let a = lesp(50);
    let opts = FrechetOptions::default();
    let mut g = c.benchmark_group("order");
    for k in 1..=6 {
        let d = random_directions(DirectionKind::UnitPairs, 50, k, 9);
        g.bench_with_input(BenchmarkId::new("rank-one", k), &k, |b, _| {
            b.iter(|| frechet(&f, black_box(&a), &d, &opts).unwrap())
        });
    }
    g.finish();
}

fn methods(c: &mut Criterion) {
    let f = catalog_lookup(FunctionId::Exp);
    let a = lesp(16);
    let d = random_directions(DirectionKind::Dense, 16, 2, 1);
    let opts = FrechetOptions::default();
    let mut g = c.benchmark_group("method");
    g.bench_function("quad", |b| b.iter(|| frechet(&f, black_box(&a), &d, &opts).unwrap()));
    g.bench_function("hr", |b| b.iter(|| frechet_hr(&f, black_box(&a), &d).unwrap()));
    g.bench_function("cs", |b| b.iter(|| frechet_complex_step(&f, black_box(&a), &d, None).unwrap()));
    g.finish();
}

fn kronecker(c: &mut Criterion) {
    let f = catalog_lookup(FunctionId::InvSqrt);
    let opts = KroneckerOptions::default();
    let mut g = c.benchmark_group("kronecker");
    for n in [3usize, 5, 7] {
        let a = generate(GalleryMatrix::Kms, n, GalleryParams::default()).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| kronecker_second_frechet(&f, black_box(&a), &opts).unwrap())
        });
    }
    g.finish();
}

fn lu(c: &mut Criterion) {
    let mut g = c.benchmark_group("lu");
    for n in [32usize, 64, 128] {
        let a = generate(GalleryMatrix::Parter, n, GalleryParams::default()).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| b.iter(|| lu_factor(black_box(&a)).unwrap()));
    }
    g.finish();
}

fn config() -> Criterion {
    Criterion::default()
        .sample_size(10)
        .warm_up_time(Duration::from_millis(300))
        .measurement_time(Duration::from_secs(1))
}

criterion_group! {
    name = benches;
    config = config();
    targets = paths, order, methods, kronecker, lu
}
criterion_main!(benches);
