use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use perctree::genealogy::build_forest;
use perctree::kuczek::break_points;
use perctree::paths::rightmost_path;
use perctree::reach::{percolates_to, AliveField};
use perctree::rows::masks;
use perctree_bench::{env, origin, window};

fn row_masks(c: &mut Criterion) {
    let env = env();
    let mut g = c.benchmark_group("row_masks");
    for len in [64usize, 1024, 16384] {
        g.bench_with_input(BenchmarkId::from_parameter(len), &len, |b, &len| {
            b.iter(|| masks(&env, black_box(17), -(len as i64) / 2, len))
        });
    }
    g.finish();
}

fn alive_field(c: &mut Criterion) {
    let env = env();
    let mut g = c.benchmark_group("alive_field_full_cone");
    g.sample_size(10);
    for n in [250i64, 1000, 4000] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| AliveField::over_cones(&env, &[origin()], black_box(n)))
        });
    }
    g.finish();
}

// heights above a few band widths go through the banded sweep
fn rightmost(c: &mut Criterion) {
    let env = env();
    let mut g = c.benchmark_group("rightmost_path");
    g.sample_size(10);
    for n in [250i64, 1000, 4000, 16000] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| rightmost_path(origin(), black_box(n), &env).unwrap())
        });
    }
    g.finish();
}

fn survival_and_breaks(c: &mut Criterion) {
    let env = env();
    let mut g = c.benchmark_group("kuczek");
    g.sample_size(10);
    g.bench_function("percolates_to/16000", |b| {
        b.iter(|| percolates_to(origin(), black_box(16000), &env).unwrap())
    });
    g.bench_function("break_points/4000", |b| {
        b.iter(|| break_points(origin(), &env, black_box(4000), 800).unwrap())
    });
    g.finish();
}

fn forest(c: &mut Criterion) {
    let env = env();
    let mut g = c.benchmark_group("build_forest");
    g.sample_size(10);
    for r in [20i64, 40] {
        g.bench_with_input(BenchmarkId::from_parameter(r), &r, |b, &r| {
            b.iter(|| build_forest(window(r), black_box(10 * r), &env).unwrap())
        });
    }
    g.finish();
}

criterion_group!(
    benches,
    row_masks,
    alive_field,
    rightmost,
    survival_and_breaks,
    forest
);
criterion_main!(benches);
