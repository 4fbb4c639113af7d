use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lpf_core::{build_grid, center, lowpass_cloud, project, sor, synthetic, FilterSpec, ShtPlan, SorParams};

fn sht(c: &mut Criterion) {
    let mut group = c.benchmark_group("sht");
    group.sample_size(20);
    for bandlimit in [64, 100] {
        let grid = build_grid(bandlimit).unwrap();
        let plan = ShtPlan::new(grid);
        let (cloud, _) = center(&synthetic::airplane(1024, 1)).unwrap();
        let field = project(&cloud, &grid).unwrap();
        let coeffs = plan.forward(&field).unwrap();
        group.bench_with_input(BenchmarkId::new("forward", bandlimit), &field, |b, f| {
            b.iter(|| plan.forward(black_box(f)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("inverse", bandlimit), &coeffs, |b, c| {
            b.iter(|| plan.inverse(black_box(c)).unwrap())
        });
    }
    group.finish();
}

fn projection(c: &mut Criterion) {
    let grid = build_grid(100).unwrap();
    let (cloud, _) = center(&synthetic::airplane(2048, 2)).unwrap();
    c.bench_function("project/2048@100", |b| b.iter(|| project(black_box(&cloud), &grid).unwrap()));
}

fn pipeline(c: &mut Criterion) {
    let cloud = synthetic::airplane(1024, 3);
    let filter = FilterSpec::gaussian(20.0).unwrap();
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    group.bench_function("lowpass/1024@100", |b| {
        b.iter(|| lowpass_cloud(black_box(&cloud), &filter, 100, 1024, 0).unwrap())
    });
    let params = SorParams { k: 2, alpha: 1.1 };
    group.bench_function("sor/1024", |b| b.iter(|| sor(black_box(&cloud), &params).unwrap()));
    group.finish();
}

criterion_group!(benches, sht, projection, pipeline);
criterion_main!(benches);
