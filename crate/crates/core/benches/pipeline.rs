use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use xns11_core::curve::{RationalPoint, WeierstrassModel};
use xns11_core::heights::{canonical_height_with, TateSeries};
use xns11_core::par;
use xns11_core::periods::PeriodLattice;
use xns11_core::real::Precision;

fn multiples(n: i64) -> Vec<RationalPoint> {
    let e = WeierstrassModel::xns11();
    (1..=n).map(|m| e.mul(m, &RationalPoint::p0()).unwrap()).collect()
}

fn bench_heights(c: &mut Criterion) {
    let e = WeierstrassModel::xns11();
    let series = TateSeries::new(&e).unwrap();
    let prec = Precision::new(60).unwrap();
    let pts = multiples(24);
    let mut group = c.benchmark_group("canonical_height");
    let height = |p: &RationalPoint| canonical_height_with(&e, &series, p, prec).unwrap().value;
    group.bench_with_input(BenchmarkId::new("par_map", pts.len()), &pts, |b, pts| {
        b.iter(|| par::map(black_box(pts), height))
    });
    group.bench_with_input(BenchmarkId::new("map_seq", pts.len()), &pts, |b, pts| {
        b.iter(|| par::map_seq(black_box(pts), height))
    });
    group.finish();
}

fn bench_logs(c: &mut Criterion) {
    let e = WeierstrassModel::xns11();
    let pts = multiples(64);
    let mut group = c.benchmark_group("elliptic_log");
    for digits in [60u32, 120] {
        let lat = PeriodLattice::new(&e, Precision::new(digits).unwrap()).unwrap();
        let log = |p: &RationalPoint| lat.elliptic_log(p).unwrap().value;
        group.bench_with_input(BenchmarkId::new("par_map", digits), &pts, |b, pts| {
            b.iter(|| par::map(black_box(pts), log))
        });
        group.bench_with_input(BenchmarkId::new("map_seq", digits), &pts, |b, pts| {
            b.iter(|| par::map_seq(black_box(pts), log))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_heights, bench_logs);
criterion_main!(benches);
