use criterion::{black_box, criterion_group, criterion_main, Criterion};

use bloch_bench::{mother_system, CERTIFY_POINT, COUNT_POINT};
use bloch_core::bands::{eval_bands, find_critical_points};
use bloch_core::critical::count_critical_points;
use bloch_core::polytope::{mixed_volume, system_polytopes};
use bloch_core::*;

fn symbolic(c: &mut Criterion) {
    c.bench_function("symbol+system/mother", |b| {
        b.iter(|| build_system(&build_symbol(black_box(&mother()), Convention::Divergence).unwrap()).unwrap())
    });
    let sys = mother_system();
    c.bench_function("mixed_volume/mother", |b| {
        b.iter(|| mixed_volume(&system_polytopes(black_box(&sys), None).unwrap()).unwrap())
    });
}

fn groebner(c: &mut Criterion) {
    let sys = mother_system();
    let opts = GroebnerOptions::default();
    let mut g = c.benchmark_group("groebner");
    g.sample_size(10);
    g.bench_function("degeneracy/prime", |b| {
        b.iter(|| degeneracy_test(&sys, black_box(&CERTIFY_POINT), FieldChoice::Prime(poly::DEFAULT_PRIME), opts).unwrap())
    });
    g.bench_function("degeneracy/rational", |b| {
        b.iter(|| degeneracy_test(&sys, black_box(&CERTIFY_POINT), FieldChoice::Rational, opts).unwrap())
    });
    g.bench_function("count/prime", |b| {
        b.iter(|| count_critical_points(&sys, black_box(&COUNT_POINT), FieldTag::Prime(poly::DEFAULT_PRIME), opts).unwrap())
    });
    g.finish();
}

fn bands(c: &mut Criterion) {
    let alpha: Vec<f64> = COUNT_POINT.iter().map(|&a| a as f64).collect();
    let model = BandModel::new(&mother(), &alpha, Convention::Divergence).unwrap();
    let opts = BandOptions::default();
    c.bench_function("bands/grid128", |b| b.iter(|| eval_bands(black_box(&model), &opts).unwrap()));
    let grid = eval_bands(&model, &opts).unwrap();
    c.bench_function("bands/critical128", |b| b.iter(|| find_critical_points(black_box(&model), &grid, &opts)));
}

criterion_group!(benches, symbolic, groebner, bands);
criterion_main!(benches);
