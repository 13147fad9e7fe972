use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use drg_core::families::{catalog, member};
use drg_core::fock::mixed_moment_finite;
use drg_core::limits::{family_closed_form, regime_measure};
use drg_core::oracle::{build, empirical_spectrum};
use drg_core::params::spectral_table;
use drg_core::qseries::rat;
use drg_core::{EpsilonWord, GraphSpec, Preset};

fn spectral(c: &mut Criterion) {
    let grassmann = member(catalog(2)[0], 12).unwrap().cp;
    c.bench_function("spectral_table/grassmann_d12", |b| b.iter(|| spectral_table(black_box(&grassmann)).unwrap()));
    let t = rat(1, 64);
    let w: EpsilonWord = "+o-o".parse().unwrap();
    c.bench_function("mixed_moment_finite/d12_len4", |b| {
        b.iter(|| mixed_moment_finite(black_box(&grassmann), &t, &w).unwrap())
    });
}

fn limits(c: &mut Criterion) {
    let p = Preset::Grassmann { q: 2, delta: 1.0 };
    let regime = p.regime(0.5).unwrap();
    c.bench_function("limit/closed_form_j30", |b| b.iter(|| family_closed_form(black_box(p), 0.5, 30, 1e-14).unwrap()));
    c.bench_function("limit/generic_j30", |b| b.iter(|| regime_measure(black_box(&regime), 0, 30, 1e-14).unwrap()));
}

fn oracle(c: &mut Criterion) {
    let spec: GraphSpec = "grassmann:q=2,n=6,d=2".parse().unwrap();
    c.bench_function("oracle/build_j2_6_2", |b| b.iter(|| build(black_box(spec)).unwrap()));
    let g = build(spec).unwrap();
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    group.bench_function("spectrum_j2_6_2", |b| b.iter(|| empirical_spectrum(black_box(&g)).unwrap()));
    group.finish();
}

criterion_group!(benches, spectral, limits, oracle);
criterion_main!(benches);
