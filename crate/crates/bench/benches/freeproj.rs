use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use freeproj::complex::enumerate_spaces;
use freeproj::rigidity::{canonicalize, reconstruct_full, Params};
use freeproj::spectra::{
    closed_spectrum, gamma2_from_graph, gamma2_recursive, spectrum_from_gamma,
};
use freeproj::{build_bipartite, ComplexSpec, RingSpec};

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate");
    for s in [
        RingSpec::zmod(2, 2).unwrap(),
        RingSpec::tpoly(2, 2).unwrap(),
        RingSpec::zmod(3, 2).unwrap(),
    ] {
        let spec = ComplexSpec::new(s, 3).unwrap();
        group.bench_function(format!("{} d=3 lines", s.label()), |b| {
            b.iter(|| enumerate_spaces(black_box(&spec), 1).unwrap().len())
        });
    }
    let spec = ComplexSpec::new(RingSpec::zmod(2, 2).unwrap(), 4).unwrap();
    group.bench_function("zmod:2:2 d=4 planes", |b| {
        b.iter(|| enumerate_spaces(black_box(&spec), 2).unwrap().len())
    });
    group.finish();
}

fn canonical(c: &mut Criterion) {
    let mut group = c.benchmark_group("canonicalize");
    group.sample_size(10);
    for s in [
        RingSpec::zmod(2, 2).unwrap(),
        RingSpec::tpoly(2, 2).unwrap(),
    ] {
        let g = build_bipartite(&ComplexSpec::new(s, 3).unwrap(), 1, 2)
            .unwrap()
            .graph()
            .clone();
        let (shuffled, _) = g.shuffled(7);
        group.bench_function(format!("{} X12", s.label()), |b| {
            b.iter(|| canonicalize(black_box(&shuffled)).unwrap())
        });
    }
    group.finish();
}

fn spectrum(c: &mut Criterion) {
    let mut group = c.benchmark_group("spectrum");
    group.bench_function("closed d=4 n=2", |b| {
        b.iter(|| closed_spectrum(4, black_box(2), 2, 2).unwrap())
    });
    let cs4 = ComplexSpec::new(RingSpec::zmod(2, 2).unwrap(), 4).unwrap();
    group.bench_function("recursive d=4 n=2", |b| {
        b.iter(|| {
            let g = gamma2_recursive(4, black_box(2), 2, 2, 1 << 20).unwrap();
            spectrum_from_gamma(&g, cs4.layer_size(2)).unwrap()
        })
    });
    let cs3 = ComplexSpec::new(RingSpec::zmod(2, 2).unwrap(), 3).unwrap();
    let x = build_bipartite(&cs3, 1, 2).unwrap();
    group.bench_function("graph d=3 n=2", |b| {
        b.iter(|| {
            let g = gamma2_from_graph(black_box(&x)).unwrap();
            spectrum_from_gamma(&g, cs3.layer_size(2)).unwrap()
        })
    });
    group.finish();
}

fn reconstruction(c: &mut Criterion) {
    let mut group = c.benchmark_group("reconstruct");
    group.sample_size(10);
    let x = build_bipartite(
        &ComplexSpec::new(RingSpec::zmod(2, 2).unwrap(), 4).unwrap(),
        1,
        2,
    )
    .unwrap();
    let (input, _) = x.graph().shuffled(3);
    group.bench_function("zmod:2:2 d=4 from X12", |b| {
        b.iter(|| reconstruct_full(black_box(&input), Params::new(4, 2, 2)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, enumeration, canonical, spectrum, reconstruction);
criterion_main!(benches);
