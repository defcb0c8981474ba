use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ends_splitter::ends::{end_classes, EndFunction};
use ends_splitter::harmonic::{solve_dirichlet, spectral_gap, SolverConfig};
use ends_splitter::necks::{find_necks, special_sets};
use ends_splitter::walls::{analyze_walls, WallOptions};
use ends_splitter::{build_net, build_truncation, Presentation};

fn truncation(c: &mut Criterion) {
    let mut g = c.benchmark_group("truncation");
    for rho in [8u32, 10, 12] {
        g.bench_with_input(BenchmarkId::new("f2", rho), &rho, |b, &rho| {
            b.iter(|| build_truncation(&Presentation::free(2), black_box(rho)).unwrap())
        });
    }
    g.finish();
}

fn solve(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve");
    g.sample_size(10);
    for rho in [8u32, 10, 12] {
        let t = Arc::new(build_truncation(&Presentation::free(2), rho).unwrap());
        let classes = end_classes(&t, 1).unwrap();
        let chi = EndFunction::first_letter(&t, &classes, 'a').unwrap();
        g.bench_with_input(BenchmarkId::new("f2_first_letter", rho), &rho, |b, _| {
            b.iter(|| solve_dirichlet(&t, &classes, &chi, &SolverConfig::default()).unwrap())
        });
    }
    g.finish();
}

fn necks(c: &mut Criterion) {
    let t = build_truncation(&Presentation::free(2), 10).unwrap();
    let classes = end_classes(&t, 1).unwrap();
    let chi = EndFunction::first_letter(&t, &classes, 'a').unwrap();
    let net = build_net(&t, 2).unwrap();
    c.bench_function("necks/f2_radius_10", |b| {
        b.iter(|| {
            let search = find_necks(&t, &net, &classes, 1, None).unwrap();
            special_sets(&t, &search, &classes, &chi).unwrap()
        })
    });
}

fn walls(c: &mut Criterion) {
    let t = Arc::new(build_truncation(&Presentation::free(2), 10).unwrap());
    let classes = end_classes(&t, 1).unwrap();
    let chi = EndFunction::first_letter(&t, &classes, 'a').unwrap();
    let h = solve_dirichlet(&t, &classes, &chi, &SolverConfig::default()).unwrap();
    let opts = WallOptions { sample_radius: 2, ..WallOptions::default() };
    let mut g = c.benchmark_group("walls");
    g.sample_size(10);
    g.bench_function("f2_radius_10_sample_2", |b| b.iter(|| analyze_walls(&h, &opts).unwrap()));
    g.finish();
}

fn spectral(c: &mut Criterion) {
    let t = build_truncation(&Presentation::free(2), 7).unwrap();
    let mut g = c.benchmark_group("spectral");
    g.sample_size(10);
    g.bench_function("f2_radius_7", |b| b.iter(|| spectral_gap(&t).unwrap()));
    g.finish();
}

criterion_group!(benches, truncation, solve, necks, walls, spectral);
criterion_main!(benches);
