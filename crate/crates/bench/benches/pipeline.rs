use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use omf5::eigen::charpoly;
use omf5::hecke::{build_space, hecke_matrix, HeckeKind};
use omf5::isometry::automorphism_group;
use omf5::neighbours::{default_prime, enumerate_genus};
use omf5::weights::build_weight;
use omf5_bench::{genus, seed};

fn genus_stage(c: &mut Criterion) {
    let mut g = c.benchmark_group("genus");
    g.sample_size(10);
    g.bench_function("seed_search D=61", |b| b.iter(|| seed(black_box(61), 1)));
    let s61 = seed(61, 1);
    g.bench_function("enumerate D=61", |b| b.iter(|| enumerate_genus(black_box(&s61), default_prime(&s61)).unwrap()));
    let s89 = seed(89, 1);
    g.bench_function("enumerate D=89", |b| b.iter(|| enumerate_genus(black_box(&s89), 2).unwrap()));
    g.bench_function("automorphisms D=61 seed", |b| b.iter(|| automorphism_group(black_box(&s61))));
    g.finish();
}

fn hecke_stage(c: &mut Criterion) {
    let mut g = c.benchmark_group("hecke");
    g.sample_size(10);
    let g61 = genus(61, 1);
    let sp = build_space(&g61, 0, 0, 1).unwrap();
    g.bench_function("T(2) D=61", |b| b.iter(|| hecke_matrix(black_box(&sp), 2, HeckeKind::T).unwrap()));
    g.bench_function("T1(4) D=61", |b| b.iter(|| hecke_matrix(black_box(&sp), 2, HeckeKind::T1).unwrap()));
    let g19 = genus(19, 1);
    let w = build_space(&g19, 2, 0, 1).unwrap();
    g.bench_function("T(2) D=19 W(2,0)", |b| b.iter(|| hecke_matrix(black_box(&w), 2, HeckeKind::T).unwrap()));
    g.finish();
}

fn algebra_stage(c: &mut Criterion) {
    let mut g = c.benchmark_group("algebra");
    g.bench_function("build W(4,0)", |b| b.iter(|| build_weight(black_box(4), 0).unwrap()));
    let g247 = genus(13, 19);
    let sp = build_space(&g247, 2, 0, 19).unwrap();
    let t2 = hecke_matrix(&sp, 2, HeckeKind::T).unwrap();
    g.bench_function("charpoly dim 34", |b| b.iter(|| charpoly(black_box(&t2.matrix)).unwrap()));
    g.finish();
}

criterion_group!(benches, genus_stage, hecke_stage, algebra_stage);
criterion_main!(benches);
