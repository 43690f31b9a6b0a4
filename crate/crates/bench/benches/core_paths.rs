use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use qbody_bench::witness_vectors;
use qbody_core::cone::ConeSection;
use qbody_core::model::{witness_point_closed_form, witness_point_from_mixture};
use qbody_core::realize::{behavior_of, realize_from_vectors};
use qbody_core::sdp::analytic_certificate;
use qbody_core::seesaw::{bell_matrix, seesaw_optimize};

fn bench_witness_point(c: &mut Criterion) {
    c.bench_function("witness_point_mixture_m8", |b| {
        b.iter(|| witness_point_from_mixture(black_box(8)).unwrap())
    });
    c.bench_function("witness_point_closed_form_m8", |b| {
        b.iter(|| witness_point_closed_form(black_box(8)).unwrap())
    });
}

fn bench_seesaw(c: &mut Criterion) {
    let bell = bell_matrix(6).unwrap();
    c.bench_function("seesaw_m6_single_run", |b| {
        b.iter(|| seesaw_optimize(black_box(&bell), 7, 1e-12, 10_000).unwrap())
    });
}

fn bench_certificate(c: &mut Criterion) {
    c.bench_function("analytic_certificate_m12", |b| {
        b.iter(|| analytic_certificate(black_box(12)).unwrap())
    });
}

fn bench_realization(c: &mut Criterion) {
    let (a, bvecs) = witness_vectors(6);
    c.bench_function("realize_and_evaluate_m6", |b| {
        b.iter(|| {
            let r = realize_from_vectors(black_box(&a), black_box(&bvecs)).unwrap();
            behavior_of(&r).unwrap()
        })
    });
}

fn bench_cone_scan(c: &mut Criterion) {
    let section = ConeSection::new();
    c.bench_function("povm_scan_grid16", |b| {
        b.iter(|| section.povm_scan(black_box(16)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_witness_point,
    bench_seesaw,
    bench_certificate,
    bench_realization,
    bench_cone_scan
);
criterion_main!(benches);
