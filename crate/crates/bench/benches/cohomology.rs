use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};

use finsheaf::cxalg::Complex;
use finsheaf::derived::{duality_check, flat_qcoh_res, pseudo_cech, qc_derived, sheaf_cohomology, standard_sheaf};
use finsheaf::finring::{is_flat, Module, DEFAULT_RING_CAP};
use finsheaf::{fixtures, random, FiniteRing, Sheaf};

fn cohomology(c: &mut Criterion) {
    let pc = Arc::new(Sheaf::structure(fixtures::pseudocircle()));
    let s2 = Arc::new(Sheaf::structure(fixtures::sphere()));
    c.bench_function("cohomology/pseudocircle", |b| b.iter(|| sheaf_cohomology(black_box(&pc)).unwrap()));
    c.bench_function("cohomology/sphere", |b| b.iter(|| sheaf_cohomology(black_box(&s2)).unwrap()));
}

fn resolutions(c: &mut Criterion) {
    let x = fixtures::wedge();
    let mut rng = random::rng(1);
    let m = random::qcoh_sheaf(&x, &mut rng).unwrap();
    let single = Arc::new(Complex::single(m.clone(), 0));
    c.bench_function("standard/wedge", |b| b.iter(|| standard_sheaf(black_box(&m)).unwrap()));
    c.bench_function("cech/wedge", |b| b.iter(|| pseudo_cech(black_box(&single)).unwrap()));
    c.bench_function("qc_derived/wedge", |b| b.iter(|| qc_derived(black_box(&single)).unwrap()));
    let z4 = fixtures::flat_z4();
    let o = Arc::new(Sheaf::structure(z4));
    c.bench_function("flat_res/flat_z4", |b| b.iter(|| flat_qcoh_res(black_box(&o)).unwrap()));
}

fn duality(c: &mut Criterion) {
    let w = fixtures::wedge();
    let f = fixtures::to_point(&w, fixtures::f2());
    let m = Arc::new(Complex::single(Arc::new(Sheaf::structure(w)), 0));
    let n = Arc::new(Complex::single(Arc::new(Sheaf::structure(f.target.clone())), 0));
    c.bench_function("duality/wedge_to_point", |b| b.iter(|| duality_check(&f, &m, &n, (-1, 1), None).unwrap()));
}

fn flatness(c: &mut Criterion) {
    let r = Arc::new(FiniteRing::truncated_poly(2, 3));
    let m = Module::cyclic_quotient(r, &[vec![0, 0, 1]]).unwrap();
    c.bench_function("is_flat/F2[t]/t^3", |b| b.iter(|| is_flat(black_box(&m), DEFAULT_RING_CAP).unwrap()));
}

criterion_group!(benches, cohomology, resolutions, duality, flatness);
criterion_main!(benches);
