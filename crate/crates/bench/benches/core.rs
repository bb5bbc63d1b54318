use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use linnik_core::arith::{factorize, PrimeSieve};
use linnik_core::group::{fourier_forward, UnitGroup};
use linnik_core::multfunc::{MultiplicativeFunction, Sign};
use linnik_core::pipeline::{
    r_of_h_q_with, s_characters, s_direct, EasyConfig, ParamSet, SInstance,
};
use linnik_core::setcomb::{triple_convolution, UnitSet};
use num_complex::Complex64;

fn arith(c: &mut Criterion) {
    c.bench_function("factorize semiprime", |b| {
        b.iter(|| factorize(black_box(1_000_000_007 * 998_244_353)))
    });
    c.bench_function("sieve 1e6", |b| {
        b.iter(|| PrimeSieve::new(black_box(1_000_000)))
    });
}

fn group(c: &mut Criterion) {
    c.bench_function("character table q=1009", |b| {
        b.iter(|| UnitGroup::new(black_box(1009)).unwrap())
    });
    let g = UnitGroup::new(1009).unwrap();
    let f: Vec<Complex64> = (0..g.character_count())
        .map(|i| Complex64::new((i % 7) as f64, 0.0))
        .collect();
    c.bench_function("fourier q=1009", |b| {
        b.iter(|| fourier_forward(&g, black_box(&f)).unwrap())
    });
}

fn pipeline(c: &mut Criterion) {
    let sieve = PrimeSieve::new(100_000);
    let lam = MultiplicativeFunction::liouville();
    c.bench_function("R(liouville) q=3..40", |b| {
        b.iter(|| {
            (3..=40)
                .map(|q| r_of_h_q_with(&lam, q, 100_000, &sieve).unwrap().r_value)
                .collect::<Vec<_>>()
        })
    });

    let g = UnitGroup::new(101).unwrap();
    let a = UnitSet::from_indices(&g, 0..50);
    let b2 = UnitSet::from_indices(&g, 25..75);
    c.bench_function("triple convolution q=101", |b| {
        b.iter(|| triple_convolution(&g, &a, &b2, &a))
    });

    let g = UnitGroup::new(35).unwrap();
    let mut p = ParamSet::new(35, 0.3, true)
        .unwrap()
        .with_q1(20.0)
        .unwrap()
        .with_r(60.0);
    p.z = 3.0;
    let sieve = PrimeSieve::new(200_000);
    let cfg = EasyConfig {
        b2: None,
        b3: None,
        deltas: [Sign::Plus, Sign::Minus, Sign::Plus],
        u_interval: None,
    };
    let inst = SInstance::easy(&lam, &g, &p, &cfg, Some(&sieve)).unwrap();
    c.bench_function("S direct q=35", |b| {
        b.iter(|| s_direct(&g, &inst, 100_000_000).unwrap())
    });
    c.bench_function("S characters q=35", |b| {
        b.iter(|| s_characters(&g, &inst).unwrap())
    });
}

criterion_group!(benches, arith, group, pipeline);
criterion_main!(benches);
