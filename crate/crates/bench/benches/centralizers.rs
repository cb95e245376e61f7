use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nclp_core::centralizers::{estimate_q, lift_centralizer, omega_p};
use nclp_core::interpolation::{boundary_norm, kosaki_derivation_left, Couple, Sampling};
use nclp_core::random::Sampler;
use nclp_core::{Algebra, CommCentralizer, NCCentralizer, StateDensity, StripFunction};

fn bench_omega_p(c: &mut Criterion) {
    let mut g = c.benchmark_group("omega_p");
    for n in [4, 16, 64] {
        let alg = Algebra::matrix(n, 1.0).unwrap();
        let x = Sampler::new(1).ginibre(&alg);
        g.bench_with_input(BenchmarkId::from_parameter(n), &x, |b, x| b.iter(|| omega_p(black_box(x), 1.5).unwrap()));
    }
    g.finish();
}

fn bench_lift(c: &mut Criterion) {
    let alg = Algebra::matrix(16, 1.0).unwrap();
    let x = Sampler::new(2).ginibre(&alg);
    let phi = CommCentralizer::KaltonPeck { p: 3.0 };
    c.bench_function("lift_kalton_peck/16", |b| b.iter(|| lift_centralizer(&phi, black_box(&x), 3.0).unwrap()));
}

fn bench_estimate_q(c: &mut Criterion) {
    let alg = Algebra::new(vec![nclp_core::Block::new(3, 1.0), nclp_core::Block::new(4, 0.5)]).unwrap();
    let omega = NCCentralizer::OmegaP { p: 1.5 };
    let mut g = c.benchmark_group("estimate_q");
    g.sample_size(20);
    g.bench_function("1000_trials", |b| b.iter(|| estimate_q(&omega, &alg, 1.5, 1000, black_box(7)).unwrap()));
    g.finish();
}

fn bench_boundary_norm(c: &mut Criterion) {
    let alg = Algebra::matrix(4, 1.0).unwrap();
    let mut s = Sampler::new(3);
    let f = StripFunction::exponential(1e-3, 0.5, s.ginibre(&alg)).unwrap();
    let couple = Couple::KosakiLeft(StateDensity::state(s.density(&alg)).unwrap());
    let sampling = Sampling::default();
    let mut g = c.benchmark_group("boundary_norm");
    g.sample_size(20);
    g.bench_function("kosaki_left/4", |b| b.iter(|| boundary_norm(black_box(&f), &couple, &sampling).unwrap()));
    g.finish();
}

fn bench_kosaki_derivation(c: &mut Criterion) {
    let alg = Algebra::matrix(8, 1.0).unwrap();
    let mut s = Sampler::new(4);
    let a = s.ginibre(&alg);
    let d = StateDensity::state(s.density(&alg)).unwrap();
    c.bench_function("kosaki_derivation_left/8", |b| {
        b.iter(|| kosaki_derivation_left(black_box(&a), &d, 1.5).unwrap())
    });
}

criterion_group!(benches, bench_omega_p, bench_lift, bench_estimate_q, bench_boundary_norm, bench_kosaki_derivation);
criterion_main!(benches);
