use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use velopaoi_core::math::{integrate_1d, lambert_w0, upper_incomplete_gamma, QuadratureSpec};
use velopaoi_core::sim::LinkBudget;

fn special_functions(c: &mut Criterion) {
    c.bench_function("lambert_w0", |b| b.iter(|| lambert_w0(black_box(3.7)).unwrap()));
    c.bench_function("upper_incomplete_gamma negative order", |b| {
        b.iter(|| upper_incomplete_gamma(black_box(-1.0), black_box(0.4)).unwrap())
    });
    let spec = QuadratureSpec::standard();
    c.bench_function("integrate_1d semi-infinite", |b| {
        b.iter(|| integrate_1d(|x| (-x * x).exp(), black_box(0.0), f64::INFINITY, &spec).unwrap())
    });
}

fn link_budget(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let budget = LinkBudget {
        signal: 1.0,
        signal_shape: 3,
        interferers: (0..200).map(|_| (rng.gen::<f64>() * 0.05, if rng.gen() { 3 } else { 1 })).collect(),
        noise: 1e-3,
    };
    c.bench_function("link budget success, 200 interferers", |b| {
        b.iter(|| budget.success_probability(black_box(1.0)))
    });
}

criterion_group!(benches, special_functions, link_budget);
criterion_main!(benches);
