use criterion::{black_box, criterion_group, criterion_main, Criterion};

use velopaoi_core::{AerialSuccessContext, GroundSuccessContext, SimConfig, Simulator, SystemParams, UserKind};

fn meta(c: &mut Criterion) {
    let p = SystemParams::default();
    let ground = GroundSuccessContext::new(&p).unwrap();
    c.bench_function("ground meta distribution", |b| b.iter(|| ground.meta_distribution(black_box(0.5)).unwrap()));

    let aerial = AerialSuccessContext::new(&p).unwrap();
    aerial.meta_distribution(0.5).unwrap();
    c.bench_function("aerial meta distribution, cached table", |b| {
        b.iter(|| aerial.meta_distribution(black_box(0.5)).unwrap())
    });

    let mut group = c.benchmark_group("slow");
    group.sample_size(10);
    group.bench_function("aerial context with success table", |b| {
        b.iter(|| {
            let ctx = AerialSuccessContext::new(&p).unwrap();
            ctx.meta_distribution(0.5).unwrap()
        })
    });
    group.finish();
}

fn simulation(c: &mut Criterion) {
    let p = SystemParams::default();
    let mut group = c.benchmark_group("simulation");
    group.sample_size(10);
    for kind in [UserKind::Ground, UserKind::Aerial] {
        let sim = Simulator::new(&p, kind, SimConfig::default()).unwrap();
        group.bench_function(format!("{} 100 success samples", kind.name()), |b| {
            b.iter(|| sim.success_samples(100, black_box(3)))
        });
    }
    group.finish();
}

criterion_group!(benches, meta, simulation);
criterion_main!(benches);
