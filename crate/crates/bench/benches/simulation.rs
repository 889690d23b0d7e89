use std::hint::black_box;

use bellcause_core::inequalities::chsh_fixed_settings;
use bellcause_core::noise::{ace_samples, Sampling};
use bellcause_core::{ace_point, InterventionConfig, RunModel, TwoQubitState};
use criterion::{criterion_group, criterion_main, Criterion};

fn simulation(c: &mut Criterion) {
    let state = TwoQubitState::pure(std::f64::consts::FRAC_PI_4).unwrap();
    let (sa, sb) = chsh_fixed_settings();
    let model = RunModel::new(&state, &sa, &sb, &InterventionConfig::intervening(), 48_000).unwrap();
    c.bench_function("sample_and_estimate", |b| b.iter(|| ace_point(&model.sample_seeded(black_box(7), 0)).unwrap()));
    c.bench_function("ace_samples_1000", |b| {
        b.iter(|| ace_samples(&model, 1000, black_box(1), Sampling::Poisson).unwrap())
    });
}

criterion_group!(benches, simulation);
criterion_main!(benches);
