use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use qbsc_core::polarization::PolarizationPulse;
use qbsc_core::protocol::{run_session, AliceStrategy};
use qbsc_core::sim::{measure, simulate_brute_force_attack, simulate_cheating_alice, trial_stream};
use qbsc_core::{DetectorModel, MeasurementSetup, ProtocolParams, SimConfig};

const TRIALS: u64 = 100_000;

fn single_measurement(c: &mut Criterion) {
    let pulse = PolarizationPulse::new(4.55, 0.39).unwrap();
    let setup = MeasurementSetup { rotator_angle: 0.2, detectors: DetectorModel::ideal() };
    let mut rng = trial_stream(1, 0);
    c.bench_function("measure", |b| b.iter(|| measure(black_box(&pulse), &setup, &mut rng)));
}

fn attacks(c: &mut Criterion) {
    let cfg = SimConfig::new(TRIALS, 7).unwrap();
    let mut group = c.benchmark_group("monte_carlo");
    group.throughput(Throughput::Elements(TRIALS));
    group.sample_size(20);
    for m in [2usize, 4, 8] {
        let p = ProtocolParams::uniform(m, 0.5, 0.75).unwrap();
        group.bench_with_input(BenchmarkId::new("brute_force", m), &p, |b, p| {
            b.iter(|| simulate_brute_force_attack(p, &cfg))
        });
        group.bench_with_input(BenchmarkId::new("cheating_alice", m), &p, |b, p| {
            b.iter(|| simulate_cheating_alice(p, &cfg))
        });
    }
    group.finish();
}

fn sessions(c: &mut Criterion) {
    let p = ProtocolParams::uniform(4, 0.5, 0.75).unwrap();
    let mut seed = 0u64;
    c.bench_function("run_session", |b| {
        b.iter(|| {
            seed += 1;
            run_session(&p, AliceStrategy::Honest, 2, seed).unwrap()
        })
    });
}

criterion_group!(benches, single_measurement, attacks, sessions);
criterion_main!(benches);
