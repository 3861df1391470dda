use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use eteleport::leviton::fidelity_curve;
use eteleport::protocol::TeleportParams;
use eteleport::saw::{average_fidelity_sampled, dephased_state_montecarlo, DephasingParams};
use eteleport::Execution;

const MODES: [(&str, Execution); 2] = [("serial", Execution::Serial), ("parallel", Execution::Parallel)];

fn dephasing(c: &mut Criterion) {
    let p = TeleportParams::new(0.3, 1.2).unwrap();
    let d = DephasingParams::uniform(1.0).unwrap();
    let mut g = c.benchmark_group("dephased_state_montecarlo");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new(name, 5_000), &exec, |b, &exec| {
            b.iter(|| dephased_state_montecarlo(&p, &d, 5_000, 7, exec).unwrap())
        });
    }
    g.finish();
}

fn sphere_average(c: &mut Criterion) {
    let mut g = c.benchmark_group("average_fidelity_sampled");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new(name, 100_000), &exec, |b, &exec| {
            b.iter(|| average_fidelity_sampled(1.0, 100_000, 7, exec).unwrap())
        });
    }
    g.finish();
}

fn leviton_curve(c: &mut Criterion) {
    let taus: Vec<f64> = (0..=40).map(|i| i as f64 * 0.05).collect();
    let gammas = [0.02, 0.05, 0.1];
    let mut g = c.benchmark_group("fidelity_curve");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new(name, taus.len() * gammas.len()), &exec, |b, &exec| {
            b.iter(|| fidelity_curve(&gammas, &taus, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, dephasing, sphere_average, leviton_curve);
criterion_main!(benches);
