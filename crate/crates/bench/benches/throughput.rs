use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use qdistill::montecarlo::{estimate_avg_channel_fidelity, estimate_distillation_rate};
use qdistill::protocols::distill_protocol_i;
use qdistill::{ClassicalCode, CssCode, LogicalTarget, NoiseModel, RngStream};
use qdistill_bench::{noisy_blocks, steane_config};

fn noisy_prep(c: &mut Criterion) {
    let mut group = c.benchmark_group("noisy_prep");
    group.throughput(Throughput::Elements(1));
    for name in ["steane", "golay_q"] {
        let css = CssCode::builtin(name).unwrap();
        let circuit = css.encoding_circuit(LogicalTarget::Zero).clone();
        let noise = NoiseModel::new(1e-3).unwrap();
        let mut rng = RngStream::new(1, 0).rng();
        group.bench_function(name, |b| b.iter(|| black_box(circuit.run_noisy(&noise, &mut rng))));
    }
    group.finish();
}

fn protocol_i(c: &mut Criterion) {
    let mut group = c.benchmark_group("protocol_i_run");
    for code in ["rep3", "rep5", "hamming74"] {
        let cfg = steane_config(code);
        let pool = noisy_blocks(&cfg.css, cfg.target, 3e-3, cfg.blocks_per_run(), 2);
        group.throughput(Throughput::Elements(cfg.blocks_per_run() as u64));
        group.bench_function(code, |b| b.iter(|| distill_protocol_i(black_box(&pool), &cfg).unwrap()));
    }
    group.finish();
}

fn sweeps(c: &mut Criterion) {
    let trials = 2_000u64;
    let mut group = c.benchmark_group("sweep_point");
    group.sample_size(10);
    group.throughput(Throughput::Elements(trials));
    for code in ["rep3", "rep5"] {
        let cfg = steane_config(code);
        group.bench_with_input(BenchmarkId::new("distillation", code), &cfg, |b, cfg| {
            b.iter(|| estimate_distillation_rate(cfg, 3e-3, trials, 1).unwrap())
        });
    }
    let css = CssCode::builtin("steane").unwrap();
    let rep5 = ClassicalCode::builtin("rep5").unwrap();
    group.bench_function("fidelity/rep5", |b| {
        b.iter(|| estimate_avg_channel_fidelity(&css, Some(&rep5), 1e-2, trials, 1).unwrap())
    });
    group.finish();
}

criterion_group!(benches, noisy_prep, protocol_i, sweeps);
criterion_main!(benches);
