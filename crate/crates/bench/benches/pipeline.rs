use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use csi_presence::baseline::baseline_window_statistic;
use csi_presence::detector::{detect_window, multi_layer_acf, sample_autocov};
use csi_presence::preprocess::preprocess;
use csi_presence::sim::Scenario;
use csi_presence::{run_detector, DetectorConfig, DetectorKind};
use csi_presence_bench::{breathing_window, recording, RATE};

fn autocorrelation(c: &mut Criterion) {
    let x: Vec<f64> = (0..234)
        .map(|i| (i as f64 * 0.37).sin() + 0.1 * (i as f64 * 2.9).cos())
        .collect();
    c.bench_function("sample_autocov/k234_lag1", |b| {
        b.iter(|| sample_autocov(black_box(&x), 1))
    });
    let mut group = c.benchmark_group("multi_layer_acf/k234");
    for layers in [1, 2, 3] {
        group.bench_with_input(BenchmarkId::from_parameter(layers), &layers, |b, &n| {
            b.iter(|| multi_layer_acf(black_box(&x), n))
        });
    }
    group.finish();
}

fn window_detectors(c: &mut Criterion) {
    let window = breathing_window(20);
    let normalized = preprocess(&window).unwrap();
    let config = DetectorConfig::default();
    c.bench_function("preprocess/t20", |b| {
        b.iter(|| preprocess(black_box(&window)))
    });
    c.bench_function("detect_window/t20_n3", |b| {
        b.iter(|| detect_window(black_box(&normalized), &config))
    });
    c.bench_function("baseline/t20", |b| {
        b.iter(|| baseline_window_statistic(black_box(&normalized)))
    });
}

fn end_to_end(c: &mut Criterion) {
    let syn = recording(Scenario::Human, 30.0, 2);
    let config = DetectorConfig::default();
    let mut group = c.benchmark_group("run_detector/30s");
    group.throughput(Throughput::Elements(syn.frames.len() as u64));
    group.sample_size(20);
    group.bench_function("subcarrier", |b| {
        b.iter(|| {
            run_detector(
                black_box(&syn.frames),
                RATE,
                &config,
                DetectorKind::Subcarrier,
            )
        })
    });
    group.bench_function("time_baseline", |b| {
        b.iter(|| {
            run_detector(
                black_box(&syn.frames),
                RATE,
                &config,
                DetectorKind::TimeBaseline,
            )
        })
    });
    group.finish();

    let mut group = c.benchmark_group("synthesize");
    group.sample_size(10);
    group.bench_function("human_10s", |b| {
        b.iter(|| recording(Scenario::Human, 10.0, black_box(3)))
    });
    group.finish();
}

criterion_group!(benches, autocorrelation, window_detectors, end_to_end);
criterion_main!(benches);
