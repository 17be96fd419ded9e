use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use num_complex::Complex64 as C64;
use upconv_core::cascade::sfg_generator;
use upconv_core::hbt::{DEFAULT_BIN_WIDTH, DEFAULT_TAU_MAX};
use upconv_core::*;

fn expm(c: &mut Criterion) {
    let (da, db) = (FockDim::new(20).unwrap(), FockDim::new(5).unwrap());
    let gen = sfg_generator(0.05, da, db);
    c.bench_function("expm dense 100x100", |b| b.iter(|| matrix_exponential(black_box(&gen), 1e-14).unwrap()));
    c.bench_function("sfg unitary by sector 50x10", |b| {
        b.iter(|| SfgUnitary::new(black_box(8.7715e-3), FockDim::new(50).unwrap(), FockDim::new(10).unwrap()).unwrap())
    });
}

fn cascade(c: &mut Criterion) {
    let config = CascadeConfig::reference();
    c.bench_function("run_cascade reference", |b| b.iter(|| run_cascade(black_box(&config)).unwrap()));
    let psi: Vec<C64> = (0..500).map(|i| C64::new(((i * 7) % 13) as f64, 1.0)).collect();
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let psi: Vec<C64> = psi.into_iter().map(|z| z / norm).collect();
    let state = TwoModeState::pure(psi, FockDim::new(50).unwrap(), FockDim::new(10).unwrap()).unwrap();
    let u = SfgUnitary::new(8.7715e-3, state.dim_a(), state.dim_b()).unwrap();
    c.bench_function("apply sfg to pure state", |b| b.iter(|| u.apply(black_box(&state)).unwrap()));
}

fn streams(c: &mut Criterion) {
    let det = DetectorModel::default();
    let thermal = SourceModel::Thermal { mean_rate: 1e5, coherence_time: 1e-6 };
    c.bench_function("generate thermal stream 1e5 events", |b| {
        b.iter(|| generate_stream(black_box(&thermal), &det, 1.0, 7).unwrap())
    });
    let coherent = SourceModel::Coherent { mean_rate: 5e4 };
    c.bench_function("cross_correlate 2x1e5 events", |b| {
        b.iter_batched(
            || {
                let a = generate_stream(&coherent, &det, 2.0, 1).unwrap();
                let b = generate_stream(&coherent, &det, 2.0, 2).unwrap();
                (a, b)
            },
            |(a, b)| cross_correlate(&a, &b, DEFAULT_BIN_WIDTH, DEFAULT_TAU_MAX).unwrap(),
            BatchSize::LargeInput,
        )
    });
}

fn interference(c: &mut Criterion) {
    let jsa = EffectiveJsa::default_biphoton();
    let s = jsa.sigma();
    let phase = SpectralPhase { beta: 2.0 / (s * s), ..Default::default() };
    c.bench_function("g_amplitude 2048 nodes", |b| b.iter(|| g_amplitude(&jsa, black_box(&phase)).unwrap()));
}

criterion_group!(benches, expm, cascade, streams, interference);
criterion_main!(benches);
