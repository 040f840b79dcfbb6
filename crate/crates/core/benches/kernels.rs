//! Hot kernels under a one-thread rayon pool and under the default pool.
//!
//! Build with `--no-default-features` to time the sequential fallback
//! instead; the two pools then measure the same code.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use rayon::ThreadPool;

use cqnls::evolution::{evolve, SolverConfig};
use cqnls::fft::Fft3;
use cqnls::initial::InitialData;
use cqnls::norms::SpaceTimeProfile;
use cqnls::probe::{probe_trilinear, ProbeConfig};
use cqnls::spectral::{evaluate_nonlinearity, EquationParams, SpectralField, TorusGrid};
use cqnls::trajectory::{TimeInterval, Trajectory};

fn pools() -> Vec<(String, ThreadPool)> {
    let default = rayon::ThreadPoolBuilder::new().build().expect("default pool");
    let label = format!("{}_threads", default.current_num_threads());
    vec![
        ("1_thread".to_string(), rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("pool")),
        (label, default),
    ]
}

fn field(k: usize) -> SpectralField {
    InitialData::Gaussian { width: 1.5, amplitude: 1.0, seed: 7 }
        .build(TorusGrid::square(k))
        .expect("initial data")
}

fn trajectory(k: usize) -> Trajectory {
    let u0 = field(k);
    evolve(
        &u0,
        &TimeInterval::new(0.0, 0.2).expect("interval"),
        &EquationParams::new(-1.0, 1.0).expect("params"),
        &SolverConfig::default().with_dt(5e-3),
    )
    .expect("evolve")
    .trajectory
}

fn bench_fft(c: &mut Criterion) {
    let mut group = c.benchmark_group("fft3_forward");
    for n in [27usize, 54] {
        let data: Vec<Complex64> = (0..n * n * n).map(|i| Complex64::new((i as f64).sin(), 0.5)).collect();
        let plan = Fft3::get(n);
        for (name, pool) in pools() {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| {
                    let mut buf = data.clone();
                    pool.install(|| plan.forward(&mut buf));
                    black_box(buf)
                })
            });
        }
    }
    group.finish();
}

fn bench_nonlinearity(c: &mut Criterion) {
    let mut group = c.benchmark_group("nonlinearity");
    group.sample_size(20);
    let params = EquationParams::new(-1.0, 1.0).expect("params");
    for k in [8usize, 16] {
        let u = field(k);
        for (name, pool) in pools() {
            group.bench_with_input(BenchmarkId::new(name, k), &k, |b, _| {
                b.iter(|| pool.install(|| black_box(evaluate_nonlinearity(&u, &params).expect("nonlinearity"))))
            });
        }
    }
    group.finish();
}

fn bench_node_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("per_node_profile");
    group.sample_size(20);
    let traj = trajectory(8);
    for (name, pool) in pools() {
        group.bench_function(name, |b| b.iter(|| pool.install(|| black_box(SpaceTimeProfile::new(&traj)))));
    }
    group.finish();
}

fn bench_probe(c: &mut Criterion) {
    let mut group = c.benchmark_group("probe_ensemble");
    group.sample_size(10);
    let config = ProbeConfig {
        sample_count: 8,
        mode_radius: 4,
        ..ProbeConfig::default()
    };
    for (name, pool) in pools() {
        group.bench_function(name, |b| {
            b.iter(|| pool.install(|| black_box(probe_trilinear(4, 2, 1, &config).expect("probe"))))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_fft, bench_nonlinearity, bench_node_sweep, bench_probe);
criterion_main!(benches);
