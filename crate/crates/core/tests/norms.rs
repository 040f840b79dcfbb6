use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cqnls::evolution::time_grid;
use cqnls::norms::{kinetic_bound_constant, sobolev_norm, v2_delta_proxy, x1_proxy_and_zprime, z_norm};
use cqnls::spectral::{apply_propagator, forward_transform, inverse_transform, EquationParams, SpectralField, TorusGrid};
use cqnls::trajectory::{TimeInterval, Trajectory};

fn random_field(grid: TorusGrid, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SpectralField::from_fn(grid, |_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
}

fn free(u0: &SpectralField, len: f64, dt: f64) -> Trajectory {
    let i = TimeInterval::new(0.0, len).unwrap();
    let times = time_grid(&i, dt);
    let fields = times.iter().map(|&t| apply_propagator(u0, t)).collect();
    Trajectory::new(i, *u0.grid(), EquationParams::linear(), times, fields).unwrap()
}

#[test]
fn parseval_with_physical_cell_volume() {
    let grid = TorusGrid::new(3, 21, [1.0, 1.0, 1.0]).unwrap();
    let f = random_field(grid, 1);
    let samples = inverse_transform(&f);
    let n = grid.phys_points() as f64;
    let cell = (2.0 * std::f64::consts::PI / n).powi(3);
    let physical: f64 = samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * cell;
    assert!((physical - f.norm_sq()).abs() <= 1e-12 * f.norm_sq());
    let back = forward_transform(grid, &samples).unwrap();
    assert!(back.sub(&f).norm_sq().sqrt() <= 1e-12 * f.norm_sq().sqrt());
}

#[test]
fn free_flow_proxies_are_exact() {
    let u0 = random_field(TorusGrid::square(3), 4);
    let traj = free(&u0, 0.5, 0.05);
    let i = traj.interval();
    assert!(v2_delta_proxy(&traj, 1.0, &i).unwrap() <= 1e-12);
    let (x1, zp) = x1_proxy_and_zprime(&traj, &i).unwrap();
    let h1 = sobolev_norm(&u0, 1.0);
    assert!((x1 - h1).abs() <= 1e-12 * h1);
    let z = z_norm(&traj, &i).unwrap();
    assert!((zp * zp - z * x1).abs() <= 1e-12 * z * x1);
}

#[test]
fn z_norm_grows_with_the_interval() {
    let u0 = random_field(TorusGrid::square(2), 7);
    let traj = free(&u0, 1.0, 0.05);
    let inner = TimeInterval::new(0.2, 0.6).unwrap();
    let small = z_norm(&traj.restrict(&inner).unwrap(), &inner).unwrap();
    let big = z_norm(&traj, &traj.interval()).unwrap();
    assert!(small <= big);
}

/// Maximizes `(|μ₁|/4)x − (μ₂/6)x²` over `x ≥ 0` by golden-section search.
fn golden_max(mu1: f64, mu2: f64) -> f64 {
    let g = |x: f64| mu1.abs() / 4.0 * x - mu2 / 6.0 * x * x;
    let (mut a, mut b) = (0.0, 10.0 * mu1.abs() / mu2 + 1.0);
    let r = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - r * (b - a);
        let d = a + r * (b - a);
        if g(c) > g(d) {
            b = d;
        } else {
            a = c;
        }
    }
    g(0.5 * (a + b))
}

#[test]
fn kinetic_constant_matches_scalar_optimization() {
    for (mu1, mu2) in [(-1.0, 1.0), (-2.0, 1.0), (-0.5, 3.0)] {
        let c = kinetic_bound_constant(&EquationParams::new(mu1, mu2).unwrap()).unwrap();
        let closed = 3.0 * mu1 * mu1 / (32.0 * mu2);
        assert!((c - closed).abs() <= 1e-12 * closed);
        assert!((c - golden_max(mu1, mu2)).abs() <= 1e-10 * closed);
    }
}
