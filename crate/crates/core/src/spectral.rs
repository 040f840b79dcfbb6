//! Fourier calculus on the 3-torus `(ℝ/2πℤ)³`.
//!
//! Fields are stored by their Fourier coefficients on the cube lattice
//! `{ξ ∈ ℤ³ : |ξ_i| ≤ K}` with the unitary normalization
//! `f̂(ξ) = (2π)^{-3/2} ∫ f(x) e^{-ix·ξ} dx`, so that `Σ|f̂|² = ∫|f|²`.
//! Physical samples only exist transiently on uniform grids of `n³` points
//! `x_j = 2πj/n`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{smooth_size_at_least, Fft3};
use crate::par;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `(2π)^{3/2}`, the conversion factor between a unit-amplitude plane wave
/// and its Fourier coefficient.
pub fn plane_wave_coefficient() -> f64 {
    (2.0 * PI).powf(1.5)
}

/// Volume of the torus, `(2π)³`.
pub fn torus_volume() -> f64 {
    (2.0 * PI).powi(3)
}

/// Lattice truncation, physical resolution and dispersion weights.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    mode_radius: usize,
    phys_points: usize,
    theta: [f64; 3],
}

impl TorusGrid {
    /// Validates `phys_points ≥ 3(2K+1)` and `θ_i > 0`.
    pub fn new(mode_radius: usize, phys_points: usize, theta: [f64; 3]) -> Result<Self> {
        if mode_radius == 0 {
            return Err(Error::Config("mode radius K must be at least 1".into()));
        }
        let min = 3 * (2 * mode_radius + 1);
        if phys_points < min {
            return Err(Error::Config(format!(
                "phys_points = {phys_points} below the dealiasing minimum 3(2K+1) = {min}"
            )));
        }
        if theta.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::Config(format!(
                "theta components must be finite and positive, got {theta:?}"
            )));
        }
        Ok(TorusGrid {
            mode_radius,
            phys_points,
            theta,
        })
    }

    /// Square torus with the minimal dealiasing grid.
    pub fn square(mode_radius: usize) -> Self {
        Self::with_theta(mode_radius, [1.0; 3]).expect("square torus parameters are valid")
    }

    /// Minimal dealiasing grid with the given dispersion weights.
    pub fn with_theta(mode_radius: usize, theta: [f64; 3]) -> Result<Self> {
        Self::new(mode_radius, 3 * (2 * mode_radius.max(1) + 1), theta)
    }

    pub fn mode_radius(&self) -> usize {
        self.mode_radius
    }

    pub fn phys_points(&self) -> usize {
        self.phys_points
    }

    pub fn theta(&self) -> [f64; 3] {
        self.theta
    }

    /// `2K + 1`.
    pub fn modes_per_axis(&self) -> usize {
        2 * self.mode_radius + 1
    }

    /// Number of retained lattice points, `(2K+1)³`.
    pub fn lattice_len(&self) -> usize {
        self.modes_per_axis().pow(3)
    }

    /// Lattice point stored at `index` (row-major in `ξ₁, ξ₂, ξ₃`).
    pub fn mode(&self, index: usize) -> [i32; 3] {
        let m = self.modes_per_axis();
        let k = self.mode_radius as i32;
        [
            (index / (m * m)) as i32 - k,
            ((index / m) % m) as i32 - k,
            (index % m) as i32 - k,
        ]
    }

    pub fn index_of(&self, xi: [i32; 3]) -> Option<usize> {
        let k = self.mode_radius as i32;
        if xi.iter().any(|c| c.abs() > k) {
            return None;
        }
        let m = self.modes_per_axis();
        let shift = |c: i32| (c + k) as usize;
        Some((shift(xi[0]) * m + shift(xi[1])) * m + shift(xi[2]))
    }

    pub fn modes(&self) -> impl Iterator<Item = [i32; 3]> + '_ {
        (0..self.lattice_len()).map(move |i| self.mode(i))
    }

    /// Weighted dispersion symbol `|ξ|²_θ = Σ θ_i ξ_i²`.
    pub fn symbol(&self, xi: [i32; 3]) -> f64 {
        self.theta
            .iter()
            .zip(xi)
            .map(|(t, c)| t * (c as f64) * (c as f64))
            .sum()
    }

    /// `|ξ|²_θ` for every stored lattice index.
    pub fn symbols(&self) -> Vec<f64> {
        self.modes().map(|xi| self.symbol(xi)).collect()
    }

    /// Largest `|ξ|_θ` on the retained lattice.
    pub fn max_frequency(&self) -> f64 {
        let k = self.mode_radius as f64;
        (self.theta.iter().sum::<f64>() * k * k).sqrt()
    }

    /// Smallest FFT-friendly grid that integrates products of `degree`
    /// band-limited factors exactly (`n > degree · K`).
    pub fn quadrature_points(&self, degree: usize) -> usize {
        smooth_size_at_least((degree * self.mode_radius + 1).max(self.modes_per_axis()))
    }

    /// Same lattice with a different dispersion weight vector.
    pub fn retheta(&self, theta: [f64; 3]) -> Result<Self> {
        Self::new(self.mode_radius, self.phys_points, theta)
    }
}

/// Equation coefficients `μ₁ |u|²u + μ₂ |u|⁴u`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquationParams {
    pub mu1: f64,
    pub mu2: f64,
}

impl EquationParams {
    /// Requires both coefficients finite and nonzero.
    pub fn new(mu1: f64, mu2: f64) -> Result<Self> {
        if mu1 == 0.0 || mu2 == 0.0 {
            return Err(Error::Argument(format!(
                "μ₁ and μ₂ must be nonzero (got μ₁ = {mu1}, μ₂ = {mu2})"
            )));
        }
        Self::permissive(mu1, mu2)
    }

    /// Allows zero coefficients (linear flow, pure quintic reference, tests).
    pub fn permissive(mu1: f64, mu2: f64) -> Result<Self> {
        if !(mu1.is_finite() && mu2.is_finite()) {
            return Err(Error::Argument(format!(
                "μ₁, μ₂ must be finite (got {mu1}, {mu2})"
            )));
        }
        Ok(EquationParams { mu1, mu2 })
    }

    pub fn linear() -> Self {
        EquationParams { mu1: 0.0, mu2: 0.0 }
    }

    /// Defocusing quintic `|u|⁴u`.
    pub fn quintic() -> Self {
        EquationParams { mu1: 0.0, mu2: 1.0 }
    }

    /// Pointwise potential `μ₁|u|² + μ₂|u|⁴` for `|u|² = a`.
    #[inline]
    pub fn potential(&self, abs_sq: f64) -> f64 {
        self.mu1 * abs_sq + self.mu2 * abs_sq * abs_sq
    }
}

/// Fourier coefficients of one snapshot `u(t, ·)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: TorusGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.lattice_len() {
            return Err(Error::Config(format!(
                "expected {} coefficients, got {}",
                grid.lattice_len(),
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::Argument("non-finite Fourier coefficient".into()));
        }
        Ok(SpectralField { grid, coeffs })
    }

    pub(crate) fn from_vec_unchecked(grid: TorusGrid, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.lattice_len());
        SpectralField { grid, coeffs }
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        SpectralField {
            grid,
            coeffs: vec![ZERO; grid.lattice_len()],
        }
    }

    pub fn from_fn(grid: TorusGrid, f: impl FnMut([i32; 3]) -> Complex64) -> Self {
        let coeffs = grid.modes().map(f).collect();
        SpectralField { grid, coeffs }
    }

    /// `u(x) = c`.
    pub fn constant(grid: TorusGrid, c: Complex64) -> Self {
        Self::plane_wave(grid, [0, 0, 0], c).expect("zero mode is always retained")
    }

    /// `u(x) = amplitude · e^{ix·k}`.
    pub fn plane_wave(grid: TorusGrid, k: [i32; 3], amplitude: Complex64) -> Result<Self> {
        let idx = grid
            .index_of(k)
            .ok_or_else(|| Error::Argument(format!("mode {k:?} outside the retained lattice")))?;
        let mut field = Self::zeros(grid);
        field.coeffs[idx] = amplitude * plane_wave_coefficient();
        Ok(field)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[cfg(test)]
    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient at lattice point `xi` (zero outside the lattice).
    pub fn get(&self, xi: [i32; 3]) -> Complex64 {
        self.grid.index_of(xi).map_or(ZERO, |i| self.coeffs[i])
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// `Σ_ξ |f̂(ξ)|²`.
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    fn zip_with(&self, other: &SpectralField, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| f(a, b))
            .collect();
        SpectralField {
            grid: self.grid,
            coeffs,
        }
    }

    pub fn add(&self, other: &SpectralField) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SpectralField) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        SpectralField {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    /// `self += s · other`.
    pub fn axpy(&mut self, s: Complex64, other: &SpectralField) {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        for (a, &b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += s * b;
        }
    }

    /// Multiplies each coefficient by `m(ξ)`.
    pub fn multiply_symbol(&self, m: impl Fn([i32; 3]) -> f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| c * m(self.grid.mode(i)))
            .collect();
        SpectralField {
            grid: self.grid,
            coeffs,
        }
    }

    /// Same coefficients interpreted with other dispersion weights.
    pub fn with_grid(&self, grid: TorusGrid) -> Result<Self> {
        if grid.mode_radius() != self.grid.mode_radius() {
            return Err(Error::Config("mode radius mismatch".into()));
        }
        Ok(SpectralField {
            grid,
            coeffs: self.coeffs.clone(),
        })
    }
}

/// Embeds the coefficients in an `n³` FFT grid and returns physical samples
/// on the points `2πj/n`. Requires `n ≥ 2K+1`.
pub(crate) fn to_physical(field: &SpectralField, n: usize) -> Vec<Complex64> {
    let grid = field.grid();
    assert!(n >= grid.modes_per_axis(), "grid too coarse for the lattice");
    let mut buf = vec![ZERO; n * n * n];
    let wrap = |c: i32| c.rem_euclid(n as i32) as usize;
    let scale = 1.0 / plane_wave_coefficient();
    for (i, &c) in field.coeffs().iter().enumerate() {
        if c == ZERO {
            continue;
        }
        let [a, b, d] = grid.mode(i);
        buf[(wrap(a) * n + wrap(b)) * n + wrap(d)] = c * scale;
    }
    Fft3::get(n).inverse(&mut buf);
    buf
}

/// Forward quadrature of samples on an `n³` grid, truncated to the lattice.
pub(crate) fn from_physical(grid: TorusGrid, n: usize, mut samples: Vec<Complex64>) -> SpectralField {
    assert_eq!(samples.len(), n * n * n);
    assert!(n >= grid.modes_per_axis(), "grid too coarse for the lattice");
    Fft3::get(n).forward(&mut samples);
    let scale = plane_wave_coefficient() / (n * n * n) as f64;
    let wrap = |c: i32| c.rem_euclid(n as i32) as usize;
    let coeffs = grid
        .modes()
        .map(|[a, b, d]| samples[(wrap(a) * n + wrap(b)) * n + wrap(d)] * scale)
        .collect();
    SpectralField::from_vec_unchecked(grid, coeffs)
}

/// Riemann-sum quadrature `∫_{𝕋³} g dx ≈ (2π/n)³ Σ_j g(x_j)`; exact for
/// trigonometric polynomials of degree below `n`.
pub(crate) fn quadrature(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    let cell = (2.0 * PI / n as f64).powi(3);
    values.sum::<f64>() * cell
}

/// Applies `f` pointwise on an `n³` grid and transforms back.
pub(crate) fn map_physical(
    field: &SpectralField,
    n: usize,
    f: impl Fn(Complex64) -> Complex64 + Sync + Send,
) -> SpectralField {
    let mut samples = to_physical(field, n);
    par::for_each_chunk_mut(&mut samples, n * n, |plane| {
        for u in plane.iter_mut() {
            *u = f(*u);
        }
    });
    from_physical(*field.grid(), n, samples)
}

/// Two-field version of [`map_physical`].
pub(crate) fn map_physical2(
    a: &SpectralField,
    b: &SpectralField,
    n: usize,
    f: impl Fn(Complex64, Complex64) -> Complex64 + Sync + Send,
) -> SpectralField {
    assert_eq!(a.grid(), b.grid());
    let mut sa = to_physical(a, n);
    let sb = to_physical(b, n);
    par::for_each_chunk_mut_indexed(&mut sa, n * n, |p, plane| {
        let other = &sb[p * n * n..(p + 1) * n * n];
        for (u, &v) in plane.iter_mut().zip(other) {
            *u = f(*u, v);
        }
    });
    from_physical(*a.grid(), n, sa)
}

/// Quantizes physical samples on the grid's `phys_points³` grid.
pub fn forward_transform(grid: TorusGrid, samples: &[Complex64]) -> Result<SpectralField> {
    let n = grid.phys_points();
    if samples.len() != n * n * n {
        return Err(Error::Config(format!(
            "expected {} physical samples ({}^3), got {}",
            n * n * n,
            n,
            samples.len()
        )));
    }
    Ok(from_physical(grid, n, samples.to_vec()))
}

/// Physical samples on the grid's `phys_points³` grid.
pub fn inverse_transform(field: &SpectralField) -> Vec<Complex64> {
    to_physical(field, field.grid().phys_points())
}

/// Free Schrödinger flow `e^{itΔ}`: multiplies `f̂(ξ)` by `e^{-it|ξ|²_θ}`.
pub fn apply_propagator(field: &SpectralField, t: f64) -> SpectralField {
    let grid = *field.grid();
    let coeffs = field
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, &c)| c * Complex64::from_polar(1.0, -t * grid.symbol(grid.mode(i))))
        .collect();
    SpectralField::from_vec_unchecked(grid, coeffs)
}

/// `∫|∇u|² dx = Σ_ξ |ξ|²_θ |f̂(ξ)|²`.
pub fn gradient_square(field: &SpectralField) -> f64 {
    let grid = field.grid();
    field
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| grid.symbol(grid.mode(i)) * c.norm_sqr())
        .sum()
}

/// Dealiased evaluation of `μ₁|u|²u + μ₂|u|⁴u`, truncated to the lattice.
pub fn evaluate_nonlinearity(field: &SpectralField, params: &EquationParams) -> Result<SpectralField> {
    let grid = field.grid();
    let needed = 6 * grid.mode_radius() + 1;
    if grid.phys_points() < needed {
        return Err(Error::Config(format!(
            "phys_points {} cannot dealias quintic products (need ≥ {needed})",
            grid.phys_points()
        )));
    }
    let p = *params;
    // Any larger grid is just as exact; a 5-smooth size keeps the FFT fast.
    let n = crate::fft::smooth_size_at_least(grid.phys_points());
    Ok(map_physical(field, n, move |u| {
        u * p.potential(u.norm_sqr())
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(grid: TorusGrid, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SpectralField::from_fn(grid, |_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
    }

    #[test]
    fn grid_rejects_thin_padding_and_bad_theta() {
        assert!(TorusGrid::new(2, 14, [1.0; 3]).is_err());
        assert!(TorusGrid::new(2, 15, [1.0; 3]).is_ok());
        assert!(TorusGrid::new(2, 15, [1.0, 0.0, 1.0]).is_err());
        assert!(TorusGrid::new(0, 15, [1.0; 3]).is_err());
    }

    #[test]
    fn lattice_indexing_roundtrips() {
        let g = TorusGrid::square(3);
        for i in 0..g.lattice_len() {
            assert_eq!(g.index_of(g.mode(i)), Some(i));
        }
        assert_eq!(g.index_of([4, 0, 0]), None);
    }

    #[test]
    fn constant_samples_give_zero_mode() {
        let g = TorusGrid::square(2);
        let n = g.phys_points();
        let c = Complex64::new(0.7, -0.2);
        let f = forward_transform(g, &vec![c; n * n * n]).unwrap();
        for (i, v) in f.coeffs().iter().enumerate() {
            let expect = if g.mode(i) == [0, 0, 0] { c * plane_wave_coefficient() } else { ZERO };
            assert!((v - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn forward_rejects_wrong_sample_count() {
        let g = TorusGrid::square(1);
        assert!(matches!(forward_transform(g, &[ZERO; 8]), Err(Error::Config(_))));
    }

    #[test]
    fn plane_wave_is_single_coefficient() {
        let g = TorusGrid::square(2);
        let k = [1, -2, 0];
        let n = g.phys_points();
        let samples: Vec<Complex64> = (0..n * n * n)
            .map(|j| {
                let x = [(j / (n * n)) as f64, ((j / n) % n) as f64, (j % n) as f64]
                    .map(|v| 2.0 * PI * v / n as f64);
                Complex64::from_polar(1.0, x[0] * k[0] as f64 + x[1] * k[1] as f64 + x[2] * k[2] as f64)
            })
            .collect();
        let f = forward_transform(g, &samples).unwrap();
        for (i, v) in f.coeffs().iter().enumerate() {
            let expect = if g.mode(i) == k { plane_wave_coefficient() } else { 0.0 };
            assert!((v - expect).norm() < 1e-11, "{:?}", g.mode(i));
        }
    }

    #[test]
    fn zero_field_inverts_to_zero() {
        let g = TorusGrid::square(1);
        assert!(inverse_transform(&SpectralField::zeros(g)).iter().all(|v| *v == ZERO));
    }

    #[test]
    fn propagator_single_mode_half_period() {
        let g = TorusGrid::square(1);
        let f = SpectralField::plane_wave(g, [1, 0, 0], Complex64::new(1.0, 0.0)).unwrap();
        let p = apply_propagator(&f, PI);
        let ratio = p.get([1, 0, 0]) / f.get([1, 0, 0]);
        assert!((ratio - Complex64::new(-1.0, 0.0)).norm() < 1e-14);
        assert_eq!(apply_propagator(&f, 0.0), f);
    }

    #[test]
    fn gradient_square_of_plane_wave() {
        let g = TorusGrid::square(3);
        let mut f = SpectralField::zeros(g);
        let idx = g.index_of([1, 2, 3]).unwrap();
        f.coeffs_mut()[idx] = Complex64::new(1.0, 0.0);
        assert!((gradient_square(&f) - 14.0).abs() < 1e-14);
        assert_eq!(gradient_square(&SpectralField::constant(g, Complex64::new(3.0, 0.0))), 0.0);
    }

    #[test]
    fn nonlinearity_of_plane_wave_and_constant() {
        let g = TorusGrid::square(2);
        let params = EquationParams::permissive(0.3, -1.7).unwrap();
        let u = SpectralField::plane_wave(g, [1, 1, -2], Complex64::new(1.0, 0.0)).unwrap();
        let out = evaluate_nonlinearity(&u, &params).unwrap();
        let expect = u.scale(Complex64::new(params.mu1 + params.mu2, 0.0));
        assert!(out.sub(&expect).norm_sq().sqrt() < 1e-11);

        let one = SpectralField::constant(g, Complex64::new(1.0, 0.0));
        let out = evaluate_nonlinearity(&one, &EquationParams::new(1.0, 1.0).unwrap()).unwrap();
        let two = SpectralField::constant(g, Complex64::new(2.0, 0.0));
        assert!(out.sub(&two).norm_sq().sqrt() < 1e-11);

        let zero = evaluate_nonlinearity(&SpectralField::zeros(g), &params).unwrap();
        assert!(zero.norm_sq() == 0.0);
    }

    #[test]
    fn propagator_is_isometry_on_random_field() {
        let g = TorusGrid::with_theta(3, [1.0, 2f64.sqrt(), 3f64.sqrt()]).unwrap();
        let f = random_field(g, 11);
        let p = apply_propagator(&f, 0.37);
        assert!(((p.norm_sq() - f.norm_sq()) / f.norm_sq()).abs() < 1e-14);
    }
}
