//! Littlewood-Paley projectors and sharp cube projectors.
//!
//! Frequencies are measured with the dispersion-weighted length
//! `|ξ|_θ = (Σ θ_i ξ_i²)^{1/2}` so dyadic shells line up with the propagator
//! on anisotropic tori.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::spectral::{SpectralField, TorusGrid};

fn glue(r: f64) -> f64 {
    if r > 0.0 {
        (-1.0 / r).exp()
    } else {
        0.0
    }
}

/// Smooth even bump: 1 on `|t| ≤ 1`, 0 on `|t| ≥ 2`, decreasing in between,
/// with `η(1.5) = 1/2`.
pub fn bump_eta(t: f64) -> f64 {
    let a = t.abs();
    if a <= 1.0 {
        return 1.0;
    }
    if a >= 2.0 {
        return 0.0;
    }
    let up = glue(2.0 - a);
    up / (up + glue(a - 1.0))
}

/// A dyadic frequency scale `N ∈ {1, 2, 4, ...}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyadicIndex(u32);

impl DyadicIndex {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::Argument(format!(
                "dyadic index must be a power of two ≥ 1, got {n}"
            )));
        }
        Ok(DyadicIndex(n))
    }

    pub fn value(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }
}

/// Shell multiplier `η_N(ξ)` evaluated at `|ξ|_θ = r`.
pub fn shell_multiplier(n: DyadicIndex, r: f64) -> f64 {
    let nf = n.as_f64();
    if n.0 == 1 {
        bump_eta(r)
    } else {
        bump_eta(r / nf) - bump_eta(2.0 * r / nf)
    }
}

/// Dyadic scales whose shells meet the lattice; their multipliers sum to one
/// on every retained mode.
pub fn active_shells(grid: &TorusGrid) -> Vec<DyadicIndex> {
    let top = grid.max_frequency();
    let mut shells = vec![DyadicIndex(1)];
    let mut n = 1u32;
    while (n as f64) < top {
        n *= 2;
        shells.push(DyadicIndex(n));
    }
    shells
}

/// Littlewood-Paley piece `P_N u`.
pub fn project_dyadic(field: &SpectralField, n: DyadicIndex) -> SpectralField {
    let grid = *field.grid();
    field.multiply_symbol(|xi| shell_multiplier(n, grid.symbol(xi).sqrt()))
}

/// Which side of the cutoff `project_cumulative` keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cutoff {
    /// `P_{≤N}`.
    AtMost,
    /// `P_{>N}`.
    Above,
}

/// Multiplier of `P_{≤N} = Σ_{M ≤ N} P_M`; by telescoping this is
/// `η(|ξ|/M*)` with `M*` the largest dyadic `≤ N`.
fn low_pass_multiplier(cutoff: f64, r: f64) -> f64 {
    if cutoff < 1.0 {
        return 0.0;
    }
    let top = 2f64.powi(cutoff.log2().floor() as i32);
    bump_eta(r / top)
}

/// `P_{≤N} u` or `P_{>N} u`; the two always sum to the identity.
pub fn project_cumulative(field: &SpectralField, cutoff: f64, side: Cutoff) -> Result<SpectralField> {
    if !(cutoff > 0.0 && cutoff.is_finite()) {
        return Err(Error::Argument(format!("cutoff must be positive, got {cutoff}")));
    }
    let grid = *field.grid();
    Ok(field.multiply_symbol(|xi| {
        let low = low_pass_multiplier(cutoff, grid.symbol(xi).sqrt());
        match side {
            Cutoff::AtMost => low,
            Cutoff::Above => 1.0 - low,
        }
    }))
}

/// Translated cube `C_z = size·z + size·[-1/2, 1/2)³`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CubeIndex(pub [i32; 3]);

impl CubeIndex {
    /// Cube of side `size` containing the lattice point `xi`.
    pub fn containing(xi: [i32; 3], size: f64) -> Self {
        CubeIndex(xi.map(|c| (c as f64 / size + 0.5).floor() as i32))
    }

    pub fn contains(&self, xi: [i32; 3], size: f64) -> bool {
        self.0.iter().zip(xi).all(|(&z, c)| {
            let lo = size * (z as f64 - 0.5);
            let c = c as f64;
            lo <= c && c < lo + size
        })
    }

    /// `⟨z⟩ = (1 + |z|²)^{1/2}`.
    pub fn japanese_bracket(&self) -> f64 {
        (1.0 + self.0.iter().map(|&c| (c as f64).powi(2)).sum::<f64>()).sqrt()
    }
}

/// Sharp restriction `χ_{C_z}(ξ) f̂(ξ)` to a cube of side `size` (1 for the
/// unit cubes of the `X^s`/`Y^s` norms).
pub fn project_cube(field: &SpectralField, z: CubeIndex, size: f64) -> SpectralField {
    field.multiply_symbol(|xi| if z.contains(xi, size) { 1.0 } else { 0.0 })
}

/// Lattice indices grouped by the cube of side `size` that contains them.
pub fn cube_partition(grid: &TorusGrid, size: f64) -> BTreeMap<CubeIndex, Vec<usize>> {
    let mut cubes: BTreeMap<CubeIndex, Vec<usize>> = BTreeMap::new();
    for (i, xi) in grid.modes().enumerate() {
        cubes.entry(CubeIndex::containing(xi, size)).or_default().push(i);
    }
    cubes
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(grid: TorusGrid, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SpectralField::from_fn(grid, |_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
    }

    #[test]
    fn bump_values() {
        assert_eq!(bump_eta(0.5), 1.0);
        assert_eq!(bump_eta(3.0), 0.0);
        assert!((bump_eta(1.5) - 0.5).abs() < 1e-15);
        for t in [0.0, 0.9, 1.2, 1.7, 1.99, 2.4] {
            assert_eq!(bump_eta(t), bump_eta(-t));
        }
        let mut prev = 1.0;
        for i in 0..=200 {
            let v = bump_eta(1.0 + i as f64 / 200.0);
            assert!(v <= prev && (0.0..=1.0).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn dyadic_index_validation() {
        assert!(DyadicIndex::new(0).is_err());
        assert!(DyadicIndex::new(6).is_err());
        assert_eq!(DyadicIndex::new(8).unwrap().value(), 8);
    }

    #[test]
    fn plane_wave_at_shell_center_is_kept() {
        let g = TorusGrid::square(4);
        for n in [2, 4] {
            let u = SpectralField::plane_wave(g, [n, 0, 0], Complex64::new(1.0, 0.0)).unwrap();
            let p = project_dyadic(&u, DyadicIndex::new(n as u32).unwrap());
            assert_eq!(p, u);
        }
    }

    #[test]
    fn shells_tile_lattice() {
        let g = TorusGrid::with_theta(5, [1.0, 2f64.sqrt(), 0.7]).unwrap();
        let shells = active_shells(&g);
        for xi in g.modes() {
            let r = g.symbol(xi).sqrt();
            let s: f64 = shells.iter().map(|&n| shell_multiplier(n, r)).sum();
            assert!((s - 1.0).abs() <= 1e-13);
        }
        let past = DyadicIndex::new(2 * shells.last().unwrap().value()).unwrap();
        let u = random(g, 3);
        assert_eq!(project_dyadic(&u, past).norm_sq(), 0.0);
    }

    #[test]
    fn cumulative_pieces_sum_to_identity() {
        let g = TorusGrid::square(4);
        let u = random(g, 5);
        for cut in [0.5, 1.0, 3.0, 4.0, 7.5] {
            let lo = project_cumulative(&u, cut, Cutoff::AtMost).unwrap();
            let hi = project_cumulative(&u, cut, Cutoff::Above).unwrap();
            assert!(lo.add(&hi).sub(&u).norm_sq().sqrt() <= 1e-13);
        }
        let k = g.mode_radius() as f64;
        assert_eq!(project_cumulative(&u, 2.0 * k, Cutoff::AtMost).unwrap(), u);
        assert_eq!(project_cumulative(&u, 4.0 * k, Cutoff::Above).unwrap().norm_sq(), 0.0);
        assert!(project_cumulative(&u, 0.0, Cutoff::AtMost).is_err());
    }

    #[test]
    fn unit_cube_selects_its_center() {
        let g = TorusGrid::square(3);
        let u = SpectralField::plane_wave(g, [1, 2, 3], Complex64::new(1.0, 0.0)).unwrap();
        for z in g.modes() {
            let p = project_cube(&u, CubeIndex(z), 1.0);
            if z == [1, 2, 3] {
                assert_eq!(p, u);
            } else {
                assert_eq!(p.norm_sq(), 0.0);
            }
        }
    }

    #[test]
    fn cubes_partition_and_are_orthogonal() {
        let g = TorusGrid::square(3);
        let u = random(g, 9);
        for size in [1.0, 2.0, 4.0] {
            let parts = cube_partition(&g, size);
            let mut sum = SpectralField::zeros(g);
            let mut energy = 0.0;
            let pieces: Vec<_> = parts.keys().map(|&z| project_cube(&u, z, size)).collect();
            for p in &pieces {
                sum = sum.add(p);
                energy += p.norm_sq();
            }
            assert!(sum.sub(&u).norm_sq() == 0.0);
            assert!((energy - u.norm_sq()).abs() < 1e-12);
            let inner: Complex64 = pieces[0]
                .coeffs()
                .iter()
                .zip(pieces[1].coeffs())
                .map(|(a, b)| a * b.conj())
                .sum();
            assert!(inner.norm() <= 1e-13);
        }
    }
}
