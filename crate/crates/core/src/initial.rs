//! Initial data families used by the binary, the tests and the benches.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::sobolev_norm;
use crate::spectral::{SpectralField, TorusGrid};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    Zero,
    /// `u ≡ amplitude`.
    Constant { amplitude: f64 },
    /// `amplitude · e^{i mode·x}`.
    PlaneWave { mode: [i32; 3], amplitude: f64 },
    /// Seeded complex Gaussian coefficients under the envelope
    /// `exp(−|ξ|²/(2·width²))`, rescaled so that `‖u‖_{H¹} = amplitude`.
    Gaussian { width: f64, amplitude: f64, seed: u64 },
}

impl InitialData {
    pub fn build(&self, grid: TorusGrid) -> Result<SpectralField> {
        match *self {
            InitialData::Zero => Ok(SpectralField::zeros(grid)),
            InitialData::Constant { amplitude } => Ok(SpectralField::constant(grid, Complex64::new(amplitude, 0.0))),
            InitialData::PlaneWave { mode, amplitude } => {
                SpectralField::plane_wave(grid, mode, Complex64::new(amplitude, 0.0))
            }
            InitialData::Gaussian { width, amplitude, seed } => {
                if !(width > 0.0) {
                    return Err(Error::Argument(format!("gaussian width must be positive, got {width}")));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let raw = SpectralField::from_fn(grid, |xi| {
                    let r2 = xi.iter().map(|&c| (c as f64).powi(2)).sum::<f64>();
                    let env = (-r2 / (2.0 * width * width)).exp();
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re, im) * env
                });
                Ok(scale_to_h1(&raw, amplitude))
            }
        }
    }
}

/// Rescales `field` to the given `H¹` norm (a zero field stays zero).
pub fn scale_to_h1(field: &SpectralField, target: f64) -> SpectralField {
    let h1 = sobolev_norm(field, 1.0);
    if h1 == 0.0 {
        return field.clone();
    }
    field.scale(Complex64::new(target / h1, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_hits_target_norm_and_is_seeded() {
        let grid = TorusGrid::square(4);
        let d = InitialData::Gaussian { width: 1.5, amplitude: 0.7, seed: 11 };
        let a = d.build(grid).unwrap();
        assert!((sobolev_norm(&a, 1.0) - 0.7).abs() < 1e-14);
        assert_eq!(a, d.build(grid).unwrap());
        let other = InitialData::Gaussian { width: 1.5, amplitude: 0.7, seed: 12 }.build(grid).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn plane_wave_outside_lattice_is_rejected() {
        let grid = TorusGrid::square(2);
        assert!(InitialData::PlaneWave { mode: [3, 0, 0], amplitude: 1.0 }.build(grid).is_err());
    }
}
