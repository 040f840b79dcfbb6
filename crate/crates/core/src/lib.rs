//! Pseudospectral simulation and norm diagnostics for the cubic-quintic
//! nonlinear Schrödinger equation
//!
//! ```text
//! (i∂_t + Δ)u = μ₁|u|²u + μ₂|u|⁴u   on 𝕋³ = (ℝ/2πℤ)³
//! ```
//!
//! The crate provides the spectral core ([`spectral`]), Littlewood-Paley
//! projectors ([`frequency`]), space-time diagnostics ([`norms`]), two
//! integrators ([`evolution`]), the cubic-perturbation global scheme driver
//! ([`gwp`]), randomized estimate probes ([`probe`]) and the file formats used
//! by the `cqnls` binary ([`cli`]).

pub mod cli;
pub mod error;
pub mod evolution;
pub mod fft;
pub mod frequency;
pub mod gwp;
pub mod initial;
pub mod norms;
pub mod par;
pub mod probe;
pub mod spectral;
pub mod trajectory;
pub mod variation;

pub use error::{Error, Result};
pub use spectral::{EquationParams, SpectralField, TorusGrid};
pub use trajectory::{TimeInterval, Trajectory};
