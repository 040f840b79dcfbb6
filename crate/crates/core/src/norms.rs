//! Scalar diagnostics: conserved quantities, Sobolev norms, space-time
//! Lebesgue norms, the dyadic `Z` norm and computable lower-bound surrogates
//! for the `V²_Δ`, `Y^s` and `X¹` scale.
//!
//! The atomic `X¹` norm is an infimum over `U²` decompositions and cannot be
//! evaluated. [`x1_proxy_and_zprime`] replaces it with
//! `max(sup_t ‖u(t)‖_{H¹}, y_norm_proxy(u, 1, I))`, both of which it
//! dominates; every `Z'` threshold downstream is calibrated against this
//! surrogate.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frequency::{active_shells, project_dyadic};
use crate::par;
use crate::spectral::{
    apply_propagator, gradient_square, quadrature, to_physical, EquationParams, SpectralField,
    TorusGrid,
};
use crate::trajectory::{trapezoid_over, TimeInterval, Trajectory, TIME_TOL};
use crate::variation::two_variation_sq_by;

/// `M(u) = ∫|u|²`, evaluated by Plancherel.
pub fn mass(field: &SpectralField) -> f64 {
    field.norm_sq()
}

/// `∫|∇u|²`.
pub fn kinetic(field: &SpectralField) -> f64 {
    gradient_square(field)
}

/// `∫ μ₁/4 |u|⁴ + μ₂/6 |u|⁶`, exact on a grid with more than `6K` points.
pub fn potential_energy(field: &SpectralField, params: &EquationParams) -> f64 {
    if params.mu1 == 0.0 && params.mu2 == 0.0 {
        return 0.0;
    }
    let n = field.grid().quadrature_points(6);
    let samples = to_physical(field, n);
    quadrature(
        samples.iter().map(|u| {
            let a = u.norm_sqr();
            a * a * (0.25 * params.mu1 + params.mu2 * a / 6.0)
        }),
        n,
    )
}

/// `E(u) = ∫ ½|∇u|² + μ₁/4 |u|⁴ + μ₂/6 |u|⁶`.
pub fn energy(field: &SpectralField, params: &EquationParams) -> f64 {
    0.5 * kinetic(field) + potential_energy(field, params)
}

/// `⟨ξ⟩^{2s}_θ = (1 + |ξ|²_θ)^s` for every lattice index.
fn sobolev_weights(grid: &TorusGrid, s: f64) -> Vec<f64> {
    grid.symbols().into_iter().map(|q| (1.0 + q).powf(s)).collect()
}

/// `‖u‖_{H^s} = (Σ ⟨ξ⟩^{2s}_θ |f̂(ξ)|²)^{1/2}`.
pub fn sobolev_norm(field: &SpectralField, s: f64) -> f64 {
    let grid = field.grid();
    field
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| (1.0 + grid.symbol(grid.mode(i))).powf(s) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `‖u‖_{H^s}` of a difference without allocating it.
fn sobolev_dist_sq(a: &[Complex64], b: &[Complex64], weights: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(weights)
        .map(|((x, y), w)| w * (x - y).norm_sqr())
        .sum()
}

/// `∫_{𝕋³} |u|^p dx` on a grid that is exact when `p` is an even integer.
pub(crate) fn lp_integral(field: &SpectralField, p: f64) -> f64 {
    let n = field.grid().quadrature_points(p.ceil().max(2.0) as usize);
    let samples = to_physical(field, n);
    let half = 0.5 * p;
    if half.fract() == 0.0 {
        let k = half as i32;
        quadrature(samples.iter().map(|u| u.norm_sqr().powi(k)), n)
    } else {
        quadrature(samples.iter().map(|u| u.norm_sqr().powf(half)), n)
    }
}

/// `‖u‖_{L^p_{t,x}(J × 𝕋³)}`: spatial quadrature per node, composite
/// trapezoid in time.
pub fn spacetime_lp(trajectory: &Trajectory, p: f64, j: &TimeInterval) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Argument(format!("p must lie in [1, ∞), got {p}")));
    }
    if !trajectory.interval().contains_interval(j) {
        return Err(Error::Argument(format!(
            "interval [{}, {}] exceeds stored trajectory",
            j.start(),
            j.end()
        )));
    }
    let values = par::map_slice(trajectory.fields(), |f| lp_integral(f, p));
    Ok(trapezoid_over(trajectory.times(), &values, j.start(), j.end()).powf(1.0 / p))
}

/// `Σ_N N³ ‖P_N u‖⁴_{L⁴_x}` for one snapshot.
pub fn dyadic_l4_density(field: &SpectralField) -> f64 {
    let grid = field.grid();
    let n = grid.quadrature_points(4);
    active_shells(grid)
        .into_iter()
        .map(|shell| {
            let piece = project_dyadic(field, shell);
            if piece.norm_sq() == 0.0 {
                return 0.0;
            }
            let samples = to_physical(&piece, n);
            shell.as_f64().powi(3) * quadrature(samples.iter().map(|u| u.norm_sqr().powi(2)), n)
        })
        .sum()
}

/// Precomputed per-node data for repeated space-time norm evaluation on
/// sub-ranges of one trajectory.
#[derive(Clone, Debug)]
pub struct SpaceTimeProfile {
    times: Vec<f64>,
    /// `Σ_N N³ ‖P_N u(t_k)‖⁴_{L⁴}`.
    z_density: Vec<f64>,
    h1: Vec<f64>,
    /// Mode-major `e^{-it_kΔ} u(t_k)`: `interaction[mode][node]`.
    interaction: Vec<Vec<Complex64>>,
    /// `⟨ξ⟩²_θ` per mode.
    h1_weights: Vec<f64>,
}

impl SpaceTimeProfile {
    pub fn new(trajectory: &Trajectory) -> Self {
        Self::for_nodes(trajectory, 0, trajectory.len().saturating_sub(1))
    }

    /// Profile of nodes `lo..=hi` only.
    pub fn for_nodes(trajectory: &Trajectory, lo: usize, hi: usize) -> Self {
        let (times, fields) = if trajectory.is_empty() {
            (Vec::new(), &trajectory.fields()[0..0])
        } else {
            (trajectory.times()[lo..=hi].to_vec(), &trajectory.fields()[lo..=hi])
        };
        let z_density = par::map_slice(fields, dyadic_l4_density);
        let h1 = fields.iter().map(|f| sobolev_norm(f, 1.0)).collect();
        let grid = trajectory.grid();
        let modes = grid.lattice_len();
        let pulled: Vec<SpectralField> = fields
            .iter()
            .zip(&times)
            .map(|(f, &t)| apply_propagator(f, -t))
            .collect();
        let interaction = par::map_range(modes, |m| pulled.iter().map(|f| f.coeffs()[m]).collect());
        SpaceTimeProfile {
            times,
            z_density,
            h1,
            interaction,
            h1_weights: sobolev_weights(grid, 1.0),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// `Z` norm over nodes `lo..=hi`: the window objective is additive in
    /// time, so its supremum is attained on a maximal window of length ≤ 1.
    pub fn z_norm(&self, lo: usize, hi: usize) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let t = &self.times;
        let mut prefix = vec![0.0; hi - lo + 1];
        for k in lo + 1..=hi {
            prefix[k - lo] = prefix[k - lo - 1]
                + 0.5 * (t[k] - t[k - 1]) * (self.z_density[k] + self.z_density[k - 1]);
        }
        let mut best = 0.0f64;
        let mut right = lo;
        for left in lo..=hi {
            right = right.max(left);
            while right < hi && t[right + 1] - t[left] <= 1.0 + TIME_TOL {
                right += 1;
            }
            best = best.max(prefix[right - lo] - prefix[left - lo]);
        }
        best.max(0.0).powf(0.25)
    }

    pub fn sup_h1(&self, lo: usize, hi: usize) -> f64 {
        self.h1[lo..=hi].iter().cloned().fold(0.0, f64::max)
    }

    /// `Σ_z ⟨z⟩^{2s} ‖P_{C_z}u‖²_{V²_Δ}` over nodes `lo..=hi` (unit cubes hold
    /// one lattice point each).
    pub fn y_norm_sq(&self, grid: &TorusGrid, s: f64, lo: usize, hi: usize) -> f64 {
        let weights = if s == 1.0 { self.h1_weights.clone() } else { sobolev_weights(grid, s) };
        let per_mode = par::map_range(self.interaction.len(), |m| {
            let series = &self.interaction[m][lo..=hi];
            if series.iter().all(|c| *c == series[0]) {
                return 0.0;
            }
            weights[m] * crate::variation::scalar_two_variation_sq(series)
        });
        per_mode.iter().sum()
    }

    /// Starts an incremental `Y¹` accumulator at node `lo`.
    pub fn y1_accumulator(&self, lo: usize) -> Y1Accumulator<'_> {
        Y1Accumulator {
            profile: self,
            lo,
            hi: lo,
            best: vec![vec![0.0]; self.interaction.len()],
        }
    }
}

/// Extends the cube-wise 2-variation DP one node at a time, so that the
/// `Y¹` proxy of `[t_lo, t_hi]` is available for every `hi` at the cost of a
/// single evaluation on the final range.
pub struct Y1Accumulator<'a> {
    profile: &'a SpaceTimeProfile,
    lo: usize,
    hi: usize,
    best: Vec<Vec<f64>>,
}

impl Y1Accumulator<'_> {
    pub fn hi(&self) -> usize {
        self.hi
    }

    /// Adds node `hi + 1`; returns the squared `Y¹` proxy of the new range.
    pub fn extend(&mut self) -> f64 {
        let prof = self.profile;
        let lo = self.lo;
        let j = self.hi + 1;
        assert!(j < prof.len(), "accumulator ran past the trajectory");
        par::for_each_chunk_mut_indexed(&mut self.best, 64, |chunk_idx, chunk| {
            for (offset, best) in chunk.iter_mut().enumerate() {
                let series = &prof.interaction[chunk_idx * 64 + offset];
                let vj = series[j];
                let mut b = 0.0f64;
                for (i, &bi) in best.iter().enumerate() {
                    let d = series[lo + i] - vj;
                    b = b.max(bi + d.re * d.re + d.im * d.im);
                }
                best.push(b);
            }
        });
        self.hi = j;
        self.value_sq()
    }

    pub fn value_sq(&self) -> f64 {
        self.best
            .iter()
            .zip(&self.profile.h1_weights)
            .map(|(b, w)| w * b.last().copied().unwrap_or(0.0))
            .sum()
    }
}

/// `Z` norm of `u` on `I`: supremum over node windows `J ⊂ I`, `|J| ≤ 1`, of
/// `(Σ_N N³ ‖P_N u‖⁴_{L⁴(J)})^{1/4}`.
pub fn z_norm(trajectory: &Trajectory, i: &TimeInterval) -> Result<f64> {
    let (lo, hi) = trajectory.node_range(i)?;
    let profile = SpaceTimeProfile {
        times: trajectory.times()[lo..=hi].to_vec(),
        z_density: par::map_slice(&trajectory.fields()[lo..=hi], dyadic_l4_density),
        h1: Vec::new(),
        interaction: Vec::new(),
        h1_weights: Vec::new(),
    };
    Ok(profile.z_norm(0, hi - lo))
}

/// `V²` proxy of `e^{-itΔ}u` in `H^s` over the nodes in `J` (a lower bound
/// of the continuum norm, which also sees the jump to zero at infinity).
pub fn v2_delta_proxy(trajectory: &Trajectory, s: f64, j: &TimeInterval) -> Result<f64> {
    let (lo, hi) = trajectory.node_range(j)?;
    let weights = sobolev_weights(trajectory.grid(), s);
    let pulled: Vec<SpectralField> = (lo..=hi)
        .map(|k| apply_propagator(&trajectory.fields()[k], -trajectory.times()[k]))
        .collect();
    let sq = two_variation_sq_by(pulled.len(), |a, b| {
        sobolev_dist_sq(pulled[a].coeffs(), pulled[b].coeffs(), &weights)
    });
    Ok(sq.sqrt())
}

/// Cube-wise `Y^s` proxy `(Σ_z ⟨z⟩^{2s} ‖P_{C_z}u‖²_{V²_Δ})^{1/2}` over `J`.
pub fn y_norm_proxy(trajectory: &Trajectory, s: f64, j: &TimeInterval) -> Result<f64> {
    let (lo, hi) = trajectory.node_range(j)?;
    let grid = *trajectory.grid();
    let weights = sobolev_weights(&grid, s);
    let pulled: Vec<SpectralField> = (lo..=hi)
        .map(|k| apply_propagator(&trajectory.fields()[k], -trajectory.times()[k]))
        .collect();
    let per_mode = par::map_range(grid.lattice_len(), |m| {
        let series: Vec<Complex64> = pulled.iter().map(|f| f.coeffs()[m]).collect();
        weights[m] * crate::variation::scalar_two_variation_sq(&series)
    });
    Ok(per_mode.iter().sum::<f64>().sqrt())
}

/// `(x1_proxy, zprime_proxy)` on `I` with
/// `x1_proxy = max(sup_t ‖u‖_{H¹}, y_norm_proxy(u, 1, I))` and
/// `zprime_proxy = (z_norm · x1_proxy)^{1/2}`.
pub fn x1_proxy_and_zprime(trajectory: &Trajectory, i: &TimeInterval) -> Result<(f64, f64)> {
    let (lo, hi) = trajectory.node_range(i)?;
    let profile = SpaceTimeProfile::for_nodes(trajectory, lo, hi);
    let last = hi - lo;
    let x1 = profile
        .sup_h1(0, last)
        .max(profile.y_norm_sq(trajectory.grid(), 1.0, 0, last).sqrt());
    let z = profile.z_norm(0, last);
    Ok((x1, (z * x1).sqrt()))
}

/// Largest `C ≥ 0` with `μ₁/4 x² + μ₂/6 x³ ≥ −C x` for all `x = |u|² ≥ 0`,
/// found by golden-section maximization of `−μ₁x/4 − μ₂x²/6`.
pub fn kinetic_bound_constant(params: &EquationParams) -> Result<f64> {
    if !(params.mu2 > 0.0) {
        return Err(Error::UnsupportedRegime(format!(
            "kinetic bound needs μ₂ > 0, got μ₂ = {}",
            params.mu2
        )));
    }
    let deficit = |x: f64| -0.25 * params.mu1 * x - params.mu2 * x * x / 6.0;
    let mut lo = 0.0;
    let mut hi = 1.5 * params.mu1.abs() / params.mu2 + 1.0;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let (mut fa, mut fb) = (deficit(a), deficit(b));
    for _ in 0..200 {
        if hi - lo <= 1e-15 * hi.max(1.0) {
            break;
        }
        if fa > fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = deficit(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = deficit(b);
        }
    }
    Ok(deficit(0.5 * (lo + hi)).max(0.0))
}

/// Aggregate diagnostics of a trajectory on one interval. Single-time
/// quantities refer to the first node of the interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub t_start: f64,
    pub t_end: f64,
    pub mass: f64,
    pub energy: f64,
    pub kinetic: f64,
    pub h1: f64,
    pub linf_h1: f64,
    pub z_norm: f64,
    pub x1_proxy: f64,
    pub zprime_proxy: f64,
    pub y1_proxy: f64,
}

impl NormReport {
    pub fn measure(trajectory: &Trajectory, i: &TimeInterval) -> Result<NormReport> {
        let (lo, hi) = trajectory.node_range(i)?;
        let profile = SpaceTimeProfile::for_nodes(trajectory, lo, hi);
        let last = hi - lo;
        let first = &trajectory.fields()[lo];
        let params = trajectory.params();
        let linf_h1 = profile.sup_h1(0, last);
        let y1 = profile.y_norm_sq(trajectory.grid(), 1.0, 0, last).sqrt();
        let x1 = linf_h1.max(y1);
        let z = profile.z_norm(0, last);
        Ok(NormReport {
            t_start: i.start(),
            t_end: i.end(),
            mass: mass(first),
            energy: energy(first, &params),
            kinetic: kinetic(first),
            h1: sobolev_norm(first, 1.0),
            linf_h1,
            z_norm: z,
            x1_proxy: x1,
            zprime_proxy: (z * x1).sqrt(),
            y1_proxy: y1,
        })
    }
}
