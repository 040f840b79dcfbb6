//! Time integration.
//!
//! * [`strang_step`] / [`evolve`]: Strang splitting `N_{dt/2} ∘ L_dt ∘ N_{dt/2}`
//!   with the exact free flow `L` and the exact pointwise phase flow
//!   `N_τ u = u e^{-iτ(μ₁|u|² + μ₂|u|⁴)}`.
//! * [`picard_solve`]: fixed-point iteration of the Duhamel map
//!   `Φ(u) = e^{itΔ}u₀ − i∫₀ᵗ e^{i(t−s)Δ}F(u(s)) ds` with the integral taken
//!   by the trapezoidal rule in the interaction picture.
//! * [`partition_by_zprime`]: greedy split of an interval into pieces on
//!   which the `Z'` proxy stays below a budget.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{energy, sobolev_norm, SpaceTimeProfile};
use crate::par;
use crate::spectral::{
    apply_propagator, evaluate_nonlinearity, map_physical, EquationParams, SpectralField,
};
use crate::trajectory::{TimeInterval, Trajectory, TIME_TOL};

/// Integrator and fixed-point settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    pub picard_max_iters: usize,
    /// Stop when `sup_k ‖u^{(n+1)}(t_k) − u^{(n)}(t_k)‖_{H¹}` falls below this.
    pub picard_tol: f64,
    /// `Z'` proxy budget `δ` for the free evolution in small-data runs.
    pub smallness_delta: f64,
    pub contraction_checks: bool,
    /// `H¹` norm above which a run is reported as suspected blow-up.
    pub h1_ceiling: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt: 1e-3,
            picard_max_iters: 50,
            picard_tol: 1e-12,
            smallness_delta: 0.1,
            contraction_checks: true,
            h1_ceiling: 1e8,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Argument(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.picard_tol > 0.0) || !(self.smallness_delta > 0.0) || !(self.h1_ceiling > 0.0) {
            return Err(Error::Argument("solver tolerances must be positive".into()));
        }
        if self.picard_max_iters == 0 {
            return Err(Error::Argument("picard_max_iters must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }
}

/// Uniform grid `a, a+dt, …` with a shortened final step landing on `b`.
pub fn time_grid(interval: &TimeInterval, dt: f64) -> Vec<f64> {
    let (a, b) = (interval.start(), interval.end());
    let steps = (((b - a) / dt) - 1e-9).ceil().max(1.0) as usize;
    let mut times: Vec<f64> = (0..steps).map(|k| a + k as f64 * dt).collect();
    times.push(b);
    times
}

/// Exact pointwise phase flow of the nonlinearity on the collocation grid.
fn phase_flow(field: &SpectralField, tau: f64, params: &EquationParams) -> SpectralField {
    let n = field.grid().modes_per_axis();
    let p = *params;
    map_physical(field, n, move |u| {
        u * Complex64::from_polar(1.0, -tau * p.potential(u.norm_sqr()))
    })
}

/// One Strang step. The nonlinear half-steps act on the `(2K+1)³`
/// collocation grid, where the sample-coefficient map is a bijection, so
/// both substeps are exact isometries of `Σ|f̂|²`.
pub fn strang_step(field: &SpectralField, dt: f64, params: &EquationParams) -> SpectralField {
    if params.mu1 == 0.0 && params.mu2 == 0.0 {
        return apply_propagator(field, dt);
    }
    let half = phase_flow(field, 0.5 * dt, params);
    let free = apply_propagator(&half, dt);
    phase_flow(&free, 0.5 * dt, params)
}

/// A split-step run with its energy bookkeeping.
#[derive(Clone, Debug)]
pub struct Evolution {
    pub trajectory: Trajectory,
    pub energy_start: f64,
    pub energy_end: f64,
}

impl Evolution {
    /// `|E(end) − E(start)|`, relative when `E(start) ≠ 0`.
    pub fn energy_drift(&self) -> f64 {
        let d = (self.energy_end - self.energy_start).abs();
        if self.energy_start != 0.0 {
            d / self.energy_start.abs()
        } else {
            d
        }
    }
}

/// Strang integration through the given node times, checking every step
/// for blow-up.
pub(crate) fn integrate_nodes(
    u0: &SpectralField,
    times: &[f64],
    params: &EquationParams,
    config: &SolverConfig,
) -> Result<Vec<SpectralField>> {
    let mut fields = Vec::with_capacity(times.len());
    fields.push(u0.clone());
    for k in 1..times.len() {
        let next = strang_step(&fields[k - 1], times[k] - times[k - 1], params);
        if !next.is_finite() {
            return Err(Error::BlowUpSuspected {
                last_valid_time: times[k - 1],
                reason: "non-finite coefficients".into(),
            });
        }
        let h1 = sobolev_norm(&next, 1.0);
        if h1 > config.h1_ceiling {
            return Err(Error::BlowUpSuspected {
                last_valid_time: times[k - 1],
                reason: format!("H¹ norm {h1:.3e} above ceiling {:.3e}", config.h1_ceiling),
            });
        }
        fields.push(next);
    }
    Ok(fields)
}

/// Integrates from `u0` at `I.start()` over `I`, storing every step.
pub fn evolve(
    u0: &SpectralField,
    interval: &TimeInterval,
    params: &EquationParams,
    config: &SolverConfig,
) -> Result<Evolution> {
    config.validate()?;
    let times = time_grid(interval, config.dt);
    let fields = integrate_nodes(u0, &times, params, config)?;
    let energy_start = energy(u0, params);
    let energy_end = energy(fields.last().expect("at least one node"), params);
    let trajectory = Trajectory::new(*interval, *u0.grid(), *params, times, fields)?;
    Ok(Evolution {
        trajectory,
        energy_start,
        energy_end,
    })
}

/// Result of a Duhamel fixed-point iteration.
#[derive(Clone, Debug)]
pub struct PicardOutcome {
    pub trajectory: Trajectory,
    pub iterations: usize,
    /// `sup_k ‖u^{(n)} − u^{(n−1)}‖_{H¹}` for `n = 1, 2, …`.
    pub residuals: Vec<f64>,
    /// `residuals[n] / residuals[n−1]` (empty unless contraction checks are on).
    pub ratios: Vec<f64>,
    pub converged: bool,
}

pub(crate) struct FixedPoint {
    pub fields: Vec<SpectralField>,
    pub iterations: usize,
    pub residuals: Vec<f64>,
    pub ratios: Vec<f64>,
    pub converged: bool,
}

/// Iterates `u ↦ e^{iτΔ}[u(t₀) − i ∫ e^{-isΔ} F_k(u(s)) ds]` on the node grid
/// `times`, starting from the free evolution of `start`.
pub(crate) fn duhamel_fixed_point<F>(
    start: &SpectralField,
    times: &[f64],
    forcing: F,
    config: &SolverConfig,
) -> Result<FixedPoint>
where
    F: Fn(usize, &SpectralField) -> SpectralField + Sync + Send,
{
    let t0 = times[0];
    let offsets: Vec<f64> = times.iter().map(|t| t - t0).collect();
    let mut current: Vec<SpectralField> = offsets.iter().map(|&s| apply_propagator(start, s)).collect();
    let mut residuals = Vec::new();
    let mut ratios = Vec::new();
    let mut converged = false;
    let mut growing = 0usize;
    let mut iterations = 0;
    for it in 1..=config.picard_max_iters {
        iterations = it;
        let pulled = par::map_range(times.len(), |k| {
            apply_propagator(&forcing(k, &current[k]), -offsets[k])
        });
        let mut integral = SpectralField::zeros(*start.grid());
        let mut next = Vec::with_capacity(times.len());
        next.push(start.clone());
        for k in 1..times.len() {
            let h = Complex64::new(0.5 * (offsets[k] - offsets[k - 1]), 0.0);
            integral.axpy(h, &pulled[k - 1]);
            integral.axpy(h, &pulled[k]);
            let mut inner = start.clone();
            inner.axpy(Complex64::new(0.0, -1.0), &integral);
            next.push(apply_propagator(&inner, offsets[k]));
        }
        if next.iter().any(|f| !f.is_finite()) {
            return Err(Error::NoContraction {
                iteration: it,
                ratio: f64::INFINITY,
            });
        }
        let diffs = par::map_range(times.len(), |k| sobolev_norm(&next[k].sub(&current[k]), 1.0));
        let residual = diffs.iter().cloned().fold(0.0, f64::max);
        let scale = next.iter().map(|f| sobolev_norm(f, 1.0)).fold(0.0, f64::max);
        // Finite coefficients can still overflow the norm sums.
        if !residual.is_finite() || !scale.is_finite() {
            return Err(Error::NoContraction {
                iteration: it,
                ratio: f64::INFINITY,
            });
        }
        if config.contraction_checks {
            if let Some(&prev) = residuals.last() {
                if prev > 0.0 {
                    let ratio = residual / prev;
                    ratios.push(ratio);
                    growing = if ratio >= 1.0 { growing + 1 } else { 0 };
                }
            }
        }
        residuals.push(residual);
        current = next;
        // Below a few ulps of the iterate the residual is roundoff.
        let floor = 64.0 * f64::EPSILON * scale;
        if residual <= config.picard_tol || residual <= floor {
            converged = true;
            break;
        }
        if growing >= 3 {
            return Err(Error::NoContraction {
                iteration: it,
                ratio: *ratios.last().unwrap_or(&f64::INFINITY),
            });
        }
    }
    Ok(FixedPoint {
        fields: current,
        iterations,
        residuals,
        ratios,
        converged,
    })
}

/// Solves the equation on `I` (|I| ≤ 1) as a fixed point of the Duhamel map.
pub fn picard_solve(
    u0: &SpectralField,
    interval: &TimeInterval,
    params: &EquationParams,
    config: &SolverConfig,
) -> Result<PicardOutcome> {
    config.validate()?;
    if interval.length() > 1.0 + TIME_TOL {
        return Err(Error::Precondition(format!(
            "picard_solve needs |I| ≤ 1, got {}",
            interval.length()
        )));
    }
    let times = time_grid(interval, config.dt);
    let p = *params;
    let fp = duhamel_fixed_point(
        u0,
        &times,
        |_, u| evaluate_nonlinearity(u, &p).expect("grid invariants guarantee dealiasing"),
        config,
    )?;
    let trajectory = Trajectory::new(*interval, *u0.grid(), *params, times, fp.fields)?;
    Ok(PicardOutcome {
        trajectory,
        iterations: fp.iterations,
        residuals: fp.residuals,
        ratios: fp.ratios,
        converged: fp.converged,
    })
}

/// Greedy left-to-right partition of `I` into maximal node intervals with
/// `zprime_proxy(v, I_j) ≤ eta`.
pub fn partition_by_zprime(v: &Trajectory, interval: &TimeInterval, eta: f64) -> Result<Vec<TimeInterval>> {
    if !(eta > 0.0) {
        return Err(Error::Argument(format!("eta must be positive, got {eta}")));
    }
    let (lo, hi) = v.node_range(interval)?;
    if hi == lo {
        return Err(Error::Argument("interval spans a single node".into()));
    }
    let profile = SpaceTimeProfile::for_nodes(v, lo, hi);
    let times = v.times();
    let last = hi - lo;
    let mut cuts = Vec::new();
    let mut start = 0usize;
    while start < last {
        let mut acc = profile.y1_accumulator(start);
        let mut sup_h1 = profile.sup_h1(start, start);
        let mut end = start;
        while end < last {
            let y_sq = acc.extend();
            let e = acc.hi();
            sup_h1 = sup_h1.max(profile.sup_h1(e, e));
            let x1 = sup_h1.max(y_sq.sqrt());
            let zp = (profile.z_norm(start, e) * x1).sqrt();
            if zp > eta {
                if e == start + 1 {
                    return Err(Error::PartitionInfeasible {
                        time: times[lo + start],
                        value: zp,
                        eta,
                    });
                }
                break;
            }
            end = e;
        }
        cuts.push(TimeInterval::new(times[lo + start], times[lo + end])?);
        start = end;
    }
    Ok(cuts)
}
