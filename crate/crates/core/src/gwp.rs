//! Global scheme treating the cubic term as a perturbation of the defocusing
//! quintic flow.
//!
//! On each outer window `J` (with `|J| ≤ η̃`) the reference `v` solves
//! `(i∂_t+Δ)v = |v|⁴v` from `v(a) = u(a)`. The window is cut into pieces
//! `I_j` on which `‖v‖_{Z'(I_j)} ≤ η`, and on each piece the difference
//! `w = u − v` is found by Picard iteration for
//!
//! ```text
//! (i∂_t+Δ)w = μ₁|v+w|²(v+w) + |v+w|⁴(v+w) − |v|⁴v,
//! ```
//!
//! carrying `w(t_j)` to the next piece. The ledger compares the measured
//! size of `w` with the inductive bound `(2C)^j |J|^{1/20}`.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{
    duhamel_fixed_point, integrate_nodes, partition_by_zprime, time_grid, SolverConfig,
};
use crate::fft::smooth_size_at_least;
use crate::norms::{sobolev_norm, x1_proxy_and_zprime, NormReport};
use crate::par;
use crate::spectral::{
    apply_propagator, evaluate_nonlinearity, map_physical2, EquationParams, SpectralField,
};
use crate::trajectory::{TimeInterval, Trajectory, TIME_TOL};

/// Controls for [`run_gwp_scheme`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GwpConfig {
    pub solver: SolverConfig,
    /// Budget for `‖v‖_{Z'(I_j)}` used by the inner partition.
    pub eta: f64,
    /// Initial ceiling on the outer window length.
    pub eta_tilde: f64,
    /// The constant `C` in `(2C)^j |J|^{1/20}`; frozen after calibration.
    pub ledger_constant: f64,
    /// How many times `η̃` may be halved after a failed contraction.
    pub max_retries: usize,
}

impl Default for GwpConfig {
    fn default() -> Self {
        GwpConfig {
            solver: SolverConfig::default(),
            eta: 0.5,
            eta_tilde: 0.25,
            ledger_constant: 1.0,
            max_retries: 4,
        }
    }
}

impl GwpConfig {
    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        if !(self.eta > 0.0) || !(self.eta_tilde > 0.0) || !(self.ledger_constant > 0.0) {
            return Err(Error::Argument("eta, eta_tilde and ledger_constant must be positive".into()));
        }
        Ok(())
    }
}

/// The quintic reference flow together with its diagnostics.
#[derive(Clone, Debug)]
pub struct QuinticReference {
    pub trajectory: Trajectory,
    pub report: NormReport,
}

/// Defocusing quintic flow from `v0` on `I` (|I| ≤ 1).
pub fn solve_quintic_reference(
    v0: &SpectralField,
    interval: &TimeInterval,
    config: &SolverConfig,
) -> Result<QuinticReference> {
    config.validate()?;
    if interval.length() > 1.0 + TIME_TOL {
        return Err(Error::Precondition(format!(
            "quintic reference needs |I| ≤ 1, got {}",
            interval.length()
        )));
    }
    let params = EquationParams::quintic();
    let times = time_grid(interval, config.dt);
    let fields = integrate_nodes(v0, &times, &params, config)?;
    let trajectory = Trajectory::new(*interval, *v0.grid(), params, times, fields)?;
    let report = NormReport::measure(&trajectory, interval)?;
    Ok(QuinticReference { trajectory, report })
}

/// Right side of the difference equation at one node, evaluated in a single
/// dealiased pass.
fn difference_forcing(v: &SpectralField, w: &SpectralField, mu1: f64) -> SpectralField {
    let n = smooth_size_at_least(v.grid().phys_points());
    map_physical2(v, w, n, move |v, w| {
        let u = v + w;
        let a = u.norm_sqr();
        let b = v.norm_sqr();
        u * (mu1 * a + a * a) - v * (b * b)
    })
}

/// A difference-equation solve on one piece.
#[derive(Clone, Debug)]
pub struct DifferenceSolve {
    pub trajectory: Trajectory,
    pub iterations: usize,
    pub residuals: Vec<f64>,
    pub ratios: Vec<f64>,
    pub converged: bool,
}

/// Solves for `w` on the nodes of `v` inside `J`, with `w(a) = 0`.
pub fn solve_difference_equation(
    v: &Trajectory,
    j: &TimeInterval,
    mu1: f64,
    config: &SolverConfig,
) -> Result<Trajectory> {
    let zero = SpectralField::zeros(*v.grid());
    Ok(solve_difference_from(v, j, mu1, &zero, config)?.trajectory)
}

/// As [`solve_difference_equation`] but starting from a given `w(a)`.
pub fn solve_difference_from(
    v: &Trajectory,
    j: &TimeInterval,
    mu1: f64,
    w_start: &SpectralField,
    config: &SolverConfig,
) -> Result<DifferenceSolve> {
    config.validate()?;
    if j.length() > 1.0 + TIME_TOL {
        return Err(Error::Precondition(format!("difference solve needs |J| ≤ 1, got {}", j.length())));
    }
    if w_start.grid() != v.grid() {
        return Err(Error::Config("w(a) and v live on different grids".into()));
    }
    let (lo, hi) = v.node_range(j)?;
    let times = v.times()[lo..=hi].to_vec();
    let vs = &v.fields()[lo..=hi];
    let fp = duhamel_fixed_point(w_start, &times, |k, w| difference_forcing(&vs[k], w, mu1), config)?;
    let interval = TimeInterval::new(times[0], times[times.len() - 1])?;
    let params = EquationParams::permissive(mu1, 1.0)?;
    let trajectory = Trajectory::new(interval, *v.grid(), params, times, fp.fields)?;
    Ok(DifferenceSolve {
        trajectory,
        iterations: fp.iterations,
        residuals: fp.residuals,
        ratios: fp.ratios,
        converged: fp.converged,
    })
}

/// Sup over interior nodes of the `H¹` norm of the discrete equation
/// residual `(i∂_t + Δ)u − F(u)`, with `∂_t` taken by central differences
/// of the interaction-picture coefficients `e^{-itΔ}u(t)`.
pub fn equation_residual(u: &Trajectory, params: &EquationParams) -> Result<f64> {
    if u.len() < 3 {
        return Ok(0.0);
    }
    let times = u.times();
    let fields = u.fields();
    let values = par::map_range(u.len() - 2, |i| {
        let k = i + 1;
        let before = apply_propagator(&fields[k - 1], -times[k - 1]);
        let after = apply_propagator(&fields[k + 1], -times[k + 1]);
        let mut deriv = after.sub(&before);
        deriv = deriv.scale(Complex64::new(1.0 / (times[k + 1] - times[k - 1]), 0.0));
        // i ∂_t u + Δu = e^{itΔ}(i ∂_t a) for a = e^{-itΔ}u.
        let lhs = apply_propagator(&deriv, times[k]).scale(Complex64::new(0.0, 1.0));
        match evaluate_nonlinearity(&fields[k], params) {
            Ok(f) => Ok(sobolev_norm(&lhs.sub(&f), 1.0)),
            Err(e) => Err(e),
        }
    });
    let mut worst = 0.0f64;
    for v in values {
        worst = worst.max(v?);
    }
    Ok(worst)
}

/// One inner piece `I_j` of an outer window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub window: usize,
    /// Global piece index, consecutive across the run.
    pub index: usize,
    /// Position inside the window; the exponent of the budget.
    pub local_index: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub window_length: f64,
    pub zprime_v: f64,
    /// `max(‖w‖_{L^∞H¹(I_j)}, x1_proxy(w, I_j))`.
    pub measured_w: f64,
    pub budget: f64,
    pub picard_iterations: usize,
    pub pass: bool,
}

/// The induction ledger with the constants that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GwpLedger {
    pub ledger_constant: f64,
    pub eta: f64,
    /// The requested `η̃`.
    pub eta_tilde: f64,
    /// The `η̃` that finally succeeded after any halvings.
    pub eta_tilde_used: f64,
    pub retries: usize,
    pub mu1: f64,
    pub entries: Vec<LedgerEntry>,
}

#[derive(Serialize)]
struct WindowJson<'a> {
    window: usize,
    t_start: f64,
    t_end: f64,
    intervals: Vec<&'a LedgerEntry>,
}

#[derive(Serialize)]
struct LedgerJson<'a> {
    ledger_constant: f64,
    eta: f64,
    eta_tilde: f64,
    eta_tilde_used: f64,
    retries: usize,
    mu1: f64,
    all_pass: bool,
    windows: Vec<WindowJson<'a>>,
}

impl GwpLedger {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    /// One CSV row per inner piece.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for e in &self.entries {
            w.serialize(e)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Nested JSON: constants, then the pieces grouped by outer window.
    pub fn to_json(&self) -> Result<String> {
        let mut windows: Vec<WindowJson> = Vec::new();
        for e in &self.entries {
            match windows.last_mut() {
                Some(w) if w.window == e.window => {
                    w.t_end = e.t_end;
                    w.intervals.push(e);
                }
                _ => windows.push(WindowJson {
                    window: e.window,
                    t_start: e.t_start,
                    t_end: e.t_end,
                    intervals: vec![e],
                }),
            }
        }
        let doc = LedgerJson {
            ledger_constant: self.ledger_constant,
            eta: self.eta,
            eta_tilde: self.eta_tilde,
            eta_tilde_used: self.eta_tilde_used,
            retries: self.retries,
            mu1: self.mu1,
            all_pass: self.all_pass(),
            windows,
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }
}

/// Reconstructed solution and its ledger.
#[derive(Clone, Debug)]
pub struct GwpOutcome {
    pub trajectory: Trajectory,
    pub ledger: GwpLedger,
}

/// Solves CQNLS with `μ₂ = 1` on `I` by the perturbative scheme. The
/// reconstructed `u` lives on the same node grid as a direct
/// [`crate::evolution::evolve`] run with the same `dt`.
pub fn run_gwp_scheme(
    u0: &SpectralField,
    interval: &TimeInterval,
    mu1: f64,
    config: &GwpConfig,
) -> Result<GwpOutcome> {
    config.validate()?;
    if !mu1.is_finite() {
        return Err(Error::Argument(format!("μ₁ must be finite, got {mu1}")));
    }
    let mut eta_tilde = config.eta_tilde;
    let mut retries = 0;
    loop {
        match gwp_attempt(u0, interval, mu1, config, eta_tilde) {
            Ok((trajectory, entries)) => {
                let ledger = GwpLedger {
                    ledger_constant: config.ledger_constant,
                    eta: config.eta,
                    eta_tilde: config.eta_tilde,
                    eta_tilde_used: eta_tilde,
                    retries,
                    mu1,
                    entries,
                };
                return Ok(GwpOutcome { trajectory, ledger });
            }
            Err(Error::NoContraction { .. }) if retries < config.max_retries => {
                retries += 1;
                eta_tilde *= 0.5;
            }
            Err(e) => return Err(e),
        }
    }
}

fn gwp_attempt(
    u0: &SpectralField,
    interval: &TimeInterval,
    mu1: f64,
    config: &GwpConfig,
    eta_tilde: f64,
) -> Result<(Trajectory, Vec<LedgerEntry>)> {
    let solver = &config.solver;
    let grid = *u0.grid();
    let times = time_grid(interval, solver.dt);
    let last = times.len() - 1;
    let per_window = ((eta_tilde / solver.dt) + 1e-9).floor().max(1.0) as usize;
    let quintic = EquationParams::quintic();
    let two_c = 2.0 * config.ledger_constant;

    let mut fields = vec![u0.clone()];
    let mut entries = Vec::new();
    let mut window = 0;
    let mut lo = 0;
    while lo < last {
        let hi = (lo + per_window).min(last);
        let wtimes = &times[lo..=hi];
        let j = TimeInterval::new(wtimes[0], wtimes[wtimes.len() - 1])?;
        let ua = fields.last().expect("reconstruction is never empty").clone();
        let vfields = integrate_nodes(&ua, wtimes, &quintic, solver)?;
        let v = Trajectory::new(j, grid, quintic, wtimes.to_vec(), vfields)?;
        let pieces = partition_by_zprime(&v, &j, config.eta)?;
        let mut w_start = SpectralField::zeros(grid);
        for (local, piece) in pieces.iter().enumerate() {
            let solve = solve_difference_from(&v, piece, mu1, &w_start, solver)?;
            let w = &solve.trajectory;
            let (x1_w, _) = x1_proxy_and_zprime(w, piece)?;
            let (_, zprime_v) = x1_proxy_and_zprime(&v, piece)?;
            let budget = two_c.powi(local as i32) * j.length().powf(0.05);
            entries.push(LedgerEntry {
                window,
                index: entries.len(),
                local_index: local,
                t_start: piece.start(),
                t_end: piece.end(),
                window_length: j.length(),
                zprime_v,
                measured_w: x1_w,
                budget,
                picard_iterations: solve.iterations,
                pass: x1_w <= budget,
            });
            let (plo, phi) = v.node_range(piece)?;
            for (k, wk) in (plo + 1..=phi).zip(&w.fields()[1..]) {
                fields.push(v.fields()[k].add(wk));
            }
            w_start = w.last_field().expect("piece has nodes").clone();
        }
        window += 1;
        lo = hi;
    }
    let params = EquationParams::permissive(mu1, 1.0)?;
    let trajectory = Trajectory::new(*interval, grid, params, times, fields)?;
    Ok((trajectory, entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::TorusGrid;

    fn small_solver() -> SolverConfig {
        SolverConfig {
            dt: 0.01,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn zero_data_gives_zero_reference() {
        let grid = TorusGrid::square(2);
        let r = solve_quintic_reference(&SpectralField::zeros(grid), &TimeInterval::new(0.0, 0.1).unwrap(), &small_solver()).unwrap();
        assert!(r.trajectory.fields().iter().all(|f| f.norm_sq() == 0.0));
        assert_eq!(r.report.mass, 0.0);
    }

    #[test]
    fn constant_reference_rotates_phase() {
        let grid = TorusGrid::square(2);
        let c = Complex64::new(0.3, -0.2);
        let r = solve_quintic_reference(&SpectralField::constant(grid, c), &TimeInterval::new(0.0, 1.0).unwrap(), &small_solver()).unwrap();
        for (t, f) in r.trajectory.times().iter().zip(r.trajectory.fields()) {
            let expect = c * Complex64::from_polar(1.0, -t * c.norm_sqr().powi(2));
            let got = SpectralField::constant(grid, expect);
            assert!(f.sub(&got).norm_sq().sqrt() <= 1e-10);
        }
    }

    #[test]
    fn no_cubic_term_means_no_difference() {
        let grid = TorusGrid::square(2);
        let u0 = SpectralField::from_fn(grid, |xi| {
            let r2 = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]) as f64;
            Complex64::new(0.01 * (-r2).exp(), 0.0)
        });
        let i = TimeInterval::new(0.0, 0.1).unwrap();
        let v = solve_quintic_reference(&u0, &i, &small_solver()).unwrap().trajectory;
        let w = solve_difference_equation(&v, &i, 0.0, &small_solver()).unwrap();
        assert!(w.fields().iter().all(|f| f.norm_sq() == 0.0));
    }

    #[test]
    fn ledger_json_groups_windows() {
        let e = |window, index| LedgerEntry {
            window,
            index,
            local_index: 0,
            t_start: index as f64,
            t_end: index as f64 + 1.0,
            window_length: 1.0,
            zprime_v: 0.1,
            measured_w: 0.0,
            budget: 1.0,
            picard_iterations: 2,
            pass: true,
        };
        let ledger = GwpLedger {
            ledger_constant: 1.0,
            eta: 0.5,
            eta_tilde: 0.25,
            eta_tilde_used: 0.25,
            retries: 0,
            mu1: -1.0,
            entries: vec![e(0, 0), e(0, 1), e(1, 2)],
        };
        let v: serde_json::Value = serde_json::from_str(&ledger.to_json().unwrap()).unwrap();
        assert_eq!(v["windows"].as_array().unwrap().len(), 2);
        assert_eq!(v["windows"][0]["intervals"].as_array().unwrap().len(), 2);
        let mut buf = Vec::new();
        ledger.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 4);
    }
}
