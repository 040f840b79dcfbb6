//! Randomized probes of the frequency-localized linear and multilinear
//! estimates, and a trajectory-wise monitor for the kinetic-energy bound.
//!
//! Every sample is a free evolution `e^{itΔ}P_N f` with `f` drawn from
//! i.i.d. complex Gaussian coefficients, projected to the shell and
//! normalized to unit `L²`. Sample `k` of shell `N` playing role `r` uses the
//! ChaCha stream `(r, N, k)` of the configured seed, so reports do not depend
//! on scheduling and the same `u₂` is reused across a sweep in `N₁`.

use std::io::Write;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frequency::{project_dyadic, DyadicIndex};
use crate::norms::{energy, kinetic, kinetic_bound_constant, lp_integral, mass, x1_proxy_and_zprime};
use crate::par;
use crate::spectral::{apply_propagator, quadrature, to_physical, SpectralField, TorusGrid};
use crate::trajectory::{trapezoid_over, TimeInterval, Trajectory, TIME_TOL};

/// Sampling design shared by all probes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub sample_count: usize,
    /// Dyadic shells for the Strichartz probe.
    pub n_values: Vec<u32>,
    /// Lebesgue exponent of the Strichartz probe.
    pub p: f64,
    /// Length of the time slot `I = [0, |I|]`.
    pub interval: f64,
    /// Equispaced time samples on `I` (trapezoidal rule).
    pub time_nodes: usize,
    /// Lattice radius of the probe grid.
    pub mode_radius: usize,
    pub theta: [f64; 3],
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            sample_count: 50,
            n_values: vec![1, 2, 4, 8, 16, 32, 64],
            p: 4.0,
            interval: 1.0,
            time_nodes: 9,
            mode_radius: 32,
            theta: [1.0; 3],
            seed: 2024,
        }
    }
}

impl ProbeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sample_count == 0 {
            return Err(Error::Argument("sample_count must be at least 1".into()));
        }
        if self.time_nodes < 2 {
            return Err(Error::Argument("time_nodes must be at least 2".into()));
        }
        if !(self.interval > 0.0 && self.interval <= 1.0 + TIME_TOL) {
            return Err(Error::Precondition(format!(
                "probes need a time slot with 0 < |I| ≤ 1, got {}",
                self.interval
            )));
        }
        TorusGrid::with_theta(self.mode_radius, self.theta)?;
        Ok(())
    }

    fn check_shell(&self, n: u32) -> Result<DyadicIndex> {
        let d = DyadicIndex::new(n)?;
        if n as usize > 2 * self.mode_radius {
            return Err(Error::Argument(format!(
                "shell N = {n} exceeds 2K = {}",
                2 * self.mode_radius
            )));
        }
        Ok(d)
    }

    fn grid(&self) -> TorusGrid {
        TorusGrid::with_theta(self.mode_radius, self.theta).expect("validated")
    }

    fn times(&self) -> Vec<f64> {
        let m = self.time_nodes - 1;
        (0..=m).map(|k| self.interval * k as f64 / m as f64).collect()
    }

    fn slot(&self) -> TimeInterval {
        TimeInterval::new(0.0, self.interval).expect("validated")
    }
}

/// Which inequality a report probes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    Strichartz,
    Bilinear,
    Trilinear,
}

impl ProbeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProbeKind::Strichartz => "strichartz",
            ProbeKind::Bilinear => "bilinear",
            ProbeKind::Trilinear => "trilinear",
        }
    }
}

/// One sample of one configuration. Unused shell slots are 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeSample {
    pub probe: ProbeKind,
    pub n1: u32,
    pub n2: u32,
    pub n3: u32,
    pub sample: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Statistics of one configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigSummary {
    pub n1: u32,
    pub n2: u32,
    pub n3: u32,
    pub samples: usize,
    pub median_lhs: f64,
    pub median_ratio: f64,
    pub max_ratio: f64,
}

/// Least-squares slope of `log y` against `log N` with a 95% band.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub std_error: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub probe: ProbeKind,
    /// What the right-hand side is built from, including proxy substitutions.
    pub rhs_note: String,
    pub seed: u64,
    pub interval: f64,
    pub samples: Vec<ProbeSample>,
    pub summaries: Vec<ConfigSummary>,
    /// Strichartz only: the predicted exponent `3/2 − 5/p` and the fit.
    pub predicted_exponent: Option<f64>,
    pub slope: Option<SlopeFit>,
    pub max_ratio: f64,
    /// Sweeps only: whether medians never increase along the sweep order.
    pub median_non_increasing: Option<bool>,
}

impl ProbeReport {
    fn assemble(probe: ProbeKind, rhs_note: &str, config: &ProbeConfig, samples: Vec<ProbeSample>) -> Self {
        let mut summaries: Vec<ConfigSummary> = Vec::new();
        let mut start = 0;
        while start < samples.len() {
            let key = (samples[start].n1, samples[start].n2, samples[start].n3);
            let mut end = start;
            while end < samples.len() && (samples[end].n1, samples[end].n2, samples[end].n3) == key {
                end += 1;
            }
            let group = &samples[start..end];
            let ratios: Vec<f64> = group.iter().map(|s| s.ratio).collect();
            summaries.push(ConfigSummary {
                n1: key.0,
                n2: key.1,
                n3: key.2,
                samples: group.len(),
                median_lhs: median(group.iter().map(|s| s.lhs).collect()),
                median_ratio: median(ratios.clone()),
                max_ratio: ratios.iter().cloned().fold(0.0, f64::max),
            });
            start = end;
        }
        let max_ratio = summaries.iter().map(|s| s.max_ratio).fold(0.0, f64::max);
        let median_non_increasing = (summaries.len() > 1)
            .then(|| summaries.windows(2).all(|w| w[1].median_ratio <= w[0].median_ratio));
        ProbeReport {
            probe,
            rhs_note: rhs_note.to_string(),
            seed: config.seed,
            interval: config.interval,
            samples,
            summaries,
            predicted_exponent: None,
            slope: None,
            max_ratio,
            median_non_increasing,
        }
    }

    /// Long-format CSV, one row per sample, after `#` comment lines naming
    /// the probe and its right-hand side.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# probe: {}", self.probe.as_str())?;
        writeln!(out, "# rhs: {}", self.rhs_note)?;
        let mut w = csv::Writer::from_writer(out);
        for s in &self.samples {
            w.serialize(s)?;
        }
        w.flush()?;
        Ok(())
    }

    /// JSON summary (no per-sample rows).
    pub fn summary_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Summary<'a> {
            probe: ProbeKind,
            rhs_note: &'a str,
            seed: u64,
            interval: f64,
            configurations: &'a [ConfigSummary],
            predicted_exponent: Option<f64>,
            slope: Option<SlopeFit>,
            max_ratio: f64,
            median_non_increasing: Option<bool>,
        }
        Ok(serde_json::to_string_pretty(&Summary {
            probe: self.probe,
            rhs_note: &self.rhs_note,
            seed: self.seed,
            interval: self.interval,
            configurations: &self.summaries,
            predicted_exponent: self.predicted_exponent,
            slope: self.slope,
            max_ratio: self.max_ratio,
            median_non_increasing: self.median_non_increasing,
        })?)
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Ordinary least squares of `ys` on `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    let n = xs.len();
    if n < 3 || ys.len() != n {
        return Err(Error::Argument("slope fit needs at least three paired points".into()));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Argument("slope fit needs at least two distinct abscissae".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let std_error = (rss / (nf - 2.0) / sxx).sqrt();
    Ok(SlopeFit {
        slope,
        intercept,
        std_error,
        lower: slope - 1.96 * std_error,
        upper: slope + 1.96 * std_error,
    })
}

/// Role tags keep the streams of different factors apart.
#[derive(Clone, Copy)]
enum Role {
    Single = 0,
    First = 1,
    Second = 2,
    Third = 3,
}

fn sample_rng(seed: u64, role: Role, n: u32, sample: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((role as u64) << 56) | ((n as u64) << 32) | sample as u64);
    rng
}

/// Unit-`L²` random element of the range of `P_N` on `grid`.
pub fn shell_sample(grid: TorusGrid, n: DyadicIndex, rng: &mut ChaCha8Rng) -> SpectralField {
    let raw = SpectralField::from_fn(grid, |_| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    });
    let p = project_dyadic(&raw, n);
    let norm = p.norm_sq().sqrt();
    p.scale(Complex64::new(1.0 / norm, 0.0))
}

/// Smallest lattice that holds the shell `N`: `|ξ_i| < 2N/√θ_min`.
fn shell_lattice(config: &ProbeConfig, n: DyadicIndex) -> Result<TorusGrid> {
    let tmin = config.theta.iter().cloned().fold(f64::INFINITY, f64::min);
    let k = ((2.0 * n.as_f64() / tmin.sqrt()).ceil() as usize).saturating_sub(1).max(1);
    TorusGrid::with_theta(k.min(config.mode_radius), config.theta)
}

fn free_trajectory(f: &SpectralField, config: &ProbeConfig) -> Result<Trajectory> {
    let times = config.times();
    let fields = times.iter().map(|&t| apply_propagator(f, t)).collect();
    Trajectory::new(config.slot(), *f.grid(), crate::spectral::EquationParams::linear(), times, fields)
}

/// `‖e^{itΔ}f‖_{L^p_{t,x}(I)}` from the node grid of the probe.
pub fn free_lp_norm(f: &SpectralField, p: f64, config: &ProbeConfig) -> f64 {
    let times = config.times();
    let values: Vec<f64> = times.iter().map(|&t| lp_integral(&apply_propagator(f, t), p)).collect();
    trapezoid_over(&times, &values, 0.0, config.interval).powf(1.0 / p)
}

/// `‖∏ u_i‖_{L²_{t,x}(I)}` for free evolutions on a common grid; the
/// quadrature is exact for the squared product.
fn free_product_l2(factors: &[&SpectralField], config: &ProbeConfig) -> f64 {
    let grid = factors[0].grid();
    let n = grid.quadrature_points(2 * factors.len());
    let times = config.times();
    let values: Vec<f64> = times
        .iter()
        .map(|&t| {
            let mut prod = vec![Complex64::new(1.0, 0.0); n * n * n];
            for f in factors {
                let s = to_physical(&apply_propagator(f, t), n);
                for (p, v) in prod.iter_mut().zip(s) {
                    *p *= v;
                }
            }
            quadrature(prod.iter().map(|v| v.norm_sqr()), n)
        })
        .collect();
    trapezoid_over(&times, &values, 0.0, config.interval).sqrt()
}

fn zprime_of_free(f: &SpectralField, config: &ProbeConfig) -> Result<f64> {
    let traj = free_trajectory(f, config)?;
    Ok(x1_proxy_and_zprime(&traj, &config.slot())?.1)
}

/// Frequency-localized Strichartz probe: LHS is `‖e^{itΔ}P_N f‖_{L^p}`, RHS
/// is `N^{3/2−5/p}‖P_N f‖_{L²}`.
pub fn probe_strichartz(config: &ProbeConfig) -> Result<ProbeReport> {
    if !(config.p > 10.0 / 3.0) {
        return Err(Error::Precondition(format!("Strichartz probe needs p > 10/3, got {}", config.p)));
    }
    config.validate()?;
    for &n in &config.n_values {
        config.check_shell(n)?;
    }
    if config.n_values.len() < 2 {
        return Err(Error::Argument("Strichartz probe needs at least two shells".into()));
    }
    let exponent = 1.5 - 5.0 / config.p;
    let mut samples = Vec::new();
    for &nv in &config.n_values {
        let n = config.check_shell(nv)?;
        let grid = shell_lattice(config, n)?;
        let lhs = par::map_range(config.sample_count, |k| {
            let mut rng = sample_rng(config.seed, Role::Single, nv, k);
            free_lp_norm(&shell_sample(grid, n, &mut rng), config.p, config)
        });
        let rhs = n.as_f64().powf(exponent);
        samples.extend(lhs.into_iter().enumerate().map(|(k, lhs)| ProbeSample {
            probe: ProbeKind::Strichartz,
            n1: nv,
            n2: 0,
            n3: 0,
            sample: k,
            lhs,
            rhs,
            ratio: lhs / rhs,
        }));
    }
    let xs: Vec<f64> = samples.iter().map(|s| (s.n1 as f64).ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.lhs.ln()).collect();
    let fit = fit_slope(&xs, &ys)?;
    let note = format!("N^(3/2-5/p) * ||P_N f||_L2 with p = {}, unit L2 data", config.p);
    let mut report = ProbeReport::assemble(ProbeKind::Strichartz, &note, config, samples);
    report.predicted_exponent = Some(exponent);
    report.slope = Some(fit);
    Ok(report)
}

const BILINEAR_NOTE: &str =
    "|I|^(1/20) * ||f1||_L2 * Z'(u2); ||f1||_L2 replaces ||u1||_Y0, which is degenerate on free data";
const TRILINEAR_NOTE: &str =
    "||f1||_L2 * Z'(u2) * Z'(u3); ||f1||_L2 replaces ||u1||_Y0, which is degenerate on free data";

/// Bilinear probe over a sweep of `(N₁, N₂)` pairs, in order.
pub fn probe_bilinear_sweep(pairs: &[(u32, u32)], config: &ProbeConfig) -> Result<ProbeReport> {
    config.validate()?;
    let grid = config.grid();
    let mut samples = Vec::new();
    let mut cache: Vec<(u32, Vec<(SpectralField, f64)>)> = Vec::new();
    for &(n1v, n2v) in pairs {
        if n1v < n2v {
            return Err(Error::Argument(format!("bilinear probe needs N1 ≥ N2, got ({n1v}, {n2v})")));
        }
        let n1 = config.check_shell(n1v)?;
        let n2 = config.check_shell(n2v)?;
        if !cache.iter().any(|(k, _)| *k == n2v) {
            let second = par::map_range(config.sample_count, |k| {
                let mut rng = sample_rng(config.seed, Role::Second, n2v, k);
                let f2 = shell_sample(grid, n2, &mut rng);
                let z = zprime_of_free(&f2, config);
                z.map(|z| (f2, z))
            });
            cache.push((n2v, second.into_iter().collect::<Result<_>>()?));
        }
        let second = &cache.iter().find(|(k, _)| *k == n2v).expect("cached").1;
        let scale = config.interval.powf(0.05);
        let rows = par::map_range(config.sample_count, |k| {
            let mut rng = sample_rng(config.seed, Role::First, n1v, k);
            let f1 = shell_sample(grid, n1, &mut rng);
            let (f2, z2) = &second[k];
            let lhs = free_product_l2(&[&f1, f2], config);
            let rhs = scale * f1.norm_sq().sqrt() * z2;
            ProbeSample {
                probe: ProbeKind::Bilinear,
                n1: n1v,
                n2: n2v,
                n3: 0,
                sample: k,
                lhs,
                rhs,
                ratio: lhs / rhs,
            }
        });
        samples.extend(rows);
    }
    Ok(ProbeReport::assemble(ProbeKind::Bilinear, BILINEAR_NOTE, config, samples))
}

/// Single-configuration bilinear probe.
pub fn probe_bilinear(n1: u32, n2: u32, config: &ProbeConfig) -> Result<ProbeReport> {
    probe_bilinear_sweep(&[(n1, n2)], config)
}

/// Trilinear probe over a sweep of `(N₁, N₂, N₃)` triples, in order.
pub fn probe_trilinear_sweep(triples: &[(u32, u32, u32)], config: &ProbeConfig) -> Result<ProbeReport> {
    config.validate()?;
    let grid = config.grid();
    let mut samples = Vec::new();
    for &(n1v, n2v, n3v) in triples {
        if !(n1v >= n2v && n2v >= n3v) {
            return Err(Error::Argument(format!(
                "trilinear probe needs N1 ≥ N2 ≥ N3, got ({n1v}, {n2v}, {n3v})"
            )));
        }
        let (n1, n2, n3) = (config.check_shell(n1v)?, config.check_shell(n2v)?, config.check_shell(n3v)?);
        let rows = par::map_range(config.sample_count, |k| -> Result<ProbeSample> {
            let f1 = shell_sample(grid, n1, &mut sample_rng(config.seed, Role::First, n1v, k));
            let f2 = shell_sample(grid, n2, &mut sample_rng(config.seed, Role::Second, n2v, k));
            let f3 = shell_sample(grid, n3, &mut sample_rng(config.seed, Role::Third, n3v, k));
            let lhs = free_product_l2(&[&f1, &f2, &f3], config);
            let rhs = f1.norm_sq().sqrt() * zprime_of_free(&f2, config)? * zprime_of_free(&f3, config)?;
            Ok(ProbeSample {
                probe: ProbeKind::Trilinear,
                n1: n1v,
                n2: n2v,
                n3: n3v,
                sample: k,
                lhs,
                rhs,
                ratio: lhs / rhs,
            })
        });
        for r in rows {
            samples.push(r?);
        }
    }
    Ok(ProbeReport::assemble(ProbeKind::Trilinear, TRILINEAR_NOTE, config, samples))
}

pub fn probe_trilinear(n1: u32, n2: u32, n3: u32, config: &ProbeConfig) -> Result<ProbeReport> {
    probe_trilinear_sweep(&[(n1, n2, n3)], config)
}

/// Outcome of [`monitor_kinetic_bound`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KineticBoundReport {
    /// `sup_k ‖∇u(t_k)‖²`.
    pub sup_kinetic: f64,
    /// `2E(u₀) + 2C(μ₁, μ₂)M(u₀)`.
    pub bound: f64,
    pub constant: f64,
    pub tolerance: f64,
    pub violated: bool,
}

/// Absolute slack, scaled by `max(1, bound)`.
pub const KINETIC_TOLERANCE: f64 = 1e-8;

/// Checks `sup_t ‖∇u(t)‖² ≤ 2E(u₀) + 2C M(u₀)` along a stored trajectory.
pub fn monitor_kinetic_bound(trajectory: &Trajectory) -> Result<KineticBoundReport> {
    let params = trajectory.params();
    let constant = kinetic_bound_constant(&params)?;
    let Some(u0) = trajectory.fields().first() else {
        return Ok(KineticBoundReport {
            sup_kinetic: 0.0,
            bound: 0.0,
            constant,
            tolerance: KINETIC_TOLERANCE,
            violated: false,
        });
    };
    let bound = 2.0 * energy(u0, &params) + 2.0 * constant * mass(u0);
    let sup_kinetic = par::map_slice(trajectory.fields(), kinetic)
        .into_iter()
        .fold(0.0, f64::max);
    let violated = sup_kinetic > bound + KINETIC_TOLERANCE * bound.abs().max(1.0);
    Ok(KineticBoundReport {
        sup_kinetic,
        bound,
        constant,
        tolerance: KINETIC_TOLERANCE,
        violated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{plane_wave_coefficient, torus_volume, EquationParams};

    fn small_config() -> ProbeConfig {
        ProbeConfig {
            sample_count: 4,
            n_values: vec![1, 2, 4],
            mode_radius: 4,
            time_nodes: 3,
            ..ProbeConfig::default()
        }
    }

    #[test]
    fn slope_of_exact_power_law() {
        let xs: Vec<f64> = [1.0f64, 2.0, 4.0, 8.0].iter().map(|v| v.ln()).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 0.25 * x + 1.0).collect();
        let fit = fit_slope(&xs, &ys).unwrap();
        assert!((fit.slope - 0.25).abs() < 1e-14 && fit.std_error < 1e-12);
    }

    #[test]
    fn single_mode_lp_norm_is_closed_form() {
        // |e^{itΔ}c e^{ix·k}| is constant, so the L^4 norm over I × 𝕋³ is
        // (|I| (2π)³)^{1/4} |c|.
        let cfg = small_config();
        let grid = TorusGrid::square(4);
        let f = SpectralField::plane_wave(grid, [3, 1, 0], Complex64::new(0.5, 0.0)).unwrap();
        let got = free_lp_norm(&f, 4.0, &cfg);
        let expect = (cfg.interval * torus_volume()).powf(0.25) * 0.5;
        assert!((got - expect).abs() < 1e-13, "{got} vs {expect}");
        assert!((f.norm_sq() - 0.25 * plane_wave_coefficient().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn zero_data_probe_is_zero() {
        let cfg = small_config();
        let grid = TorusGrid::square(4);
        assert_eq!(free_lp_norm(&SpectralField::zeros(grid), 4.0, &cfg), 0.0);
        let a = shell_sample(grid, DyadicIndex::new(2).unwrap(), &mut sample_rng(1, Role::First, 2, 0));
        assert_eq!(free_product_l2(&[&a, &SpectralField::zeros(grid)], &cfg), 0.0);
    }

    #[test]
    fn strichartz_precondition_and_determinism() {
        let mut cfg = small_config();
        cfg.p = 3.0;
        assert!(matches!(probe_strichartz(&cfg), Err(Error::Precondition(_))));
        cfg.p = 4.0;
        let a = probe_strichartz(&cfg).unwrap();
        let b = probe_strichartz(&cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.samples.iter().all(|s| s.ratio.is_finite() && s.ratio > 0.0));
        assert_eq!(a.predicted_exponent, Some(0.25));
    }

    #[test]
    fn shell_sample_is_normalized_and_localized() {
        let grid = TorusGrid::square(8);
        let n = DyadicIndex::new(4).unwrap();
        let f = shell_sample(grid, n, &mut sample_rng(3, Role::Single, 4, 7));
        assert!((f.norm_sq() - 1.0).abs() < 1e-13);
        for (i, c) in f.coeffs().iter().enumerate() {
            let r = grid.symbol(grid.mode(i)).sqrt();
            if !(2.0 < r && r < 8.0) {
                assert_eq!(*c, Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn ordering_preconditions() {
        let cfg = small_config();
        assert!(probe_bilinear(1, 2, &cfg).is_err());
        assert!(probe_trilinear(4, 1, 2, &cfg).is_err());
        let r = probe_bilinear(1, 1, &cfg).unwrap();
        assert!(r.samples.iter().all(|s| s.ratio.is_finite()));
    }

    #[test]
    fn kinetic_monitor_defocusing_reduces_to_energy() {
        let params = EquationParams::new(1.0, 1.0).unwrap();
        assert_eq!(kinetic_bound_constant(&params).unwrap(), 0.0);
        let grid = TorusGrid::square(2);
        let z = SpectralField::zeros(grid);
        let traj = Trajectory::new(TimeInterval::new(0.0, 1.0).unwrap(), grid, params, vec![0.0, 1.0], vec![z.clone(), z]).unwrap();
        let r = monitor_kinetic_bound(&traj).unwrap();
        assert_eq!((r.sup_kinetic, r.bound, r.violated), (0.0, 0.0, false));
    }
}
