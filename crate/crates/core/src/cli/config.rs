//! Run configuration: a small sectioned `key = value` format.
//!
//! ```text
//! command = evolve          # optional; the CLI subcommand takes precedence
//!
//! [grid]
//! modes = 8
//! theta = 1.0, 1.0, 1.0
//! ```
//!
//! Full-line comments start with `#` or `;`. Every key is optional and falls
//! back to the default shown by [`serialize`] on `RunConfig::default()`.
//! Errors carry the 1-based line number of the offending line; invariant
//! errors point at the key that must change.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::error::Error;
use crate::evolution::SolverConfig;
use crate::gwp::GwpConfig;
use crate::initial::InitialData;
use crate::probe::ProbeConfig;
use crate::spectral::{EquationParams, TorusGrid};
use crate::trajectory::{TimeInterval, TIME_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Command {
    Evolve,
    Picard,
    Gwp,
    Norms,
    ProbeStrichartz,
    ProbeBilinear,
    ProbeTrilinear,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Evolve,
        Command::Picard,
        Command::Gwp,
        Command::Norms,
        Command::ProbeStrichartz,
        Command::ProbeBilinear,
        Command::ProbeTrilinear,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::Picard => "picard",
            Command::Gwp => "gwp",
            Command::Norms => "norms",
            Command::ProbeStrichartz => "probe-strichartz",
            Command::ProbeBilinear => "probe-bilinear",
            Command::ProbeTrilinear => "probe-trilinear",
        }
    }
}

impl FromStr for Command {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        Command::ALL.into_iter().find(|c| c.name() == s).ok_or(())
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialKind {
    Zero,
    Constant,
    PlaneWave,
    Gaussian,
}

impl InitialKind {
    fn name(self) -> &'static str {
        match self {
            InitialKind::Zero => "zero",
            InitialKind::Constant => "constant",
            InitialKind::PlaneWave => "plane_wave",
            InitialKind::Gaussian => "gaussian",
        }
    }
}

impl FromStr for InitialKind {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        [InitialKind::Zero, InitialKind::Constant, InitialKind::PlaneWave, InitialKind::Gaussian]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSettings {
    pub modes: usize,
    /// `None` selects the minimal dealiasing grid `3(2K+1)`.
    pub phys_points: Option<usize>,
    pub theta: [f64; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct InitialSettings {
    pub kind: InitialKind,
    pub amplitude: f64,
    pub width: f64,
    pub mode: [i32; 3],
    pub seed: u64,
}

impl InitialSettings {
    pub fn data(&self) -> InitialData {
        match self.kind {
            InitialKind::Zero => InitialData::Zero,
            InitialKind::Constant => InitialData::Constant { amplitude: self.amplitude },
            InitialKind::PlaneWave => InitialData::PlaneWave { mode: self.mode, amplitude: self.amplitude },
            InitialKind::Gaussian => InitialData::Gaussian {
                width: self.width,
                amplitude: self.amplitude,
                seed: self.seed,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeSettings {
    pub samples: usize,
    pub shells: Vec<u32>,
    pub p: f64,
    pub interval: f64,
    pub time_nodes: usize,
    /// `None` picks a per-probe default lattice (see [`ProbeSettings::config`]).
    pub modes: Option<usize>,
    pub seed: u64,
    pub bilinear_n1: Vec<u32>,
    pub bilinear_n2: Vec<u32>,
    pub trilinear_n1: Vec<u32>,
    pub trilinear_n2: Vec<u32>,
    pub trilinear_n3: Vec<u32>,
}

impl ProbeSettings {
    /// Probe configuration for `command`; the default lattice radius is 32
    /// for Strichartz, 16 for bilinear and 8 for trilinear sweeps.
    pub fn config(&self, command: Command, theta: [f64; 3]) -> ProbeConfig {
        let default_modes = match command {
            Command::ProbeBilinear => 16,
            Command::ProbeTrilinear => 8,
            _ => 32,
        };
        ProbeConfig {
            sample_count: self.samples,
            n_values: self.shells.clone(),
            p: self.p,
            interval: self.interval,
            time_nodes: self.time_nodes,
            mode_radius: self.modes.unwrap_or(default_modes),
            theta,
            seed: self.seed,
        }
    }

    /// `(N₁, N₂)` pairs, `N₂` outer and `N₁` inner.
    pub fn bilinear_pairs(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for &n2 in &self.bilinear_n2 {
            for &n1 in &self.bilinear_n1 {
                out.push((n1, n2));
            }
        }
        out
    }

    /// `(N₁, N₂, N₃)` triples, `N₁` outer, then `N₃`, with `N₂` innermost.
    pub fn trilinear_triples(&self) -> Vec<(u32, u32, u32)> {
        let mut out = Vec::new();
        for &n1 in &self.trilinear_n1 {
            for &n3 in &self.trilinear_n3 {
                for &n2 in &self.trilinear_n2 {
                    out.push((n1, n2, n3));
                }
            }
        }
        out
    }
}

/// Everything one invocation needs.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub grid: GridSettings,
    pub mu1: f64,
    pub mu2: f64,
    pub solver: SolverConfig,
    pub t_start: f64,
    pub t_end: f64,
    pub initial: InitialSettings,
    pub gwp: GwpConfig,
    pub probe: ProbeSettings,
    pub norms_checkpoint: PathBuf,
    pub format: OutputFormat,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let gwp = GwpConfig::default();
        RunConfig {
            command: Command::Norms,
            grid: GridSettings {
                modes: 8,
                phys_points: None,
                theta: [1.0; 3],
            },
            mu1: -1.0,
            mu2: 1.0,
            solver: SolverConfig::default(),
            t_start: 0.0,
            t_end: 1.0,
            initial: InitialSettings {
                kind: InitialKind::Gaussian,
                amplitude: 1.0,
                width: 1.5,
                mode: [1, 0, 0],
                seed: 7,
            },
            gwp,
            probe: ProbeSettings {
                samples: 50,
                shells: vec![1, 2, 4, 8, 16, 32, 64],
                p: 4.0,
                interval: 1.0,
                time_nodes: 9,
                modes: None,
                seed: 2024,
                bilinear_n1: vec![4, 8, 16, 32],
                bilinear_n2: vec![2],
                trilinear_n1: vec![8],
                trilinear_n2: vec![1, 2, 4, 8],
                trilinear_n3: vec![1],
            },
            norms_checkpoint: PathBuf::from("trajectory.cqnls"),
            format: OutputFormat::Csv,
            output_dir: PathBuf::from("."),
        }
    }
}

impl RunConfig {
    pub fn grid(&self) -> crate::error::Result<TorusGrid> {
        let k = self.grid.modes;
        let phys = self.grid.phys_points.unwrap_or(3 * (2 * k.max(1) + 1));
        TorusGrid::new(k, phys, self.grid.theta)
    }

    pub fn params(&self) -> crate::error::Result<EquationParams> {
        EquationParams::permissive(self.mu1, self.mu2)
    }

    pub fn interval(&self) -> crate::error::Result<TimeInterval> {
        TimeInterval::new(self.t_start, self.t_end)
    }

    pub fn gwp_config(&self) -> GwpConfig {
        GwpConfig {
            solver: self.solver,
            ..self.gwp
        }
    }

    pub fn probe_config(&self) -> ProbeConfig {
        self.probe.config(self.command, self.grid.theta)
    }
}

/// A configuration problem, with the 1-based line it was found on (0 when
/// it concerns a default value that no line set).
#[derive(Clone, Debug, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown section [{section}]")]
    UnknownSection { line: usize, section: String },
    #[error("line {line}: unknown key `{key}` in [{section}]")]
    UnknownKey { line: usize, section: String, key: String },
    #[error("line {line}: duplicate key `{key}` in [{section}]")]
    DuplicateKey { line: usize, section: String, key: String },
    #[error("line {line}: type mismatch for `{key}`: expected {expected}, found `{found}`")]
    TypeMismatch {
        line: usize,
        key: String,
        expected: &'static str,
        found: String,
    },
    #[error("line {line}: invariant violated for `{key}`: {message}")]
    Invariant { line: usize, key: String, message: String },
}

impl From<ConfigError> for Error {
    fn from(e: ConfigError) -> Self {
        Error::Config(e.to_string())
    }
}

/// Why a single assignment failed, before the line number is attached.
enum Reject {
    UnknownKey,
    Mismatch(&'static str),
}

fn scalar<T: FromStr>(value: &str, expected: &'static str) -> Result<T, Reject> {
    value.parse().map_err(|_| Reject::Mismatch(expected))
}

fn real(value: &str) -> Result<f64, Reject> {
    scalar(value, "a real number")
}

fn list<T: FromStr>(value: &str, expected: &'static str) -> Result<Vec<T>, Reject> {
    if value.is_empty() {
        return Err(Reject::Mismatch(expected));
    }
    value.split(',').map(|v| scalar(v.trim(), expected)).collect()
}

fn triple<T: FromStr + Copy>(value: &str, expected: &'static str) -> Result<[T; 3], Reject> {
    let v: Vec<T> = list(value, expected)?;
    <[T; 3]>::try_from(v).map_err(|_| Reject::Mismatch(expected))
}

fn boolean(value: &str) -> Result<bool, Reject> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(Reject::Mismatch("true or false")),
    }
}

const SECTIONS: [&str; 8] = ["grid", "equation", "solver", "initial", "gwp", "probe", "norms", "output"];

fn assign(cfg: &mut RunConfig, section: &str, key: &str, v: &str) -> Result<(), Reject> {
    const UINT: &str = "a non-negative integer";
    const DYADIC: &str = "a comma-separated list of integers";
    match (section, key) {
        ("", "command") => cfg.command = scalar(v, "a command name")?,
        ("grid", "modes") => cfg.grid.modes = scalar(v, UINT)?,
        ("grid", "phys_points") => cfg.grid.phys_points = Some(scalar(v, UINT)?),
        ("grid", "theta") => cfg.grid.theta = triple(v, "three comma-separated reals")?,
        ("equation", "mu1") => cfg.mu1 = real(v)?,
        ("equation", "mu2") => cfg.mu2 = real(v)?,
        ("solver", "dt") => cfg.solver.dt = real(v)?,
        ("solver", "t_start") => cfg.t_start = real(v)?,
        ("solver", "t_end") => cfg.t_end = real(v)?,
        ("solver", "picard_max_iters") => cfg.solver.picard_max_iters = scalar(v, UINT)?,
        ("solver", "picard_tol") => cfg.solver.picard_tol = real(v)?,
        ("solver", "smallness_delta") => cfg.solver.smallness_delta = real(v)?,
        ("solver", "contraction_checks") => cfg.solver.contraction_checks = boolean(v)?,
        ("solver", "h1_ceiling") => cfg.solver.h1_ceiling = real(v)?,
        ("initial", "kind") => cfg.initial.kind = scalar(v, "zero, constant, plane_wave or gaussian")?,
        ("initial", "amplitude") => cfg.initial.amplitude = real(v)?,
        ("initial", "width") => cfg.initial.width = real(v)?,
        ("initial", "mode") => cfg.initial.mode = triple(v, "three comma-separated integers")?,
        ("initial", "seed") => cfg.initial.seed = scalar(v, UINT)?,
        ("gwp", "eta") => cfg.gwp.eta = real(v)?,
        ("gwp", "eta_tilde") => cfg.gwp.eta_tilde = real(v)?,
        ("gwp", "ledger_constant") => cfg.gwp.ledger_constant = real(v)?,
        ("gwp", "max_retries") => cfg.gwp.max_retries = scalar(v, UINT)?,
        ("probe", "samples") => cfg.probe.samples = scalar(v, UINT)?,
        ("probe", "shells") => cfg.probe.shells = list(v, DYADIC)?,
        ("probe", "p") => cfg.probe.p = real(v)?,
        ("probe", "interval") => cfg.probe.interval = real(v)?,
        ("probe", "time_nodes") => cfg.probe.time_nodes = scalar(v, UINT)?,
        ("probe", "modes") => cfg.probe.modes = Some(scalar(v, UINT)?),
        ("probe", "seed") => cfg.probe.seed = scalar(v, UINT)?,
        ("probe", "bilinear_n1") => cfg.probe.bilinear_n1 = list(v, DYADIC)?,
        ("probe", "bilinear_n2") => cfg.probe.bilinear_n2 = list(v, DYADIC)?,
        ("probe", "trilinear_n1") => cfg.probe.trilinear_n1 = list(v, DYADIC)?,
        ("probe", "trilinear_n2") => cfg.probe.trilinear_n2 = list(v, DYADIC)?,
        ("probe", "trilinear_n3") => cfg.probe.trilinear_n3 = list(v, DYADIC)?,
        ("norms", "checkpoint") => cfg.norms_checkpoint = PathBuf::from(v),
        ("output", "format") => cfg.format = scalar(v, "csv or json")?,
        ("output", "dir") => cfg.output_dir = PathBuf::from(v),
        _ => return Err(Reject::UnknownKey),
    }
    Ok(())
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_inner(text, None)
}

/// Like [`parse_config`], but `command` replaces any `command` key before
/// the command-specific invariants are checked.
pub fn parse_config_for(text: &str, command: Command) -> Result<RunConfig, ConfigError> {
    parse_inner(text, Some(command))
}

fn parse_inner(text: &str, command: Option<Command>) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut section = String::new();
    let mut seen: HashMap<(String, String), usize> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with(';') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                line,
                message: format!("unterminated section header `{trimmed}`"),
            })?;
            let name = name.trim();
            if !SECTIONS.contains(&name) {
                return Err(ConfigError::UnknownSection {
                    line,
                    section: name.to_string(),
                });
            }
            section = name.to_string();
            continue;
        }
        let (key, value) = trimmed.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            message: format!("expected `key = value`, found `{trimmed}`"),
        })?;
        let key = key.trim();
        let mut value = value.trim();
        if value.len() >= 2 && value.starts_with('"') && value.ends_with('"') {
            value = &value[1..value.len() - 1];
        }
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                message: "empty key".into(),
            });
        }
        if seen.insert((section.clone(), key.to_string()), line).is_some() {
            return Err(ConfigError::DuplicateKey {
                line,
                section: section.clone(),
                key: key.to_string(),
            });
        }
        assign(&mut cfg, &section, key, value).map_err(|r| match r {
            Reject::UnknownKey => ConfigError::UnknownKey {
                line,
                section: if section.is_empty() { "top level".into() } else { section.clone() },
                key: key.to_string(),
            },
            Reject::Mismatch(expected) => ConfigError::TypeMismatch {
                line,
                key: key.to_string(),
                expected,
                found: value.to_string(),
            },
        })?;
    }
    if let Some(c) = command {
        cfg.command = c;
    }
    let line_of = |section: &str, key: &str| seen.get(&(section.to_string(), key.to_string())).copied().unwrap_or(0);
    validate(&cfg).map_err(|(section, key, message)| ConfigError::Invariant {
        line: line_of(section, key),
        key: if section.is_empty() { key.to_string() } else { format!("{section}.{key}") },
        message,
    })?;
    Ok(cfg)
}

/// `(section, key, message)` of the first violated invariant.
type Violation = (&'static str, &'static str, String);

fn validate(cfg: &RunConfig) -> Result<(), Violation> {
    let grid = cfg.grid().map_err(|e| ("grid", "modes", e.to_string()))?;
    check(cfg.mu1.is_finite(), "equation", "mu1", || format!("μ₁ must be finite, got {}", cfg.mu1))?;
    check(cfg.mu2.is_finite(), "equation", "mu2", || format!("μ₂ must be finite, got {}", cfg.mu2))?;
    check(cfg.solver.dt > 0.0 && cfg.solver.dt.is_finite(), "solver", "dt", || {
        format!("dt must be positive, got {}", cfg.solver.dt)
    })?;
    check(cfg.solver.picard_tol > 0.0, "solver", "picard_tol", || "must be positive".into())?;
    check(cfg.solver.smallness_delta > 0.0, "solver", "smallness_delta", || "must be positive".into())?;
    check(cfg.solver.h1_ceiling > 0.0, "solver", "h1_ceiling", || "must be positive".into())?;
    check(cfg.solver.picard_max_iters > 0, "solver", "picard_max_iters", || "must be at least 1".into())?;
    check(
        cfg.t_start.is_finite() && cfg.t_end.is_finite() && cfg.t_end > cfg.t_start,
        "solver",
        "t_end",
        || format!("need t_end > t_start, got [{}, {}]", cfg.t_start, cfg.t_end),
    )?;
    cfg.initial
        .data()
        .build(grid)
        .map_err(|e| ("initial", if cfg.initial.kind == InitialKind::PlaneWave { "mode" } else { "width" }, e.to_string()))?;
    check(cfg.gwp.eta > 0.0, "gwp", "eta", || "must be positive".into())?;
    check(cfg.gwp.eta_tilde > 0.0, "gwp", "eta_tilde", || "must be positive".into())?;
    check(cfg.gwp.ledger_constant > 0.0, "gwp", "ledger_constant", || "must be positive".into())?;
    let probe = cfg.probe_config();
    check(probe.sample_count > 0, "probe", "samples", || "must be at least 1".into())?;
    check(probe.time_nodes >= 2, "probe", "time_nodes", || "must be at least 2".into())?;
    check(probe.interval > 0.0 && probe.interval <= 1.0 + TIME_TOL, "probe", "interval", || {
        format!("need 0 < |I| ≤ 1, got {}", probe.interval)
    })?;
    let shells_ok = |ns: &[u32], k: usize| ns.iter().all(|&n| n.is_power_of_two() && n as usize <= 2 * k);
    match cfg.command {
        Command::Picard => check(cfg.t_end - cfg.t_start <= 1.0 + TIME_TOL, "solver", "t_end", || {
            format!("picard needs |I| ≤ 1, got {}", cfg.t_end - cfg.t_start)
        })?,
        Command::Gwp => check(cfg.mu2 == 1.0, "equation", "mu2", || {
            format!("μ₂ must equal 1 for the gwp command, got {}", cfg.mu2)
        })?,
        Command::ProbeStrichartz => {
            check(probe.p > 10.0 / 3.0, "probe", "p", || format!("Strichartz probe needs p > 10/3, got {}", probe.p))?;
            check(probe.n_values.len() >= 2 && shells_ok(&probe.n_values, probe.mode_radius), "probe", "shells", || {
                format!("need at least two dyadic shells ≤ 2K = {}", 2 * probe.mode_radius)
            })?;
        }
        Command::ProbeBilinear => {
            let pairs = cfg.probe.bilinear_pairs();
            let all: Vec<u32> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
            check(!pairs.is_empty() && shells_ok(&all, probe.mode_radius), "probe", "bilinear_n1", || {
                format!("shells must be dyadic and ≤ 2K = {}", 2 * probe.mode_radius)
            })?;
            check(pairs.iter().all(|&(a, b)| a >= b), "probe", "bilinear_n2", || "need N1 ≥ N2 for every pair".into())?;
        }
        Command::ProbeTrilinear => {
            let triples = cfg.probe.trilinear_triples();
            let all: Vec<u32> = triples.iter().flat_map(|&(a, b, c)| [a, b, c]).collect();
            check(!triples.is_empty() && shells_ok(&all, probe.mode_radius), "probe", "trilinear_n1", || {
                format!("shells must be dyadic and ≤ 2K = {}", 2 * probe.mode_radius)
            })?;
            check(triples.iter().all(|&(a, b, c)| a >= b && b >= c), "probe", "trilinear_n2", || {
                "need N1 ≥ N2 ≥ N3 for every triple".into()
            })?;
        }
        Command::Evolve | Command::Norms => {}
    }
    Ok(())
}

fn check(ok: bool, section: &'static str, key: &'static str, message: impl FnOnce() -> String) -> Result<(), Violation> {
    if ok {
        Ok(())
    } else {
        Err((section, key, message()))
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

fn join_real(items: &[f64]) -> String {
    items.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(", ")
}

/// Canonical text form; `parse_config(&serialize(c)) == c` for every
/// valid `c`.
pub fn serialize(cfg: &RunConfig) -> String {
    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(w, "command = {}", cfg.command);
    let _ = writeln!(w, "\n[grid]\nmodes = {}", cfg.grid.modes);
    if let Some(p) = cfg.grid.phys_points {
        let _ = writeln!(w, "phys_points = {p}");
    }
    let _ = writeln!(w, "theta = {}", join_real(&cfg.grid.theta));
    let _ = writeln!(w, "\n[equation]\nmu1 = {:?}\nmu2 = {:?}", cfg.mu1, cfg.mu2);
    let sv = &cfg.solver;
    let _ = writeln!(
        w,
        "\n[solver]\ndt = {:?}\nt_start = {:?}\nt_end = {:?}\npicard_max_iters = {}\npicard_tol = {:?}\nsmallness_delta = {:?}\ncontraction_checks = {}\nh1_ceiling = {:?}",
        sv.dt, cfg.t_start, cfg.t_end, sv.picard_max_iters, sv.picard_tol, sv.smallness_delta, sv.contraction_checks, sv.h1_ceiling
    );
    let init = &cfg.initial;
    let _ = writeln!(
        w,
        "\n[initial]\nkind = {}\namplitude = {:?}\nwidth = {:?}\nmode = {}\nseed = {}",
        init.kind.name(),
        init.amplitude,
        init.width,
        join(&init.mode),
        init.seed
    );
    let g = &cfg.gwp;
    let _ = writeln!(
        w,
        "\n[gwp]\neta = {:?}\neta_tilde = {:?}\nledger_constant = {:?}\nmax_retries = {}",
        g.eta, g.eta_tilde, g.ledger_constant, g.max_retries
    );
    let p = &cfg.probe;
    let _ = writeln!(
        w,
        "\n[probe]\nsamples = {}\nshells = {}\np = {:?}\ninterval = {:?}\ntime_nodes = {}",
        p.samples,
        join(&p.shells),
        p.p,
        p.interval,
        p.time_nodes
    );
    if let Some(m) = p.modes {
        let _ = writeln!(w, "modes = {m}");
    }
    let _ = writeln!(
        w,
        "seed = {}\nbilinear_n1 = {}\nbilinear_n2 = {}\ntrilinear_n1 = {}\ntrilinear_n2 = {}\ntrilinear_n3 = {}",
        p.seed,
        join(&p.bilinear_n1),
        join(&p.bilinear_n2),
        join(&p.trilinear_n1),
        join(&p.trilinear_n2),
        join(&p.trilinear_n3)
    );
    let _ = writeln!(w, "\n[norms]\ncheckpoint = {}", cfg.norms_checkpoint.display());
    let _ = writeln!(w, "\n[output]\nformat = {}\ndir = {}", cfg.format.extension(), cfg.output_dir.display());
    s
}
