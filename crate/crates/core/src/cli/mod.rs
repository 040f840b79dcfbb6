//! File formats and run orchestration behind the `cqnls` binary.
//!
//! Exit codes are a stable contract:
//!
//! | code | meaning |
//! |-----:|---------|
//! | 0 | success |
//! | 1 | I/O, checkpoint or report failure |
//! | 2 | usage error (unknown command or flag) |
//! | 3 | configuration or argument error |
//! | 4 | blow-up suspected |
//! | 5 | no contraction |
//! | 6 | partition infeasible |

pub mod checkpoint;
pub mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{evolve, picard_solve};
use crate::gwp::run_gwp_scheme;
use crate::norms::NormReport;
use crate::probe::{probe_bilinear_sweep, probe_strichartz, probe_trilinear_sweep, ProbeReport};
use crate::trajectory::Trajectory;

pub use checkpoint::{read_checkpoint, write_checkpoint};
pub use config::{parse_config, parse_config_for, serialize, Command, ConfigError, OutputFormat, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_BLOW_UP: i32 = 4;
pub const EXIT_NO_CONTRACTION: i32 = 5;
pub const EXIT_PARTITION_INFEASIBLE: i32 = 6;

/// Exit status for a failed run.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Argument(_) | Error::Precondition(_) | Error::UnsupportedRegime(_) => EXIT_CONFIG,
        Error::BlowUpSuspected { .. } => EXIT_BLOW_UP,
        Error::NoContraction { .. } => EXIT_NO_CONTRACTION,
        Error::PartitionInfeasible { .. } => EXIT_PARTITION_INFEASIBLE,
        Error::Checkpoint(_) | Error::Io(_) | Error::Report(_) => EXIT_FAILURE,
    }
}

/// One row of the Picard iteration log. `ratio` is empty for the first
/// iteration and whenever contraction checks are off.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PicardRow {
    pub iteration: usize,
    pub residual: f64,
    pub ratio: Option<f64>,
    pub converged: bool,
}

/// Summary row of an `evolve` run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvolveRow {
    pub nodes: usize,
    pub energy_start: f64,
    pub energy_end: f64,
    pub energy_drift: f64,
}

/// Writes `rows` as CSV (header plus one line per row) or as a JSON array.
pub fn write_rows<T: Serialize, W: Write>(rows: &[T], format: OutputFormat, mut out: W) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn write_rows_to<T: Serialize>(rows: &[T], format: OutputFormat, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_rows(rows, format, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

/// Diagnostics of a whole stored trajectory; a trajectory without nodes
/// reports zeros on its interval.
pub fn measure_trajectory(trajectory: &Trajectory) -> Result<NormReport> {
    let interval = trajectory.interval();
    if trajectory.is_empty() {
        return Ok(NormReport {
            t_start: interval.start(),
            t_end: interval.end(),
            mass: 0.0,
            energy: 0.0,
            kinetic: 0.0,
            h1: 0.0,
            linf_h1: 0.0,
            z_norm: 0.0,
            x1_proxy: 0.0,
            zprime_proxy: 0.0,
            y1_proxy: 0.0,
        });
    }
    NormReport::measure(trajectory, &interval)
}

fn write_probe(report: &ProbeReport, format: OutputFormat, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    match format {
        OutputFormat::Csv => report.write_csv(&mut buf)?,
        OutputFormat::Json => {
            buf.extend_from_slice(report.summary_json()?.as_bytes());
            buf.push(b'\n');
        }
    }
    fs::write(path, buf)?;
    Ok(())
}

/// Runs `config.command` and returns the paths written.
pub fn run(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let dir = &config.output_dir;
    fs::create_dir_all(dir)?;
    let ext = config.format.extension();
    let file = |stem: &str| dir.join(format!("{stem}.{ext}"));
    let ckpt = dir.join("trajectory.cqnls");
    let mut written = Vec::new();
    match config.command {
        Command::Evolve => {
            let grid = config.grid()?;
            let u0 = config.initial.data().build(grid)?;
            let interval = config.interval()?;
            let run = evolve(&u0, &interval, &config.params()?, &config.solver)?;
            write_checkpoint(&run.trajectory, &ckpt)?;
            written.push(ckpt);
            let report = measure_trajectory(&run.trajectory)?;
            write_rows_to(&[report], config.format, &file("report"))?;
            written.push(file("report"));
            let row = EvolveRow {
                nodes: run.trajectory.len(),
                energy_start: run.energy_start,
                energy_end: run.energy_end,
                energy_drift: run.energy_drift(),
            };
            write_rows_to(&[row], config.format, &file("evolve"))?;
            written.push(file("evolve"));
        }
        Command::Picard => {
            let grid = config.grid()?;
            let u0 = config.initial.data().build(grid)?;
            let interval = config.interval()?;
            let out = picard_solve(&u0, &interval, &config.params()?, &config.solver)?;
            write_checkpoint(&out.trajectory, &ckpt)?;
            written.push(ckpt);
            write_rows_to(&[measure_trajectory(&out.trajectory)?], config.format, &file("report"))?;
            written.push(file("report"));
            let offset = out.residuals.len() - out.ratios.len();
            let rows: Vec<PicardRow> = out
                .residuals
                .iter()
                .enumerate()
                .map(|(i, &residual)| PicardRow {
                    iteration: i + 1,
                    residual,
                    ratio: i.checked_sub(offset).map(|j| out.ratios[j]),
                    converged: out.converged && i + 1 == out.residuals.len(),
                })
                .collect();
            write_rows_to(&rows, config.format, &file("picard"))?;
            written.push(file("picard"));
        }
        Command::Gwp => {
            let grid = config.grid()?;
            let u0 = config.initial.data().build(grid)?;
            let interval = config.interval()?;
            let out = run_gwp_scheme(&u0, &interval, config.mu1, &config.gwp_config())?;
            write_checkpoint(&out.trajectory, &ckpt)?;
            written.push(ckpt);
            write_rows_to(&[measure_trajectory(&out.trajectory)?], config.format, &file("report"))?;
            written.push(file("report"));
            let ledger_path = file("ledger");
            match config.format {
                OutputFormat::Csv => {
                    let mut buf = Vec::new();
                    out.ledger.write_csv(&mut buf)?;
                    fs::write(&ledger_path, buf)?;
                }
                OutputFormat::Json => fs::write(&ledger_path, out.ledger.to_json()? + "\n")?,
            }
            written.push(ledger_path);
        }
        Command::Norms => {
            let trajectory = read_checkpoint(&config.norms_checkpoint)?;
            write_rows_to(&[measure_trajectory(&trajectory)?], config.format, &file("report"))?;
            written.push(file("report"));
        }
        Command::ProbeStrichartz | Command::ProbeBilinear | Command::ProbeTrilinear => {
            let probe = config.probe_config();
            let report = match config.command {
                Command::ProbeStrichartz => probe_strichartz(&probe)?,
                Command::ProbeBilinear => probe_bilinear_sweep(&config.probe.bilinear_pairs(), &probe)?,
                _ => probe_trilinear_sweep(&config.probe.trilinear_triples(), &probe)?,
            };
            write_probe(&report, config.format, &file("probe"))?;
            written.push(file("probe"));
        }
    }
    Ok(written)
}
