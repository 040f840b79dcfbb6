use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cqnls::cli::{self, parse_config_for, Command, OutputFormat, EXIT_CONFIG, EXIT_FAILURE, EXIT_OK};

/// Cubic-quintic NLS on the 3-torus: integrators, diagnostics and probes.
#[derive(Parser)]
#[command(name = "cqnls", version)]
struct Args {
    #[command(subcommand)]
    command: Cmd,

    /// Configuration file (sectioned key = value text).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory; overrides [output] dir.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Report format; overrides [output] format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Seed for initial data and probe ensembles.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, Subcommand)]
enum Cmd {
    /// Split-step integration; writes a checkpoint and norm reports.
    Evolve,
    /// Duhamel fixed-point solve on |I| ≤ 1.
    Picard,
    /// Perturbative global scheme around the quintic flow.
    Gwp,
    /// Norm report for a stored checkpoint.
    Norms,
    /// Frequency-localized Strichartz probe.
    ProbeStrichartz,
    /// Bilinear estimate sweep.
    ProbeBilinear,
    /// Trilinear estimate sweep.
    ProbeTrilinear,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Evolve => Command::Evolve,
            Cmd::Picard => Command::Picard,
            Cmd::Gwp => Command::Gwp,
            Cmd::Norms => Command::Norms,
            Cmd::ProbeStrichartz => Command::ProbeStrichartz,
            Cmd::ProbeBilinear => Command::ProbeBilinear,
            Cmd::ProbeTrilinear => Command::ProbeTrilinear,
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("CQNLS_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("CQNLS_THREADS must be a positive integer, got `{raw}`"))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("cqnls: {msg}");
        return ExitCode::from(EXIT_CONFIG as u8);
    }
    let text = match &args.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("cqnls: cannot read {}: {e}", path.display());
                return ExitCode::from(EXIT_FAILURE as u8);
            }
        },
        None => String::new(),
    };
    let command = Command::from(args.command);
    let mut config = match parse_config_for(&text, command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("cqnls: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    if let Some(out) = args.out {
        config.output_dir = out;
    }
    if let Some(f) = args.format {
        config.format = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
    }
    if let Some(seed) = args.seed {
        config.initial.seed = seed;
        config.probe.seed = seed;
    }
    match cli::run(&config) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::from(EXIT_OK as u8)
        }
        Err(e) => {
            eprintln!("cqnls {command}: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
