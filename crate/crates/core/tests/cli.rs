use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command as Proc, Output};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cqnls::cli::checkpoint::{decode, encode};
use cqnls::cli::{measure_trajectory, parse_config, read_checkpoint, serialize, write_checkpoint, write_rows, OutputFormat};
use cqnls::evolution::evolve;
use cqnls::spectral::{EquationParams, SpectralField, TorusGrid};
use cqnls::trajectory::{TimeInterval, Trajectory};

fn bin() -> Proc {
    let mut p = Proc::new(env!("CARGO_BIN_EXE_cqnls"));
    p.env_remove("CQNLS_THREADS");
    p
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("spawn cqnls")
}

fn random_trajectory(seed: u64, nodes: usize) -> Trajectory {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = TorusGrid::new(2, 15, [1.0, 0.5, 2.0]).unwrap();
    let times: Vec<f64> = (0..nodes).map(|i| i as f64 * 0.05).collect();
    let fields = (0..nodes)
        .map(|_| SpectralField::from_fn(grid, |_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)))
        .collect();
    let end = times.last().copied().unwrap_or(0.0).max(0.05);
    Trajectory::new(TimeInterval::new(0.0, end).unwrap(), grid, EquationParams::new(-1.0, 1.0).unwrap(), times, fields).unwrap()
}

fn bits(t: &Trajectory) -> Vec<u64> {
    t.fields()
        .iter()
        .flat_map(|f| f.coeffs().iter().flat_map(|c| [c.re.to_bits(), c.im.to_bits()]))
        .chain(t.times().iter().map(|x| x.to_bits()))
        .collect()
}

const SMALL_EVOLVE: &str = "\
[grid]
modes = 3

[solver]
dt = 0.01
t_end = 0.2

[initial]
kind = gaussian
amplitude = 0.8
width = 1.2
seed = 11
";

#[test]
fn repo_example_config_is_canonical() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/example.conf");
    let text = fs::read_to_string(path).unwrap();
    let cfg = parse_config(&text).unwrap();
    assert_eq!(serialize(&cfg), text);
}

#[test]
fn random_checkpoint_round_trips_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.cqnls");
    let t = random_trajectory(3, 5);
    write_checkpoint(&t, &path).unwrap();
    let back = read_checkpoint(&path).unwrap();
    assert_eq!(bits(&back), bits(&t));
    assert_eq!(back.grid(), t.grid());
    assert_eq!(back.interval(), t.interval());
    assert_eq!(encode(&back), fs::read(&path).unwrap());
}

#[test]
fn zero_node_checkpoint_is_header_only() {
    let t = random_trajectory(1, 0);
    let bytes = encode(&t);
    assert_eq!(bytes.len(), 80);
    let back = decode(&bytes).unwrap();
    assert!(back.is_empty());
    assert_eq!(encode(&back), bytes);
}

#[test]
fn corrupt_checkpoints_are_rejected() {
    let bytes = encode(&random_trajectory(2, 2));
    let mut extra = bytes.clone();
    extra.push(0);
    assert!(decode(&extra).unwrap_err().to_string().contains("trailing"));
    assert!(decode(&bytes[..40]).is_err());
}

#[test]
fn norms_of_zero_trajectory_are_all_zero() {
    let dir = tempfile::tempdir().unwrap();
    let grid = TorusGrid::square(2);
    let times = vec![0.0, 0.5, 1.0];
    let zeros = vec![SpectralField::zeros(grid); 3];
    let t = Trajectory::new(TimeInterval::new(0.0, 1.0).unwrap(), grid, EquationParams::new(-1.0, 1.0).unwrap(), times, zeros)
        .unwrap();
    write_checkpoint(&t, &dir.path().join("trajectory.cqnls")).unwrap();
    let out = run_in(dir.path(), &["norms", "--out", "."]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t_start,t_end,mass,energy,kinetic,h1,linf_h1,z_norm,x1_proxy,zprime_proxy,y1_proxy"
    );
    let values: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(values[..2], [0.0, 1.0]);
    assert!(values[2..].iter().all(|&v| v == 0.0), "{values:?}");
}

#[test]
fn evolve_then_norms_matches_in_process_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(&conf, SMALL_EVOLVE).unwrap();
    let conf_s = conf.to_str().unwrap();
    let out = run_in(dir.path(), &["evolve", "--config", conf_s, "--out", "a"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let mut cfg = parse_config(&format!("command = evolve\n{SMALL_EVOLVE}")).unwrap();
    cfg.output_dir = PathBuf::from("unused");
    let grid = cfg.grid().unwrap();
    let u0 = cfg.initial.data().build(grid).unwrap();
    let run = evolve(&u0, &cfg.interval().unwrap(), &cfg.params().unwrap(), &cfg.solver).unwrap();
    let mut expect = Vec::new();
    write_rows(&[measure_trajectory(&run.trajectory).unwrap()], OutputFormat::Csv, &mut expect).unwrap();

    let stored = read_checkpoint(&dir.path().join("a/trajectory.cqnls")).unwrap();
    assert_eq!(bits(&stored), bits(&run.trajectory));
    assert_eq!(fs::read(dir.path().join("a/report.csv")).unwrap(), expect);

    let norms_conf = dir.path().join("norms.conf");
    fs::write(&norms_conf, "[norms]\ncheckpoint = a/trajectory.cqnls\n").unwrap();
    let out = run_in(dir.path(), &["norms", "--config", norms_conf.to_str().unwrap(), "--out", "b"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read(dir.path().join("b/report.csv")).unwrap(), expect);
}

#[test]
fn json_reports_mirror_csv_fields() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(&conf, SMALL_EVOLVE).unwrap();
    for fmt in ["csv", "json"] {
        let out = run_in(dir.path(), &["evolve", "--config", conf.to_str().unwrap(), "--out", fmt, "--format", fmt]);
        assert!(out.status.success());
    }
    let csv = fs::read_to_string(dir.path().join("csv/evolve.csv")).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let json: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("json/evolve.json")).unwrap()).unwrap();
    let keys: Vec<&str> = json[0].as_object().unwrap().keys().map(String::as_str).collect();
    let mut sorted = header.clone();
    sorted.sort_unstable();
    assert_eq!(keys, sorted);
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("probe.conf");
    fs::write(&conf, "[probe]\nsamples = 4\nmodes = 4\ntrilinear_n1 = 4\ntrilinear_n2 = 1, 2, 4\ntime_nodes = 5\n").unwrap();
    let c = conf.to_str().unwrap();
    for out in ["x", "y"] {
        let o = run_in(dir.path(), &["probe-trilinear", "--config", c, "--seed", "99", "--out", out]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let o = run_in(dir.path(), &["probe-trilinear", "--config", c, "--seed", "100", "--out", "z"]);
    assert!(o.status.success());
    let x = fs::read(dir.path().join("x/probe.csv")).unwrap();
    assert_eq!(x, fs::read(dir.path().join("y/probe.csv")).unwrap());
    assert_ne!(x, fs::read(dir.path().join("z/probe.csv")).unwrap());
}

#[test]
fn unknown_command_is_a_usage_error() {
    let out = bin().arg("integrate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn configuration_problems_exit_with_code_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.conf");
    fs::write(&bad, "[equation]\nmu2 = 0\n").unwrap();
    let out = run_in(dir.path(), &["gwp", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2") && err.contains("μ₂"), "{err}");

    let out = bin().current_dir(dir.path()).env("CQNLS_THREADS", "many").arg("norms").output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn missing_checkpoint_exits_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["norms"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn solver_failures_map_to_their_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let blow = dir.path().join("blow.conf");
    let text = SMALL_EVOLVE.replace("t_end = 0.2", "t_end = 0.2\nh1_ceiling = 0.01");
    fs::write(&blow, text).unwrap();
    let out = run_in(dir.path(), &["evolve", "--config", blow.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));

    let tiny_eta = dir.path().join("eta.conf");
    fs::write(&tiny_eta, SMALL_EVOLVE.replace("[initial]", "[gwp]\neta = 0.000001\n\n[initial]")).unwrap();
    let out = run_in(dir.path(), &["gwp", "--config", tiny_eta.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(6), "{}", String::from_utf8_lossy(&out.stderr));

    let loose = dir.path().join("loose.conf");
    fs::write(
        &loose,
        "[grid]\nmodes = 2\n[solver]\ndt = 0.05\nt_end = 1.0\npicard_max_iters = 40\n[initial]\nkind = constant\namplitude = 3.0\n",
    )
    .unwrap();
    let out = run_in(dir.path(), &["picard", "--config", loose.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(5), "{}", String::from_utf8_lossy(&out.stderr));
}
