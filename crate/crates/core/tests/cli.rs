use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn dilres(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dilres"));
    cmd.args(args).env_remove("DILRES_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn run_cmd(sub: &str, config: &Path, out: &Path) -> Output {
    dilres(&[sub, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()], &[])
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, body).unwrap();
    p
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn csv_rows(p: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(p).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

const TWO_LEVEL: &str = r#"
[model]
kind = "two-level"

[grid]
n_radial = 1
r_max = 3.0
group = "inversion-only"
"#;

#[test]
fn missing_model_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[model]\nkind = \"file\"\npath = \"nowhere.json\"\n");
    let o = run_cmd("spectrum", &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("model: file not found"), "{err}");
}

#[test]
fn malformed_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{TWO_LEVEL}\n[fock]\nn_ph = 1\nbogus = 3\n"));
    let o = run_cmd("scan", &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("config:"), "{}", stderr(&o));

    let outside = write_config(dir.path(), &format!("{TWO_LEVEL}\n[scan]\ntheta = [0.0, 0.9]\n"));
    assert_eq!(run_cmd("scan", &outside, &dir.path().join("out")).status.code(), Some(2));
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let cfg = configs().join("two_level.toml");
    let dir = tempfile::tempdir().unwrap();
    let args = ["spectrum", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()];
    for v in ["0", "many"] {
        let o = dilres(&args, &[("DILRES_THREADS", v)]);
        assert_eq!(o.status.code(), Some(2), "DILRES_THREADS={v}");
    }
}

#[test]
fn tightened_tolerance_fails_verify() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{TWO_LEVEL}\n[verify]\ntolerance = 1e-16\n"));
    let out = dir.path().join("out");
    let o = run_cmd("verify", &cfg, &out);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("failed checks:"));
    let report = read_json(&out.join("verify.json"));
    assert_eq!(report["all_pass"], false);
    let failed = report["checks"].as_array().unwrap().iter().filter(|c| c["pass"] == false).count();
    assert!(failed > 0);
}

#[test]
fn verify_passes_and_reports_resolvent_points() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_cmd("verify", &configs().join("two_level.toml"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = read_json(&dir.path().join("verify.json"));
    assert_eq!(report["all_pass"], true);
    for c in report["checks"].as_array().unwrap() {
        for key in ["name", "measured", "bound", "pass"] {
            assert!(c.get(key).is_some(), "{c}");
        }
    }
    let audits = report["resolvent"].as_array().unwrap();
    assert_eq!(audits.len(), 2);
    for a in audits {
        let points = a["points"].as_array().unwrap();
        assert_eq!(points.len(), 100);
        for p in points {
            assert!(p["measured"].as_f64().unwrap() <= p["bound"].as_f64().unwrap());
        }
    }
}

#[test]
fn decoupled_spectrum_is_a_tensor_sum() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{TWO_LEVEL}\n[fock]\nn_ph = 2\n\n[scan]\nknob = \"g\"\ng = 0.0\ntheta = [0.1, 0.2]\n"));
    let out = dir.path().join("out");
    assert_eq!(run_cmd("spectrum", &cfg, &out).status.code(), Some(0));

    let grid = dilres::modes::build_mode_grid(1, 3.0, dilres::modes::AngularGroup::InversionOnly, 1.0).unwrap();
    let rot = num_complex::Complex64::new(0.1, 0.2).exp().inv();
    let omega = grid.nodes[0].omega;
    // every mode shares one radius, so photon energies are n·e^{−θ}ω, n ≤ 2
    let mut expected = Vec::new();
    for (e, mult) in [(0.0, 1usize), (1.0, 1)] {
        for (n, count) in [(0.0, 1usize), (1.0, grid.len()), (2.0, grid.len() * (grid.len() + 1) / 2)] {
            expected.extend(std::iter::repeat(rot * (n * omega) + e).take(mult * count));
        }
    }
    let (header, rows) = csv_rows(&out.join("spectrum.csv"));
    assert_eq!(header, ["index", "E_re", "E_im", "residual", "cluster", "multiplicity"]);
    assert_eq!(rows.len(), expected.len());
    let mut got: Vec<num_complex::Complex64> =
        rows.iter().map(|r| num_complex::Complex64::new(r[1].parse().unwrap(), r[2].parse().unwrap())).collect();
    let key = |z: &num_complex::Complex64| (z.re, z.im);
    got.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
    expected.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
    for (a, b) in got.iter().zip(&expected) {
        assert!((a - b).norm() < 1e-12, "{a} vs {b}");
    }
    let (lh, levels) = csv_rows(&out.join("levels.csv"));
    assert_eq!(lh, ["energy", "multiplicity", "labels"]);
    assert_eq!(levels.len(), 2);
}

#[test]
fn zero_length_path_gives_one_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{TWO_LEVEL}\n[scan]\nend = [0.0, 0.0]\nsteps = 10\n"));
    let out = dir.path().join("out");
    assert_eq!(run_cmd("scan", &cfg, &out).status.code(), Some(0));
    let (header, rows) = csv_rows(&out.join("trajectory.csv"));
    assert_eq!(header.len(), 8);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][4].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn kappa_sweep_is_monotone_in_path_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run_cmd("scan", &configs().join("two_level.toml"), &out);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (_, rows) = csv_rows(&out.join("trajectory.csv"));
    assert_eq!(rows.len(), 11);
    let k: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(k.windows(2).all(|w| w[1] > w[0]));
    let (th, theta) = csv_rows(&out.join("theta.csv"));
    assert_eq!(th, ["theta_re", "theta_im", "E_re", "E_im", "deviation"]);
    assert_eq!(theta.len(), 3);
    let m = read_json(&out.join("manifest.json"));
    assert_eq!(m["schema_version"], "1");
    assert_eq!(m["points_completed"], 11);
    assert!(m["aborted"].is_null());
}

#[test]
fn negative_control_records_a_split() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_cmd("scan", &configs().join("negative_control.toml"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m = read_json(&dir.path().join("manifest.json"));
    let events = m["events"].as_array().unwrap();
    assert!(events.iter().any(|e| e.as_str().unwrap().starts_with("cluster split")), "{events:?}");
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let cfg = configs().join("two_level.toml");
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let dir = tempfile::tempdir().unwrap();
        let args = ["scan", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--seed", "11"];
        assert_eq!(dilres(&args, &[("DILRES_THREADS", threads)]).status.code(), Some(0));
        let files: Vec<Vec<u8>> = ["trajectory.csv", "theta.csv", "manifest.json"]
            .iter()
            .map(|f| std::fs::read(dir.path().join(f)).unwrap())
            .collect();
        outputs.push(files);
        let m = read_json(&dir.path().join("manifest.json"));
        assert_eq!(m["seed"], 11);
    }
    assert!(outputs[0] == outputs[1]);
}
