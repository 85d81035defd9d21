use serde_json::Value;
use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

fn qhelm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qhelm"))
        .current_dir(dir)
        .env_remove("QHELM_OUT_DIR")
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json_file(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn last_json_line(o: &Output) -> Value {
    let s = String::from_utf8_lossy(&o.stdout);
    serde_json::from_str(s.lines().last().expect("stdout line")).unwrap()
}

fn csv_rows(p: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(p)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn kernel_table_matches_the_closed_form_in_three_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let o = qhelm(
        dir.path(),
        &["kernel-table", "--alpha", "-1", "--beta", "0", "--N", "3", "--rmax", "20", "--count", "50"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&dir.path().join("kernel.csv"));
    assert_eq!(rows.len(), 50);
    for row in rows {
        let r = row[0];
        // (e^{ir} − e^{−r}) / (8πr)
        let (re, im) = ((r.cos() - (-r).exp()) / (8.0 * PI * r), r.sin() / (8.0 * PI * r));
        let scale = re.hypot(im);
        assert!((row[1] - re).abs() < 1e-12 * scale && (row[2] - im).abs() < 1e-12 * scale, "r = {r}");
    }
    let m = json_file(&dir.path().join("kernel.manifest.json"));
    assert_eq!(m["schema"], "qhelm.manifest.v1");
    assert_eq!(m["command"], "kernel-table");
    assert_eq!(m["outputs"][0]["path"], "kernel.csv");
    assert_eq!(m["outputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn parameters_on_the_excluded_line_fail_with_a_typed_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = qhelm(dir.path(), &["solve", "--alpha", "4", "--beta", "-4", "--N", "2", "--p", "7", "--grid", "16,4"]);
    assert_eq!(code(&o), 1);
    let report = last_json_line(&o);
    assert_eq!(report["schema"], "qhelm.error.v1");
    assert_eq!(report["command"], "solve");
    assert_eq!(report["exit_code"], 1);
    assert!(report["message"].as_str().unwrap().contains("(A1)"), "{report}");
    let written = json_file(&dir.path().join("solve.error.json"));
    assert_eq!(written, report);
    // the manifest is written even for failed runs
    assert!(dir.path().join("solve.manifest.json").is_file());
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&qhelm(dir.path(), &["kernel-table", "--beta", "0", "--N", "3", "--rmax", "5"])), 2);
    assert_eq!(code(&qhelm(dir.path(), &[])), 2);
    assert_eq!(code(&qhelm(dir.path(), &["no-such-command"])), 2);
    let bad = qhelm(
        dir.path(),
        &["radial-sweep", "--alpha", "-1", "--beta", "0", "--N", "3", "--p", "5", "--grid-spec", "hexagon:1:3"],
    );
    assert_eq!(code(&bad), 2);
    assert_eq!(last_json_line(&bad)["exit_code"], 2);
    assert!(!dir.path().join("radial-sweep.error.json").exists());
    assert_eq!(code(&qhelm(dir.path(), &["--help"])), 0);
}

#[test]
fn config_values_apply_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# kernel sampling\nalpha = -1\nbeta = 0\nN = 3\nrmax = 4\ncount = 7\nout = from_config.csv\n",
    )
    .unwrap();
    let o = qhelm(dir.path(), &["--config", cfg.to_str().unwrap(), "kernel-table", "--count", "5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&dir.path().join("from_config.csv"));
    assert_eq!(rows.len(), 5);
    assert!((rows[4][0] - 4.0).abs() < 1e-15);

    std::fs::write(&cfg, "rmax = 4\nnot_a_flag = 1\n").unwrap();
    let o = qhelm(
        dir.path(),
        &["--config", cfg.to_str().unwrap(), "kernel-table", "--alpha", "-1", "--beta", "0", "--N", "3"],
    );
    assert_eq!(code(&o), 2);
}

#[test]
fn out_dir_comes_from_flag_or_environment() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["kernel-table", "--alpha", "-1", "--beta", "0", "--N", "3", "--rmax", "2", "--count", "3"];
    let mut with_flag = vec!["--out-dir", "a"];
    with_flag.extend_from_slice(&args);
    assert_eq!(code(&qhelm(dir.path(), &with_flag)), 0);
    assert!(dir.path().join("a/kernel.csv").is_file());
    let o = Command::new(env!("CARGO_BIN_EXE_qhelm"))
        .current_dir(dir.path())
        .env("QHELM_OUT_DIR", "b")
        .args(args)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(dir.path().join("b/kernel.csv").is_file());
    // location flags are not part of the recorded command line
    let m = json_file(&dir.path().join("a/kernel.manifest.json"));
    assert!(m["argv"].as_array().unwrap().iter().all(|a| a != "--out-dir"));
}

#[test]
fn replay_reproduces_a_solve() {
    let dir = tempfile::tempdir().unwrap();
    let o = qhelm(
        dir.path(),
        &[
            "--out-dir",
            "run",
            "solve",
            "--alpha",
            "-1",
            "--beta",
            "0",
            "--N",
            "2",
            "--p",
            "7",
            "--grid",
            "32,8",
            "--max-iter",
            "400",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = json_file(&dir.path().join("run/solve.report.json"));
    assert_eq!(report["schema"], "qhelm.solve.v1");
    assert_eq!(report["manifest"], "solve.manifest.json");
    assert!(report["j"]["value"].as_f64().unwrap() > 0.0);
    let manifest = dir.path().join("run/solve.manifest.json");
    let recorded = json_file(&manifest);
    assert_eq!(recorded["outputs"].as_array().unwrap().len(), 5);

    let o = qhelm(dir.path(), &["--replay", manifest.to_str().unwrap(), "--out-dir", "again"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let verdict = last_json_line(&o);
    assert_eq!(verdict["schema"], "qhelm.replay.v1");
    assert_eq!(verdict["identical"], true);
    assert!(dir.path().join("again/solve.u.bin").is_file());
}

#[test]
fn replay_detects_a_changed_output() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["kernel-table", "--alpha", "-1", "--beta", "0", "--N", "3", "--rmax", "2", "--count", "3"];
    assert_eq!(code(&qhelm(dir.path(), &args)), 0);
    let manifest = dir.path().join("kernel.manifest.json");
    let mut m = json_file(&manifest);
    m["outputs"][0]["sha256"] = Value::from("0".repeat(64));
    std::fs::write(&manifest, m.to_string()).unwrap();
    let o = qhelm(dir.path(), &["--replay", manifest.to_str().unwrap(), "--out-dir", "again"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn selfcheck_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = qhelm(dir.path(), &["selfcheck"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let report = json_file(&dir.path().join("selfcheck.json"));
    assert_eq!(report["failed"], 0);
    assert!(String::from_utf8_lossy(&o.stdout).lines().filter(|l| l.starts_with("PASS")).count() >= 18);
}

#[test]
fn radial_shoot_writes_a_trajectory_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = qhelm(
        dir.path(),
        &[
            "radial-shoot",
            "--alpha",
            "-1",
            "--beta",
            "0",
            "--N",
            "3",
            "--p",
            "5",
            "--u0",
            "0.1",
            "--u2",
            "0",
            "--rmax",
            "50",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = json_file(&dir.path().join("traj.json"));
    assert_eq!(s["classification"], "Blowup");
    assert!((s["blowup_radius"].as_f64().unwrap() - 7.7047).abs() < 1e-3);
    let rows = csv_rows(&dir.path().join("traj.csv"));
    assert_eq!(rows.len(), s["samples"].as_u64().unwrap() as usize);
}
