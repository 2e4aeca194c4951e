//! End-to-end tests that drive the compiled binary the way a user would:
//! real scenario files on disk, real artifact directories, asserted exit
//! codes and output text.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pointfield"))
}

fn write_scenario(dir: &Path, name: &str, json: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, json).expect("write scenario file");
    path
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Split a small CSV into cells. None of the cells asserted on below
/// contain commas or quotes, so a plain split is faithful.
fn read_csv(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .expect("read csv")
        .lines()
        .map(|line| line.split(',').map(str::to_string).collect())
        .collect()
}

fn cell(rows: &[Vec<String>], row: usize, col: usize) -> f64 {
    rows[row][col]
        .parse()
        .unwrap_or_else(|_| panic!("cell ({row},{col}) = `{}` is not a number", rows[row][col]))
}

#[test]
fn static_run_reports_rest_and_writes_default_artifacts() {
    let dir = TempDir::new().unwrap();
    let scenario = write_scenario(
        dir.path(),
        "s.json",
        r#"{"version": 1, "preset": "static"}"#,
    );
    let out_dir = dir.path().join("out");

    let out = bin()
        .args(["run", scenario.to_str().unwrap(), "--out-dir"])
        .arg(&out_dir)
        .output()
        .unwrap();

    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    assert_eq!(stdout_of(&out).trim(), "REST(0)");

    let rows = read_csv(&out_dir.join("trajectory.csv"));
    assert_eq!(rows[0], ["t", "d", "b", "theta", "q", "qdot"]);
    assert!(rows.len() > 2, "trajectory should have sample rows");
    for row in &rows[1..] {
        assert_eq!(row[3], "0.0", "a quiescent charge never tilts");
    }

    let events = read_csv(&out_dir.join("events.csv"));
    assert_eq!(events[0], ["t", "kind", "d", "b", "theta", "q", "qdot"]);

    assert!(out_dir.join("manifest.json").exists());
    assert!(
        !out_dir.join("diagnostics.csv").exists(),
        "diagnostics are opt-in"
    );
}

#[test]
fn out_dir_env_var_is_honored() {
    let dir = TempDir::new().unwrap();
    let scenario = write_scenario(
        dir.path(),
        "s.json",
        r#"{"version": 1, "preset": "static"}"#,
    );
    let out_dir = dir.path().join("from_env");
    fs::create_dir(&out_dir).unwrap();

    let out = bin()
        .args(["run", scenario.to_str().unwrap()])
        .env("POINTFIELD_OUT_DIR", &out_dir)
        .output()
        .unwrap();

    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    assert!(out_dir.join("manifest.json").exists());
    assert!(out_dir.join("trajectory.csv").exists());
}

#[test]
fn out_dir_flag_overrides_env_var() {
    let dir = TempDir::new().unwrap();
    let scenario = write_scenario(
        dir.path(),
        "s.json",
        r#"{"version": 1, "preset": "static"}"#,
    );
    let flag_dir = dir.path().join("from_flag");
    let env_dir = dir.path().join("from_env");
    fs::create_dir(&env_dir).unwrap();

    let out = bin()
        .args(["run", scenario.to_str().unwrap(), "--out-dir"])
        .arg(&flag_dir)
        .env("POINTFIELD_OUT_DIR", &env_dir)
        .output()
        .unwrap();

    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    assert!(flag_dir.join("manifest.json").exists());
    assert!(!env_dir.join("manifest.json").exists());
}

#[test]
fn stability_run_reports_a_decay_rate() {
    let dir = TempDir::new().unwrap();
    let scenario = write_scenario(
        dir.path(),
        "s.json",
        r#"{"version": 1, "preset": "stability"}"#,
    );

    let out = bin()
        .args(["run", scenario.to_str().unwrap(), "--out-dir"])
        .arg(dir.path().join("out"))
        .output()
        .unwrap();

    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let verdict = stdout_of(&out);
    let rate: f64 = verdict
        .trim()
        .strip_prefix("DECAYING(")
        .and_then(|s| s.strip_suffix(')'))
        .expect("verdict shape")
        .parse()
        .expect("fitted rate");
    // unit charge, unit mass: the tilt relaxes at rate a^2 / (2m) = 1/2
    assert!(
        (rate - 0.5).abs() < 1e-3,
        "decay rate {rate} should be near 0.5"
    );
}

#[test]
fn instability_run_blows_up_and_logs_the_crossing() {
    let dir = TempDir::new().unwrap();
    let scenario = write_scenario(
        dir.path(),
        "s.json",
        r#"{"version": 1, "preset": "instability", "beta": 1e-3}"#,
    );
    let out_dir = dir.path().join("out");

    let out = bin()
        .args(["run", scenario.to_str().unwrap(), "--out-dir"])
        .arg(&out_dir)
        .output()
        .unwrap();

    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let verdict = stdout_of(&out);
    let t_star: f64 = verdict
        .trim()
        .strip_prefix("LIGHTSPEED(")
        .and_then(|s| s.strip_suffix(')'))
        .expect("verdict shape")
        .parse()
        .expect("blow-up time");
    assert!(t_star > 0.0 && t_star < 60.0);

    let events = read_csv(&out_dir.join("events.csv"));
    let kinds: Vec<&str> = events[1..].iter().map(|r| r[1].as_str()).collect();
    assert!(kinds.contains(&"light_speed"), "kinds: {kinds:?}");
    let exit_row = events[1..]
        .iter()
        .position(|r| r[1] == "backward_edge_exit")
        .expect("pulse hand-off event");
    // tilt per unit drive amplitude as the pulse leaves, a sharp number
    // for this parameter set
    let theta = cell(&events[1..], exit_row, 4);
    let ratio = theta / 1e-3;
    assert!(
        (-0.28..=-0.25).contains(&ratio),
        "exit tilt per amplitude was {ratio}"
    );
}

#[test]
fn sweep_writes_one_row_per_amplitude() {
    let dir = TempDir::new().unwrap();

    let out = bin()
        .args(["sweep", "--betas", "0,1e-3", "--out-dir"])
        .arg(dir.path())
        .output()
        .unwrap();

    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    assert!(stdout_of(&out).contains("SWEEP(2 points)"));

    let rows = read_csv(&dir.path().join("sweep.csv"));
    assert_eq!(
        rows[0],
        [
            "beta",
            "outcome",
            "theta_at_exit",
            "t_lightspeed",
            "theta_over_beta",
            "error"
        ]
    );
    assert_eq!(rows.len(), 3, "header plus two amplitudes");

    // zero drive leaves the charge at rest, with the derived columns blank
    assert_eq!(cell(&rows, 1, 0), 0.0);
    assert_eq!(rows[1][1], "rest");
    assert_eq!(rows[1][2], "");
    assert_eq!(rows[1][4], "");

    // a small drive tips the charge over; the normalized exit tilt is the
    // same number the run test pins down
    assert_eq!(rows[2][1], "light_speed");
    let ratio = cell(&rows, 2, 4);
    assert!(
        (-0.28..=-0.25).contains(&ratio),
        "exit tilt per amplitude was {ratio}"
    );
    assert!(cell(&rows, 2, 3) > 0.0, "blow-up time recorded");
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn identical_runs_produce_identical_artifacts() {
    let dir = TempDir::new().unwrap();
    let scenario = write_scenario(
        dir.path(),
        "s.json",
        r#"{"version": 1, "preset": "stability"}"#,
    );

    for sub in ["one", "two"] {
        let out = bin()
            .args(["run", scenario.to_str().unwrap(), "--out-dir"])
            .arg(dir.path().join(sub))
            .output()
            .unwrap();
        assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    }

    for name in ["manifest.json", "trajectory.csv", "events.csv"] {
        let a = fs::read(dir.path().join("one").join(name)).unwrap();
        let b = fs::read(dir.path().join("two").join(name)).unwrap();
        assert_eq!(a, b, "{name} should be byte-for-byte reproducible");
    }
}

#[test]
fn field_snapshot_of_a_static_charge_is_the_kink() {
    let dir = TempDir::new().unwrap();
    let scenario = write_scenario(
        dir.path(),
        "s.json",
        r#"{"version": 1, "preset": "static"}"#,
    );

    let out = bin()
        .args([
            "field-snapshot",
            "--scenario",
            scenario.to_str().unwrap(),
            "--t",
            "3.0",
            "--grid",
            "-8:8:5",
            "--out-dir",
        ])
        .arg(dir.path())
        .output()
        .unwrap();

    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    assert!(stdout_of(&out).contains("FIELD_SNAPSHOT(t = 3)"));

    let rows = read_csv(&dir.path().join("field_snapshot.csv"));
    assert_eq!(rows[0], ["t", "s", "u", "u_t", "u_s"]);
    assert_eq!(rows.len(), 6, "header plus five grid points");
    for (i, s) in [-8.0, -4.0, 0.0, 4.0, 8.0].into_iter().enumerate() {
        let row = i + 1;
        assert_eq!(cell(&rows, row, 1), s);
        // a resting unit charge holds u = -|s|/2 for all time
        assert!((cell(&rows, row, 2) + 0.5 * s.abs()).abs() < 1e-12);
        assert!(cell(&rows, row, 3).abs() < 1e-12, "static field");
        let expected_slope = if s == 0.0 {
            0.0 // two-sided mean straddles the crease
        } else {
            -0.5 * s.signum()
        };
        assert!((cell(&rows, row, 4) - expected_slope).abs() < 1e-12);
    }
}

#[test]
fn configuration_errors_exit_with_code_1() {
    let dir = TempDir::new().unwrap();
    let cases: Vec<(Vec<String>, &str)> = vec![
        (
            vec![
                "run".into(),
                dir.path().join("missing.json").to_str().unwrap().into(),
            ],
            "missing scenario file",
        ),
        (
            vec![
                "run".into(),
                write_scenario(
                    dir.path(),
                    "unknown_key.json",
                    r#"{"version": 1, "preset": "static", "bogus": 3}"#,
                )
                .to_str()
                .unwrap()
                .into(),
            ],
            "unknown scenario key",
        ),
        (
            vec![
                "run".into(),
                write_scenario(
                    dir.path(),
                    "bad_version.json",
                    r#"{"version": 2, "preset": "static"}"#,
                )
                .to_str()
                .unwrap()
                .into(),
            ],
            "unsupported schema version",
        ),
        (
            vec![
                "run".into(),
                write_scenario(
                    dir.path(),
                    "bad_mass.json",
                    r#"{"version": 1, "preset": "stability", "m": -1.0}"#,
                )
                .to_str()
                .unwrap()
                .into(),
            ],
            "stability preset with a negative mass",
        ),
        (
            vec![
                "sweep".into(),
                "--betas".into(),
                "1e-3".into(),
                "--m".into(),
                "1.0".into(),
            ],
            "sweep with a positive mass",
        ),
        (
            vec![
                "field-snapshot".into(),
                "--scenario".into(),
                write_scenario(
                    dir.path(),
                    "ok.json",
                    r#"{"version": 1, "preset": "static"}"#,
                )
                .to_str()
                .unwrap()
                .into(),
                "--t".into(),
                "1.0".into(),
                "--grid".into(),
                "8:-8:5".into(),
            ],
            "grid bounds out of order",
        ),
    ];

    for (args, what) in cases {
        let out = bin()
            .args(&args)
            .arg("--out-dir")
            .arg(dir.path().join("sink"))
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(1), "{what}: {}", stderr_of(&out));
        assert!(
            stderr_of(&out).contains("configuration error:"),
            "{what} should be reported as a configuration error, got: {}",
            stderr_of(&out)
        );
    }
}

#[test]
fn unreachable_snapshot_time_exits_with_code_2() {
    let dir = TempDir::new().unwrap();
    // the drive tips this run past light speed around t = 16, so a
    // snapshot at t = 17 cannot be reconstructed
    let scenario = write_scenario(
        dir.path(),
        "s.json",
        r#"{"version": 1, "preset": "instability", "beta": 1e-2,
            "outputs": ["field_snapshots"], "snapshot_times": [17.0]}"#,
    );

    let out = bin()
        .args(["run", scenario.to_str().unwrap(), "--out-dir"])
        .arg(dir.path().join("out"))
        .output()
        .unwrap();

    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr_of(&out));
    assert!(
        stderr_of(&out).contains("numerical failure:"),
        "got: {}",
        stderr_of(&out)
    );
}

#[test]
fn help_exits_zero_and_bad_flags_exit_one() {
    let help = bin().arg("--help").output().unwrap();
    assert!(help.status.success());
    let text = stdout_of(&help);
    for sub in ["run", "sweep", "verify", "field-snapshot"] {
        assert!(text.contains(sub), "help should list `{sub}`");
    }

    let bad = bin().arg("--bogus").output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
