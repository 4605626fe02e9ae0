use std::fs;
use std::process::{Command, Output};

use tristate_snn::experiments::load_config;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tristate-snn"))
        .args(args)
        .output()
        .expect("spawn tristate-snn")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn unknown_preset_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&[
        "run",
        "--preset",
        "nope",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn bad_config_exits_one_and_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "# comment\ndt = 0.05\nplasticity.nonsense = 3\n").unwrap();
    let o = cli(&[
        "run",
        "--preset",
        "fig5_retain",
        "--out",
        dir.path().to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("plasticity.nonsense"), "{}", stderr(&o));
}

#[test]
fn invalid_override_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&[
        "run",
        "--preset",
        "fig5_retain",
        "--out",
        dir.path().to_str().unwrap(),
        "--set",
        "dt=-1",
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn missing_argument_exits_one() {
    assert_eq!(cli(&["run"]).status.code(), Some(1));
    assert_eq!(cli(&["--help"]).status.code(), Some(0));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("occupied");
    fs::write(&file, "").unwrap();
    let o = cli(&[
        "run",
        "--preset",
        "fig5_retain",
        "--out",
        file.to_str().unwrap(),
        "--set",
        "duration=100",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn run_honours_overrides_and_prints_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&[
        "run",
        "--preset",
        "fig5_retain",
        "--out",
        dir.path().to_str().unwrap(),
        "--set",
        "duration=200",
        "--set",
        "record_v_w=true",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let trace = fs::read_to_string(dir.path().join("fig5_retain.csv")).unwrap();
    let header = trace.lines().next().unwrap();
    assert!(header.starts_with("t_ms,i_syn_nA,"));
    assert!(header.ends_with(",v_w_39"));
    // Initial row plus one per millisecond.
    assert_eq!(trace.lines().count(), 1 + 201);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("fig5_retain_summary.csv"));
}

#[test]
fn sweep_writes_one_trace_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&[
        "sweep",
        "--axis",
        "plasticity.drift_rate",
        "--values",
        "0.0001,0.0002,0.0003",
        "--out",
        dir.path().to_str().unwrap(),
        "--set",
        "duration=50",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for i in 0..3 {
        assert!(dir.path().join(format!("sweep_{i}.csv")).is_file());
    }
    let summary = fs::read_to_string(dir.path().join("sweep_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 4);
}

#[test]
fn sweep_rejects_unknown_axis() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&[
        "sweep",
        "--axis",
        "bogus",
        "--values",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn calibration_output_loads_as_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cal").join("thresholds.cfg");
    let o = cli(&["calibrate", "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let params = load_config(&path).unwrap();
    assert!(params.plasticity.theta_ca_low > 0.0);
    assert!(params.plasticity.theta_ca_high > params.plasticity.theta_ca_low);
}
