use std::fs;
use std::process::{Command, Output};

fn ballcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ballcalc")).args(args).env_remove("BALLCALC_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(ballcalc(&[]).status.code(), Some(2));
    assert_eq!(ballcalc(&["--help"]).status.code(), Some(0));
    assert_eq!(ballcalc(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(ballcalc(&["experiment", "nope"]).status.code(), Some(2));
    assert_eq!(ballcalc(&["validate-basis", "--alpha", "1.5"]).status.code(), Some(2));
    assert_eq!(ballcalc(&["validate-basis", "--preset", "hexagon"]).status.code(), Some(2));
    assert_eq!(ballcalc(&["validate-basis", "--mode", "centered"]).status.code(), Some(2));
    assert_eq!(ballcalc(&["validate-kernel", "--kernel", "fejer:x"]).status.code(), Some(2));
    let bad_env = Command::new(env!("CARGO_BIN_EXE_ballcalc")).args(["validate-basis"]).env("BALLCALC_THREADS", "zero").output().unwrap();
    assert_eq!(bad_env.status.code(), Some(2));
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "levels = 4\nwhatever = 3\n").unwrap();
    let o = ballcalc(&["validate-basis", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("config line 2"));
    let missing = ballcalc(&["validate-basis", "--config", dir.path().join("absent.cfg").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn validate_basis_reports_dyadic_constant() {
    let o = ballcalc(&["validate-basis", "--preset", "dyadic", "--levels", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("quantity,status,value,witness\n"));
    assert!(s.lines().any(|l| l == "K,,2,"));
    assert!(s.lines().any(|l| l == "B1,pass,,"));
}

#[test]
fn validate_kernel_passes_for_families() {
    for args in [
        &["validate-kernel", "--levels", "5"][..],
        &["validate-kernel", "--levels", "5", "--kernel", "dyadic-weighted:geometric:0.5"],
        &["validate-kernel", "--preset", "grid", "--n", "32", "--kernel", "convolution:power:3"],
        &["validate-kernel", "--preset", "grid", "--n", "32", "--kernel", "fejer:0,1,2,4"],
    ] {
        let o = ballcalc(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stdout(&o));
    }
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# base\npreset = grid\nn = 16\n").unwrap();
    let from_cfg = ballcalc(&["validate-basis", "--config", cfg.to_str().unwrap(), "--n", "32"]);
    let from_flags = ballcalc(&["validate-basis", "--preset", "grid", "--n", "32"]);
    assert_eq!(from_cfg.status.code(), Some(0));
    assert_eq!(from_cfg.stdout, from_flags.stdout);
    assert_ne!(from_cfg.stdout, ballcalc(&["validate-basis", "--preset", "grid", "--n", "16"]).stdout);
}

#[test]
fn maximal_reads_input_field() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.csv");
    fs::write(&input, "index,weight,value\n0,0.25,4\n1,0.25,0\n2,0.25,0\n3,0.25,0\n").unwrap();
    let o = ballcalc(&["maximal", "--levels", "2", "--input", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let rows: Vec<&str> = s.lines().collect();
    assert_eq!(rows[0], "point,value,argmax");
    // the singleton at 0, then the half containing it, then the whole space
    assert!(rows[1].starts_with("0,4,"));
    assert!(rows[2].starts_with("1,2,"));
    assert!(rows[3].starts_with("2,1,"));
    let wrong = dir.path().join("g.csv");
    fs::write(&wrong, "0,0.5,1\n1,0.5,1\n").unwrap();
    assert_eq!(ballcalc(&["maximal", "--levels", "2", "--input", wrong.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn norms_table() {
    let o = ballcalc(&["norms", "--levels", "4", "--field", "half-indicator"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let names: Vec<&str> = s.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(names, ["BMO", "BLO", "BMO_alpha", "BLO_alpha"]);
}

#[test]
fn experiment_writes_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = ballcalc(&["experiment", "t2-ratio", "--levels", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("report,rows,aggregate_max,aggregate_min,witness_field,witness_case,status,failed_checks"));
    assert!(lines.next().unwrap().starts_with("t2-ratio,"));
    for name in ["t2-ratio.csv", "t2-ratio-checks.csv", "summary.csv"] {
        assert!(out.join(name).exists(), "{name}");
    }
    assert_eq!(fs::read_to_string(out.join("summary.csv")).unwrap(), s);
    let again = ballcalc(&["experiment", "t2-ratio", "--levels", "5"]);
    assert_eq!(again.stdout, o.stdout);
}

#[test]
fn thread_cap_does_not_change_output() {
    let run = |t: &str| {
        Command::new(env!("CARGO_BIN_EXE_ballcalc"))
            .args(["experiment", "bmo-blo", "--preset", "grid", "--n", "32"])
            .env("BALLCALC_THREADS", t)
            .output()
            .unwrap()
    };
    let (a, b) = (run("1"), run("4"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let flag = ballcalc(&["experiment", "bmo-blo", "--preset", "grid", "--n", "32", "--threads", "2"]);
    assert_eq!(flag.stdout, a.stdout);
}
