//! Tests against the compiled `impois` binary: exit codes, output shape,
//! and the environment override for the grid-step cap.

use std::process::Command;

fn impois() -> Command {
    Command::new(env!("CARGO_BIN_EXE_impois"))
}

#[test]
fn bounds_round_trip() {
    let out = impois()
        .args([
            "bounds", "--lo", "1", "--hi", "2", "--t", "0", "--s", "1", "--x", "0", "--f", "ind:0",
            "--set", "both", "--eps", "1e-6",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("t,s,x,set,lower,upper,error_bound,steps,truncation_top"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn usage_error_is_exit_2() {
    let out = impois().args(["bounds", "--lo", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn unknown_subcommand_is_exit_2() {
    let out = impois().args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tolerance_cap_is_exit_3() {
    let out = impois()
        .args([
            "bounds",
            "--lo",
            "1",
            "--hi",
            "2",
            "--t",
            "0",
            "--s",
            "1",
            "--x",
            "0",
            "--f",
            "ind:1",
            "--set",
            "consistent",
            "--eps",
            "1e-14",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("tolerance too tight"), "{err}");
}

#[test]
fn max_steps_env_lowers_the_cap() {
    // a query that normally fits (needs 160k steps) fails once the cap is
    // pulled below it
    let args = [
        "bounds",
        "--lo",
        "1",
        "--hi",
        "2",
        "--t",
        "0",
        "--s",
        "1",
        "--x",
        "0",
        "--f",
        "ind:1",
        "--set",
        "consistent",
        "--eps",
        "1e-4",
    ];
    let ok = impois().args(args).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));

    let capped = impois()
        .args(args)
        .env("IMPOIS_MAX_STEPS", "1000")
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(3));

    let raised = impois()
        .args(args)
        .env("IMPOIS_MAX_STEPS", "200000000")
        .output()
        .unwrap();
    assert_eq!(raised.status.code(), Some(0));
}

#[test]
fn sweep_writes_file_and_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curves.csv");
    let args = [
        "sweep", "--lo", "1", "--hi", "2", "--x", "0", "--f", "ind:0", "--start", "0", "--stop",
        "2", "--step", "0.5", "--eps", "1e-5",
    ];
    let out = impois()
        .args(args)
        .arg("--out")
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let first = std::fs::read_to_string(&path).unwrap();
    assert_eq!(first.lines().count(), 6); // header + 5 rows
                                          // closed forms: lower = exp(-2t), upper = exp(-t) on both columns
    for line in first.lines().skip(1) {
        let fields: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        let t = fields[0];
        assert!((fields[1] - (-2.0 * t).exp()).abs() <= 1e-4, "{line}");
        assert!((fields[2] - (-t).exp()).abs() <= 1e-4, "{line}");
        assert!((fields[3] - (-2.0 * t).exp()).abs() <= 1e-4, "{line}");
        assert!((fields[4] - (-t).exp()).abs() <= 1e-4, "{line}");
    }

    let rerun = impois()
        .args(args)
        .arg("--out")
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(rerun.status.code(), Some(0));
    let second = std::fs::read_to_string(&path).unwrap();
    assert_eq!(first, second);
}

#[test]
fn sweep_gap_between_sets_for_one_event() {
    let out = impois()
        .args([
            "sweep", "--lo", "1", "--hi", "2", "--x", "0", "--f", "ind:1", "--times", "0.5,1.0",
            "--eps", "1e-4",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(1) {
        let fields: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        let (lower_c, upper_c, lower_p, upper_p) = (fields[1], fields[2], fields[3], fields[4]);
        assert!(lower_c < lower_p && upper_p < upper_c, "{line}");
    }
}

#[test]
fn exact_matches_documented_strings() {
    let out = impois()
        .args(["exact", "--rate", "2", "--dt", "1", "--x", "0", "--y", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        "0.135335283237"
    );

    let out = impois()
        .args([
            "exact", "--rate", "1", "--t", "0", "--s", "1", "--x", "0", "--f", "id",
        ])
        .output()
        .unwrap();
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        "1.000000000000"
    );
}

#[test]
fn file_backed_function_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.txt");
    // indicator of {1} written out as a value table
    std::fs::write(&path, "0.0\n1.0\n0.0\ntail=0.0\n").unwrap();
    let table = impois()
        .args(["bounds", "--lo", "1", "--hi", "2", "--t", "0", "--s", "1"])
        .args(["--x", "0", "--set", "poisson", "--eps", "1e-6"])
        .arg("--f")
        .arg(format!("file:{}", path.display()))
        .output()
        .unwrap();
    assert_eq!(table.status.code(), Some(0));
    let builtin = impois()
        .args(["bounds", "--lo", "1", "--hi", "2", "--t", "0", "--s", "1"])
        .args(["--x", "0", "--set", "poisson", "--eps", "1e-6"])
        .args(["--f", "ind:1"])
        .output()
        .unwrap();
    let row = |o: &std::process::Output| {
        String::from_utf8(o.stdout.clone())
            .unwrap()
            .lines()
            .nth(1)
            .unwrap()
            .to_string()
    };
    assert_eq!(row(&table), row(&builtin));
}

#[test]
fn oracle_check_reports_summary() {
    let out = impois()
        .args(["oracle-check", "--cases", "50", "--seed", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("cases=50 failures=0 seed=3"));
}

#[test]
fn help_exits_zero() {
    let out = impois().args(["--help"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("bounds"));
    assert!(text.contains("sweep"));
    assert!(text.contains("oracle-check"));
}
