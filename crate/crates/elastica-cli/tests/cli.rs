//! End-to-end runs of the `elastica` binary: table values, file outputs,
//! determinism, spec-file merging, and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

use elastica::io::{read_snapshot, read_trace};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elastica"))
        .args(args)
        .output()
        .expect("binary launches")
}

fn stdout_of(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn temp_base(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("elastica-cli-{}-{name}", std::process::id()))
}

/// Splits a CSV body into rows of fields, skipping `#` comment lines.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn qfun_table_is_deterministic_and_tagged_by_branch() {
    let args = ["qfun", "--kmin", "-0.9", "--kmax", "0.9", "--n", "10"];
    let first = stdout_of(&run(&args));
    let second = stdout_of(&run(&args));
    assert_eq!(first, second);

    let table = rows(&first);
    assert_eq!(table[0], ["k", "Q", "Qtilde"]);
    assert_eq!(table.len(), 11);
    for row in &table[1..] {
        let k: f64 = row[0].parse().unwrap();
        let q: f64 = row[1].parse().unwrap();
        assert!(q > 0.0 && q < 0.162278);
        if k > std::f64::consts::FRAC_1_SQRT_2 {
            let qt: f64 = row[2].parse().unwrap();
            assert!(qt < q, "reduced quotient not below Q at k = {k}");
        } else {
            assert!(row[2].is_empty(), "Qtilde printed outside its branch");
        }
    }
}

#[test]
fn critical_profile_prints_the_amplitude() {
    let out = stdout_of(&run(&["critical-profile"]));
    let table = rows(&out);
    assert_eq!(table[0], ["field", "value"]);
    let a_star: f64 = table
        .iter()
        .find(|r| r[0] == "a_star")
        .expect("a_star row")[1]
        .parse()
        .unwrap();
    assert!((a_star - 1.41233776).abs() <= 1e-7);
}

#[test]
fn consistency_reproduces_published_deviations() {
    let out = stdout_of(&run(&["consistency", "--J", "1024", "--which", "both"]));
    let table = rows(&out);
    assert_eq!(table[0], ["family", "J", "Ehat0_minus_2pi"]);
    assert_eq!(table.len(), 3);
    let value = |family: &str| -> f64 {
        table
            .iter()
            .find(|r| r[0] == family)
            .unwrap_or_else(|| panic!("{family} row missing"))[2]
            .parse()
            .unwrap()
    };
    let crit = value("critical");
    let ela = value("elastica");
    assert!((crit / -4.8248e-5 - 1.0).abs() <= 0.01, "critical {crit:e}");
    assert!((ela / -4.8216e-5 - 1.0).abs() <= 0.01, "elastica {ela:e}");
}

#[test]
fn flow_line_run_is_a_fixed_point_and_compare_closes_the_loop() {
    let base = temp_base("line");
    let base_str = base.to_str().unwrap();
    let out = stdout_of(&run(&[
        "flow", "--initial", "line", "--J", "16", "--dt", "1e-3", "--t-end", "0.01", "--out",
        base_str,
    ]));
    assert!(out.contains("wrote"));

    let trace_path = format!("{base_str}_trace.csv");
    let trace = read_trace(&trace_path).unwrap();
    assert_eq!(trace.rows.len(), 11);
    for row in &trace.rows {
        assert!(row.scale_invariant.abs() <= 1e-10, "line grew energy");
        assert!((row.length - 2.0).abs() <= 1e-10);
    }

    let snap_end = format!("{base_str}_t0.01.dat");
    let (curve, meta) = read_snapshot(&snap_end).unwrap();
    assert_eq!(curve.element_count(), 16);
    assert!(meta.iter().any(|(k, _)| k == "J"));

    // A snapshot is at distance zero from itself and still a line.
    let cmp = stdout_of(&run(&[
        "compare", "--snapshot", &snap_end, "--ref-file", &snap_end,
    ]));
    let self_distance: f64 = rows(&cmp)[1][2].parse().unwrap();
    assert_eq!(self_distance, 0.0);

    let cmp = stdout_of(&run(&[
        "compare", "--snapshot", &snap_end, "--ref", "line",
    ]));
    let table = rows(&cmp);
    assert_eq!(table[0], ["snapshot", "reference", "distance"]);
    let line_distance: f64 = table[1][2].parse().unwrap();
    assert!(line_distance <= 1e-6, "drifted off the line: {line_distance:e}");

    for path in [
        trace_path,
        format!("{base_str}_t0.dat"),
        snap_end,
    ] {
        std::fs::remove_file(path).ok();
    }
}

#[test]
fn bisect_rejects_an_inverted_bracket() {
    let out = run(&[
        "bisect", "--J", "64", "--alo", "1.5", "--ahi", "1.4", "--res", "1e-2", "--tmax", "0.5",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let record: serde_json::Value =
        serde_json::from_slice(&out.stderr).expect("stderr is a JSON error record");
    assert_eq!(record["error"], "domain");
    assert!(record["message"].as_str().unwrap().contains("bracket"));
}

#[test]
fn stability_table_certifies_the_negative_direction() {
    let out = stdout_of(&run(&["stability"]));
    let table = rows(&out);
    assert_eq!(table[0], ["mode", "B"]);
    let value = |name: &str| -> f64 {
        table
            .iter()
            .find(|r| r[0] == name)
            .unwrap_or_else(|| panic!("{name} row missing"))[1]
            .parse()
            .unwrap()
    };
    assert!((value("cosine_1") - -0.1646).abs() <= 1e-3);
    assert!(value("spectrum_1") < 0.0);
}

#[test]
fn spec_file_supplies_defaults_and_flags_override() {
    let path = temp_base("spec.json");
    std::fs::write(
        &path,
        r#"{"command": "qfun", "kmin": -0.5, "kmax": 0.5, "n": 3}"#,
    )
    .unwrap();
    let path_str = path.to_str().unwrap();

    let from_file = stdout_of(&run(&["qfun", "--spec", path_str]));
    assert_eq!(rows(&from_file).len(), 4);

    let overridden = stdout_of(&run(&["qfun", "--spec", path_str, "--n", "5"]));
    assert_eq!(rows(&overridden).len(), 6);

    // The file names qfun; running another command with it must fail.
    let mismatched = run(&["consistency", "--spec", path_str]);
    assert_eq!(mismatched.status.code(), Some(1));

    std::fs::write(&path, r#"{"n": 3, "typo": 1}"#).unwrap();
    let unknown_key = run(&["qfun", "--spec", path_str]);
    assert_eq!(unknown_key.status.code(), Some(1));

    std::fs::remove_file(&path).ok();
}
