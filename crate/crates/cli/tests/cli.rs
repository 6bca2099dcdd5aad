use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hbspace::io::parse_pair;
use hbspace::TAU;

fn hbspace(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hbspace"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no `{key}` in {text}"))
        .parse()
        .unwrap()
}

#[test]
fn pair_file_holds_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let o = hbspace(&["pair", "--b", "b0", "--degree", "256", "--out", "pair.txt"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(value(&stdout(&o), "identity_defect") <= 1e-8);
    let pair = parse_pair(&fs::read_to_string(dir.path().join("pair.txt")).unwrap()).unwrap();
    assert!((pair.a().coeff(0).re - TAU).abs() < 1e-10);
    for k in 1..=20 {
        assert!((pair.a().coeff(k).re + TAU.powi(2 * k as i32)).abs() < 1e-10);
        assert!((pair.phi().coeff(k).re - 1.0).abs() < 1e-8);
    }
}

#[test]
fn norm_of_z_is_two() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("f.txt"), "0 0\n1 0\n").unwrap();
    let o = hbspace(&["norm", "--b", "b0", "--f", "f.txt"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!((value(&out, "hb_norm_sq") - 2.0).abs() < 1e-10);
    assert!(value(&out, "identity_defect") <= 1e-8);
}

#[test]
fn fplus_of_kernel_is_kernel() {
    let dir = tempfile::tempdir().unwrap();
    let o = hbspace(&["fplus", "--b", "b0", "--degree", "80", "--grid", "512", "--f", "kernel:0.5", "--json"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    // the pair contract pins φ to 1e-8
    assert!((v["hb_norm_sq"].as_f64().unwrap() - 8.0 / 3.0).abs() < 1e-8);
    let fplus = v["fplus"].as_array().unwrap();
    for (k, c) in fplus.iter().enumerate() {
        assert!((c[0].as_f64().unwrap() - 0.5f64.powi(k as i32)).abs() < 1e-8);
    }
}

#[test]
fn blowup_writes_csv_and_slope() {
    let dir = tempfile::tempdir().unwrap();
    let o = hbspace(&["blowup", "--terms", "30", "--r-exponents", "3..10", "--out", "curve.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let slope = value(&stdout(&o), "slope");
    assert!((0.4..=0.6).contains(&slope));
    let csv = fs::read_to_string(dir.path().join("curve.csv")).unwrap();
    assert_eq!(csv.lines().count(), 9);
    assert!(csv.starts_with("x,y,label\n"));
}

#[test]
fn identical_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 3] = [
        &["sarason", "--degree", "64", "--grid", "512", "--trials", "8", "--poly-degree", "16", "--seed", "7", "--out", "OUT"],
        &["toeplitz-approx", "--degree", "128", "--grid", "1024", "--f", "kernel:0.5", "--n-values", "1,4,16", "--out", "OUT"],
        &["diverge", "--zeros", "3", "--degree", "512", "--n-max", "256", "--out", "OUT"],
    ];
    for args in runs {
        let mut files = Vec::new();
        for name in ["one", "two"] {
            let args: Vec<&str> = args.iter().map(|a| if *a == "OUT" { name } else { a }).collect();
            let o = hbspace(&args, dir.path());
            assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
            files.push(fs::read(dir.path().join(name)).unwrap());
        }
        assert_eq!(files[0], files[1], "{args:?}");
    }
}

#[test]
fn approx_certifies_its_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = hbspace(&["approx", "--degree", "400", "--grid", "2048", "--f", "kernel:0.9", "--epsilon", "0.1"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(value(&out, "achieved_error") <= 0.6);
    assert!(out.contains("[q]"));
}

#[test]
fn blowup_data_diverges() {
    let dir = tempfile::tempdir().unwrap();
    let o = hbspace(&["diverge", "--zeros", "6", "--degree", "4096", "--n-max", "2048"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(value(&out, "max_partial_sum_norm") > 10.0 * value(&out, "hb_norm_exact"));
}

#[test]
fn sarason_contrast_finds_witness() {
    let dir = tempfile::tempdir().unwrap();
    let o = hbspace(&["sarason", "--degree", "64", "--grid", "512", "--trials", "4", "--poly-degree", "8", "--contrast", "6"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(value(&out, "max_ratio") <= 1.0 + 1e-8);
    assert!(value(&out, "contrast_max_ratio") > 1.0);
}

#[test]
fn floor_command_reports_floor() {
    let dir = tempfile::tempdir().unwrap();
    let o = hbspace(&["lemma-bp", "--count", "8", "--samples", "64"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(value(&out, "measured_floor") >= 1e-3);
    assert!(value(&out, "measured_floor") >= value(&out, "analytic_floor"));
}

#[test]
fn invalid_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], &str); 5] = [
        (&["pair", "--b", "b0 * nope"], "ERROR:parse_error:"),
        (&["pair", "--b", "scalar:1.5"], "ERROR:not_in_unit_ball:"),
        (&["pair", "--degree", "1024", "--grid", "1000"], "ERROR:grid_not_power_of_two:"),
        (&["norm", "--f", "missing.txt"], "ERROR:io_error:"),
        (&["frobnicate"], "ERROR:usage:"),
    ];
    for (args, prefix) in cases {
        let o = hbspace(args, dir.path());
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(stderr(&o).starts_with(prefix), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn degraded_numerics_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    // at degree 16 the truncated b₀ leaves a product defect near 1e-7
    let o = hbspace(&["pair", "--degree", "16", "--grid", "128"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("ERROR:pair_identity:"));
    let o = hbspace(&["approx", "--degree", "400", "--grid", "2048", "--f", "kernel:0.9", "--epsilon", "0.01", "--max-outer", "4"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("ERROR:budget_exceeded:"));
}

#[test]
fn help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = hbspace(&["--help"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("toeplitz-approx"));
}
