use std::path::PathBuf;
use std::process::Command as Process;

use c3rotor_cli::{execute, Cell, Cli, FileConfig, Report};
use clap::Parser;

fn report_with(args: &[&str], file: &FileConfig, env: Option<&str>) -> Report {
    let argv: Vec<String> = std::iter::once("c3rotor").chain(args.iter().copied()).map(String::from).collect();
    let cli = Cli::try_parse_from(&argv).expect("valid arguments");
    execute(&cli.command, file, env).expect("command succeeds")
}

fn report(args: &[&str]) -> Report {
    report_with(args, &FileConfig::default(), None)
}

fn float(c: &Cell) -> f64 {
    match c {
        Cell::Float(x) => *x,
        Cell::Int(i) => *i as f64,
        Cell::Exact(s) => s.parse().expect("decimal"),
        Cell::Text(s) => panic!("text cell {s}"),
    }
}

fn column(r: &Report, name: &str) -> Vec<f64> {
    let j = r.column(name).expect("column");
    r.rows.iter().map(|row| float(&row[j])).collect()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("c3rotor-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn binary(args: &[&str]) -> std::process::Output {
    Process::new(env!("CARGO_BIN_EXE_c3rotor"))
        .args(args)
        .env_remove("C3ROTOR_PRECISION")
        .output()
        .expect("binary runs")
}

#[test]
fn free_e_levels() {
    let r = report(&["spectrum", "--species", "EA", "--lambda", "0", "--levels", "3"]);
    assert_eq!(column(&r, "energy"), vec![1.0, 4.0, 16.0]);
}

#[test]
fn series_coefficients_as_fractions() {
    let r = report(&["series", "--species", "A+", "--level", "0", "--order", "4"]);
    assert_eq!(r.meta_value("coefficients"), Some(&Cell::Exact("0, -1/18, 7/23328".into())));
    let r = report(&["series", "--species", "A-", "--level", "0", "--order", "0"]);
    assert_eq!(r.meta_value("coefficients"), Some(&Cell::Exact("9".into())));
    let r = report(&["series", "--species", "EA", "--level", "2", "--order", "2"]);
    let coeffs = match r.meta_value("coefficients") {
        Some(Cell::Exact(s)) => s.clone(),
        other => panic!("{other:?}"),
    };
    assert!(coeffs.starts_with("16, "), "{coeffs}");
}

#[test]
fn lowest_splitting_at_small_barrier() {
    let r = report(&["splitting", "--n", "1", "--lambda", "0.1"]);
    let d = column(&r, "splitting")[0];
    assert!((d - 5.555251e-4).abs() < 1e-9, "{d}");
}

#[test]
fn second_splitting_in_extended_precision() {
    let r = report(&["splitting", "--n", "2", "--lambda", "0.1", "--precision", "30"]);
    assert_eq!(r.meta_value("working_digits"), Some(&Cell::Int(31)));
    let d = column(&r, "splitting")[0];
    assert!((d / 4.763e-10 - 1.0).abs() < 1e-3, "{d}");
}

#[test]
fn splitting_fit_is_quadratic() {
    let r = report(&["splitting", "--n", "1", "--lambda", "0.01,0.02,0.05,0.1", "--fit"]);
    let slope = float(r.meta_value("slope").unwrap());
    assert!((slope - 2.0).abs() < 0.05, "{slope}");
}

#[test]
fn empty_scan_is_not_an_error() {
    let r = report(&["ep", "--species", "EA", "--scan", "0:2"]);
    assert!(r.rows.is_empty());
    assert_eq!(r.meta_value("note"), Some(&Cell::Text("no exceptional point in range".into())));
}

#[test]
fn file_defaults_yield_to_flags() {
    let file = FileConfig::parse("[spectrum]\nspecies = \"A+\"\nlambda = \"2\"\nlevels = 2\n").unwrap();
    let r = report_with(&["spectrum"], &file, None);
    assert_eq!(r.rows.len(), 2);
    assert_eq!(r.meta_value("species"), Some(&Cell::Text("A+".into())));
    let r = report_with(&["spectrum", "--levels", "4", "--lambda", "0"], &file, None);
    assert_eq!(r.rows.len(), 4);
    assert_eq!(column(&r, "energy"), vec![0.0, 9.0, 36.0, 81.0]);
}

#[test]
fn precision_resolution_order() {
    let file = FileConfig::parse("precision = 25\n").unwrap();
    let args = ["splitting", "--n", "1", "--lambda", "0.1"];
    let r = report_with(&args, &FileConfig::default(), None);
    assert_eq!(r.meta_value("working_digits"), Some(&Cell::Int(15)));
    let r = report_with(&args, &file, None);
    assert_eq!(r.meta_value("working_digits"), Some(&Cell::Int(31)));
    let r = report_with(&args, &file, Some("12"));
    assert_eq!(r.meta_value("working_digits"), Some(&Cell::Int(15)));
    let r = report_with(&["splitting", "--n", "1", "--lambda", "0.1", "--precision", "20"], &file, Some("12"));
    assert_eq!(r.meta_value("working_digits"), Some(&Cell::Int(31)));
}

#[test]
fn json_round_trips() {
    let r = report(&["spectrum", "--species", "A-", "--lambda", "3.5", "--levels", "4", "--precision", "28"]);
    let v: serde_json::Value = serde_json::from_str(&r.render(c3rotor_cli::Format::Json)).unwrap();
    assert_eq!(v["command"], "spectrum");
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), r.rows.len());
    for (row, cells) in rows.iter().zip(&r.rows) {
        for (x, c) in row.as_array().unwrap().iter().zip(cells) {
            assert_eq!(Cell::from_json(x, c).as_ref(), Some(c));
        }
    }
    for (k, c) in &r.meta {
        assert_eq!(Cell::from_json(&v["meta"][k], c).as_ref(), Some(c), "{k}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(binary(&["spectrum", "--species", "EA", "--lambda", "1"]).status.code(), Some(0));
    assert_eq!(binary(&["spectrum", "--species", "X", "--lambda", "1"]).status.code(), Some(1));
    assert_eq!(binary(&["spectrum", "--species", "EA", "--lambda", "1", "--precision", "40"]).status.code(), Some(1));
    assert_eq!(binary(&["spectrum", "--bogus"]).status.code(), Some(1));
    assert_eq!(binary(&["figure", "--id", "5"]).status.code(), Some(1));
    assert_eq!(binary(&["spectrum", "--species", "EA", "--lambda", "1", "--tol", "1e-30"]).status.code(), Some(2));
    let missing = scratch("absent/none.toml");
    let code = binary(&["--config", missing.to_str().unwrap(), "spectrum"]).status.code();
    assert_eq!(code, Some(2));
    let out = binary(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!out.stdout.is_empty());
}

#[test]
fn environment_sets_precision() {
    let out = Process::new(env!("CARGO_BIN_EXE_c3rotor"))
        .args(["splitting", "--n", "1", "--lambda", "0.1"])
        .env("C3ROTOR_PRECISION", "30")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("# working_digits: 31"));
}

#[test]
fn identical_runs_give_identical_bytes() {
    let (a, b) = (scratch("one.svg"), scratch("two.svg"));
    let args = |p: &PathBuf| vec!["figure".to_string(), "--id".into(), "2".into(), "--lambda-max".into(), "20".into(), "--plot".into(), p.display().to_string()];
    let first = Process::new(env!("CARGO_BIN_EXE_c3rotor")).args(args(&a)).output().unwrap();
    let second = Process::new(env!("CARGO_BIN_EXE_c3rotor")).args(args(&b)).output().unwrap();
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn output_flag_writes_the_file() {
    let path = scratch("spectrum.json");
    let out = binary(&["--format", "json", "--output", path.to_str().unwrap(), "spectrum", "--species", "EA", "--lambda", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["rows"][0][2], 1.0);
}
