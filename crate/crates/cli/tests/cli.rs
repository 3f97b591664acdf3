use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bergman")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name}"));
    lines.map(|l| l.split(',').nth(k).unwrap().to_string()).collect()
}

#[test]
fn lambda_at_origin_is_pi() {
    let o = run(&["weights", "--lambda", "--s", "0", "--t", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let row = out.lines().nth(1).unwrap();
    assert!(row.starts_with("0,0,3.1415926535897931"), "{row}");
}

#[test]
fn omega_grid_accepts_negative_values() {
    let o = run(&["weights", "--omega", "--a", "0", "--b", "1", "--t", "-1,0,2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let values = column(&stdout(&o), "value");
    assert_eq!(values.len(), 3);
    assert_eq!(values[1], "1");
}

#[test]
fn half_plane_kernel_at_i() {
    let o = run(&["kernel", "--method", "fourier", "--spec", &data("halfplane.json"), "--points", &data("ii.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let re: f64 = column(&out, "re")[0].parse().unwrap();
    assert!((re - 1.0 / (4.0 * PI)).abs() < 1e-15);
    assert_eq!(column(&out, "method"), vec!["fourier"]);
    assert_eq!(column(&out, "error_estimate").len(), 1);
}

#[test]
fn compare_on_siegel_grid() {
    let o = run(&["compare", "--spec", &data("siegel.json"), "--strict"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let devs = column(&stdout(&o), "rel_deviation");
    assert_eq!(devs.len(), 9 * 6);
    let worst = devs.iter().map(|d| d.parse::<f64>().unwrap()).fold(0.0, f64::max);
    assert!(worst < 1e-4, "{worst}");
}

#[test]
fn malformed_spec_reports_line() {
    let o = run(&["kernel", "--spec", &data("malformed.json"), "--points", &data("ii.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
}

#[test]
fn invalid_polynomial_reports_line() {
    let o = run(&["kernel", "--spec", &data("not_balanced.json"), "--points", &data("ii.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn point_outside_domain_is_a_validation_failure() {
    let o = run(&["kernel", "--spec", &data("halfplane.json"), "--points", &data("lower.json")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn isometries_hold_on_seeded_elements() {
    for t in ["rotation", "translation", "scaling"] {
        let o = run(&["isometry", "--transform", t, "--count", "3", "--strict"]);
        assert_eq!(o.status.code(), Some(0), "{t}: {}", stderr(&o));
        let out = stdout(&o);
        assert!(out.starts_with("test_id,lhs,rhs,rel_error"));
        assert_eq!(column(&out, "method"), vec![t; 3]);
    }
}

#[test]
fn roundtrip_recovers_profile() {
    let o = run(&["roundtrip", "--strip", "-0.15", "1", "--samples", "20", "--strict"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("t,f,reconstructed,abs_error"));
    let worst = column(&out, "abs_error").iter().map(|d| d.parse::<f64>().unwrap()).fold(0.0, f64::max);
    assert!(worst < 1e-6);
}

#[test]
fn strict_accuracy_flag_exits_3() {
    let args = ["roundtrip", "--strip", "-0.15", "1", "--samples", "5", "--tol", "1e-30"];
    assert_eq!(run(&args).status.code(), Some(0));
    let strict: Vec<&str> = args.iter().copied().chain(["--strict"]).collect();
    assert_eq!(run(&strict).status.code(), Some(3));
}

#[test]
fn nonpositive_tolerance_is_rejected() {
    assert_eq!(run(&["roundtrip", "--strip", "0", "1", "--tol", "0"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let args = ["isometry", "--transform", "translation", "--count", "2", "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let other = run(&["isometry", "--transform", "translation", "--count", "2", "--seed", "8"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn json_output_mirrors_csv() {
    let dir = std::env::temp_dir().join(format!("bergman-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv_path = dir.join("w.csv");
    let json_path = dir.join("w.json");
    for p in [&csv_path, &json_path] {
        let o = run(&["weights", "--lambda", "--s", "0,0.5", "--t", "1", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    let rows = json.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for (row, v) in rows.iter().zip(column(&csv, "value")) {
        assert_eq!(row["value"].as_f64().unwrap(), v.parse::<f64>().unwrap());
        assert_eq!(row["method"], "closed");
    }
    std::fs::remove_dir_all(&dir).unwrap();
}
