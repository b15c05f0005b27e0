//! The `dris` binary as a process: outputs, determinism and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn dris(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dris")).args(args).output().expect("binary runs")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dris-it-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn periods_output_is_deterministic_json() {
    let args = ["periods", "--square-torus", "2", "3", "1.0471975512", "--pairs", "10"];
    let (a, b) = (dris(&args), dris(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    let tau = num_complex::Complex64::from_polar(1.5, 2.0 * 1.0471975512);
    let pg = &v["pi_gamma"][0][0];
    assert!((pg["re"].as_f64().unwrap() - tau.re).abs() < 1e-9);
    assert!((pg["im"].as_f64().unwrap() - tau.im).abs() < 1e-9);
    for key in ["gram", "pi", "pi_gamma_star", "pi_diamond", "solver", "residuals"] {
        assert!(!v[key].is_null(), "missing {key}");
    }
    assert!(stdout(&a).contains("e+00") || stdout(&a).contains("e-0"));
}

#[test]
fn periods_from_a_file_matches_the_generator() {
    let gen = dris(&["periods", "--genus-two", "2", "--pairs", "0"]);
    let json = discrete_riemann::io::to_json(&discrete_riemann::io::ComplexFile::from_complex(
        &discrete_riemann::fixtures::genus_two(2).unwrap(),
    ));
    let file = scratch("g2.json", &json);
    let loaded = dris(&["periods", "--input", file.to_str().unwrap(), "--pairs", "0"]);
    assert_eq!(loaded.status.code(), Some(0));
    // ρ passes through %.12e, so agreement is to about 12 digits.
    let (a, b): (serde_json::Value, serde_json::Value) =
        (serde_json::from_str(&stdout(&gen)).unwrap(), serde_json::from_str(&stdout(&loaded)).unwrap());
    for (ra, rb) in a["pi"].as_array().unwrap().iter().zip(b["pi"].as_array().unwrap()) {
        for (za, zb) in ra.as_array().unwrap().iter().zip(rb.as_array().unwrap()) {
            for part in ["re", "im"] {
                assert!((za[part].as_f64().unwrap() - zb[part].as_f64().unwrap()).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn input_errors_exit_two() {
    let file = scratch("bad.json", "{\"vertices\": 3}");
    let o = dris(&["periods", "--input", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("malformed complex JSON"));
    assert_eq!(dris(&["periods", "--input", "/nonexistent/x.json"]).status.code(), Some(2));
    assert_eq!(dris(&["converge", "--square-torus", "1", "1", "2.0"]).status.code(), Some(2));
    assert_eq!(dris(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(dris(&["--help"]).status.code(), Some(0));
}

#[test]
fn converge_has_one_row_per_level() {
    let o = dris(&["converge", "--square-torus", "1", "1", "0.7853981634", "--levels", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    let deltas: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(deltas, [1.0, 0.5, 0.25]);
    assert!(rows.iter().all(|r| r[3].parse::<f64>().unwrap() <= 1e-9));
}

#[test]
fn special_point_clouds() {
    let o = dris(&["special", "power", "--k", "3", "--chain", "10"]);
    let text = stdout(&o);
    let row: Vec<f64> = text.lines().nth(11).unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    assert!((row[3] - 1.005).abs() < 1e-12);
    let o = dris(&["special", "power", "--k", "0"]);
    let text = stdout(&o);
    for line in text.lines().skip(1).filter(|l| !l.starts_with('#')) {
        let c: Vec<&str> = line.split(',').collect();
        assert_eq!((c[3], c[4]), ("1.000000000000e+00", "0.000000000000e+00"));
    }
    let o = dris(&["special", "exp", "--lambda", "1+0i", "--sextant", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next().unwrap(), "vertex,re_z,im_z,re_f,im_f,re_cont,im_cont");
    assert_eq!(dris(&["special", "exp", "--lambda", "oops"]).status.code(), Some(2));
}

#[test]
fn move_scripts() {
    let empty = scratch("empty.json", "[]");
    let o = dris(&["moves", "--square-torus", "2", "2", "0.7", "--script", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["curvature"].as_array().unwrap().len(), 1);
    let original = discrete_riemann::critical::square_torus(2, 2, 0.7).unwrap().complex;
    let echoed: discrete_riemann::io::ComplexFile = serde_json::from_value(v["final"].clone()).unwrap();
    assert_eq!(echoed.build().unwrap().raw().quads, original.raw().quads);

    let bad = scratch("bad-site.json", r#"[{"kind": "III", "site": 1000000}]"#);
    let o = dris(&["moves", "--square-torus", "2", "2", "0.7", "--script", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("step 0"));

    let garbage = scratch("garbage.json", r#"[{"kind": "IV", "site": 0}]"#);
    let o = dris(&["moves", "--genus-two", "0", "--script", garbage.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
