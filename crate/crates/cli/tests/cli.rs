use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        let p = std::env::temp_dir().join(format!("robin-box-cli-{tag}-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&p);
        Scratch(p)
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robin-box"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .env("RUST_LOG", "error")
        .output()
        .unwrap()
}

fn ok(out: &Path, args: &[&str]) {
    let o = run(out, args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
}

/// Rows of a CSV file keyed by header name.
fn table(path: &Path) -> Vec<std::collections::HashMap<String, String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    r.records()
        .map(|rec| header.iter().cloned().zip(rec.unwrap().iter().map(String::from)).collect())
        .collect()
}

fn f(row: &std::collections::HashMap<String, String>, key: &str) -> f64 {
    row[key].parse().unwrap_or_else(|_| panic!("{key} = {}", row[key]))
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn spectrum_tables() {
    let s = Scratch::new("spectrum");
    ok(&s.0, &["spectrum", "--levels", "3", "--samples", "11"]);
    let rows = table(&s.0.join("spectrum.csv"));
    assert_eq!(rows.len(), 4);
    for (l, row) in rows.iter().enumerate() {
        let expect = PI * PI * ((l + 1) * (l + 1)) as f64 / 2.0;
        assert!((f(row, "energy") - expect).abs() <= 1e-12 * expect);
        assert_eq!(row["kind"], "positive");
    }
    let samples = table(&s.0.join("eigenfunctions/level_002.csv"));
    assert_eq!(samples.len(), 11);
    assert!(f(&samples[0], "re").abs() < 1e-15 && f(&samples[10], "re").abs() < 1e-15);

    let s = Scratch::new("spectrum-sym");
    ok(&s.0, &["spectrum", "--bc", "symmetric", "--gamma", "-3", "--samples", "0", "--sweep-points", "7"]);
    let rows = table(&s.0.join("spectrum.csv"));
    assert_eq!(rows.iter().filter(|r| r["kind"] == "negative").count(), 2);
    assert!(!s.0.join("eigenfunctions").exists());
    let sweep = table(&s.0.join("spectrum_sweep.csv"));
    assert_eq!(sweep.len(), 7 * 11);
    for r in &sweep {
        assert!((f(r, "arctan_gL").tan() - f(r, "gamma")).abs() < 1e-9 * (1.0 + f(r, "gamma").abs()));
    }

    let s = Scratch::new("spectrum-anti");
    ok(&s.0, &["spectrum", "--bc", "antisymmetric", "--gamma", "1", "--samples", "0"]);
    let rows = table(&s.0.join("spectrum.csv"));
    let neg: Vec<_> = rows.iter().filter(|r| r["kind"] == "negative").collect();
    assert_eq!(neg.len(), 1);
    assert_eq!(f(neg[0], "energy"), -0.5);
}

#[test]
fn measure_outputs() {
    let s = Scratch::new("measure");
    ok(&s.0, &["measure", "--state", "dirichlet:4", "--n-max", "500"]);
    let rows = table(&s.0.join("histogram.csv"));
    assert_eq!(rows.len(), 1001);
    for r in &rows {
        if r["n"] == "4" || r["n"] == "-4" {
            assert_eq!(f(r, "probability"), 0.25);
            assert!((f(r, "k_n").abs() - 4.0 * PI).abs() < 1e-12);
        }
    }
    let summary = json(&s.0.join("summary.json"));
    assert!((summary["histogram_sum"].as_f64().unwrap() - 1.0).abs() < 1e-5);
    assert!((summary["pR2"].as_f64().unwrap() - 16.0 * PI * PI).abs() < 1e-6);
    let dens = table(&s.0.join("density.csv"));
    assert_eq!(dens.len(), 2001);

    let s = Scratch::new("measure-lz");
    ok(&s.0, &["measure", "--state", "linear-zero", "--n-max", "200", "--density-points", "5"]);
    assert_eq!(json(&s.0.join("summary.json"))["pR2"], "inf");

    let s = Scratch::new("measure-const");
    ok(&s.0, &["measure", "--state", "constant", "--n-max", "200"]);
    let rows = table(&s.0.join("histogram.csv"));
    let top = rows.iter().max_by(|a, b| f(a, "probability").total_cmp(&f(b, "probability"))).unwrap();
    assert_eq!(top["n"], "0");
}

#[test]
fn evolve_series_and_snapshots() {
    let s = Scratch::new("evolve");
    ok(&s.0, &["evolve", "--times", "0,0.5,1", "--snapshot-points", "21", "--momentum-points", "0"]);
    let rows = table(&s.0.join("series.csv"));
    assert_eq!(rows.len(), 3);
    assert!((f(&rows[0], "overlap") - 1.0).abs() < 1e-10 && (f(&rows[2], "overlap") - 1.0).abs() < 1e-10);
    assert!((f(&rows[1], "pR") + f(&rows[0], "pR")).abs() < 1e-8 * 41.0 * PI);
    assert!(f(&rows[1], "density_distance") < 1e-8);
    let snap = table(&s.0.join("snapshots/002.csv"));
    assert_eq!(snap.len(), 21);
    assert!(!s.0.join("momentum").exists());

    let s = Scratch::new("evolve-mixed");
    ok(&s.0, &["evolve", "--bc", "mixed", "--span", "0.125", "--steps", "4"]);
    let rows = table(&s.0.join("series.csv"));
    assert_eq!(rows.len(), 5);
    let t_end = f(&rows[4], "t");
    assert!((t_end - 0.125 * 4.0 / PI).abs() < 1e-15);
    assert!(s.0.join("snapshots/004.csv").exists() && s.0.join("momentum/004.csv").exists());
}

#[test]
fn ehrenfest_rows() {
    let s = Scratch::new("ehrenfest");
    ok(&s.0, &["ehrenfest"]);
    let rows = table(&s.0.join("ehrenfest.csv"));
    assert_eq!(rows.len(), 20);
    let worst = rows.iter().map(|r| f(r, "residual1")).fold(0.0, f64::max);
    assert!(worst <= 1e-8 * 41.0 * PI);
    assert!(rows.iter().all(|r| r["force_boundary_robin"].is_empty()));

    let s = Scratch::new("ehrenfest-eigen");
    ok(&s.0, &["ehrenfest", "--state", "neumann:3", "--steps", "3"]);
    for r in table(&s.0.join("ehrenfest.csv")) {
        assert_eq!(f(&r, "dx_dt"), 0.0);
        assert_eq!(f(&r, "dpR_dt"), 0.0);
    }

    let s = Scratch::new("ehrenfest-random");
    ok(&s.0, &["ehrenfest", "--bc", "symmetric", "--gamma", "1", "--state", "random:6", "--seed", "7"]);
    for r in table(&s.0.join("ehrenfest.csv")) {
        assert!(f(&r, "residual2") <= 1e-5 && f(&r, "residual1") <= 1e-7);
        assert!(f(&r, "continuity_residual") <= 1e-6);
    }
}

#[test]
fn uncertainty_reports() {
    let s = Scratch::new("uncertainty");
    ok(&s.0, &["uncertainty", "--state", "eq13:1"]);
    let doc = json(&s.0.join("uncertainty.json"));
    assert!(doc["report"]["pR"].as_f64().unwrap().abs() <= 1e-9);
    assert!(doc["report"]["anticomm"].as_f64().unwrap().abs() <= 1e-9);
    assert_eq!(doc["family"]["name"], "antisymmetric");
    assert!((doc["commutator_x_pR"]["im"].as_f64().unwrap() - 1.0).abs() < 1e-8);

    let s = Scratch::new("uncertainty-lz");
    ok(&s.0, &["uncertainty", "--state", "linear-zero"]);
    let doc = json(&s.0.join("uncertainty.json"));
    assert_eq!(doc["report"]["holds"], true);
    assert!(doc["report"]["anticomm"].as_f64().unwrap().abs() <= 1e-9);

    let s = Scratch::new("uncertainty-sweep");
    ok(&s.0, &["uncertainty", "--bc", "symmetric", "--gamma", "-3", "--count", "100", "--seed", "1"]);
    let doc = json(&s.0.join("uncertainty.json"));
    assert_eq!(doc["sweep"]["violations"], 0);
    let rows = table(&s.0.join("uncertainty_sweep.csv"));
    assert_eq!(rows.len(), 100);
    assert!(rows.iter().all(|r| r["holds"] == "true"));
    assert_eq!(rows[0]["seed"], "1");
}

#[test]
fn config_file_and_flag_precedence() {
    let s = Scratch::new("config");
    std::fs::create_dir_all(&s.0).unwrap();
    let cfg = s.0.join("run.json");
    std::fs::write(&cfg, r#"{"m": 2.0, "L": 2.0, "bc": "antisymmetric", "gamma": 0.5, "levels": 2, "samples": 0}"#)
        .unwrap();
    let out = s.0.join("a");
    ok(&out, &["spectrum", "--config", cfg.to_str().unwrap()]);
    let rows = table(&out.join("spectrum.csv"));
    assert_eq!(rows.len(), 3);
    assert_eq!(f(&rows[0], "energy"), -0.25 / 4.0);
    let out = s.0.join("b");
    ok(&out, &["spectrum", "--config", cfg.to_str().unwrap(), "--gamma", "1", "--levels", "4"]);
    let rows = table(&out.join("spectrum.csv"));
    assert_eq!(rows.len(), 5);
    assert_eq!(f(&rows[0], "energy"), -0.25);

    std::fs::write(&cfg, r#"{"bogus": 1}"#).unwrap();
    assert_eq!(run(&s.0.join("c"), &["spectrum", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_with_two() {
    let s = Scratch::new("usage");
    let cases: [&[&str]; 7] = [
        &["spectrum", "--gamma", "abc"],
        &["spectrum", "--bc", "symmetric"],
        &["spectrum", "--bc", "wobbly"],
        &["measure"],
        &["measure", "--state", "dirichlet:0"],
        &["evolve", "--bc", "symmetric", "--gamma", "1", "--state", "gaussian:0.05,10"],
        &["measure", "--bc", "neumann", "--state", "dirichlet:2"],
    ];
    for args in cases {
        let o = run(&s.0, args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(run(&s.0, &["spectrum", "--L", "-1"]).status.code(), Some(2));
}
