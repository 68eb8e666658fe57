use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qsteer(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsteer"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn analyze_maximally_mixed() {
    let dir = tempfile::tempdir().unwrap();
    let o = qsteer(
        &["analyze", "--tstate", "0,0,0", "--measurements", "fib:8", "--grid", "2", "--out", "r.json"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&dir.path().join("r.json"));
    assert!(r["s_value"].as_f64().unwrap().abs() < 1e-9);
    assert_eq!(r["verdict"], "unsteerable-for-set");
    assert_eq!(r["grid"]["level"], 2);
    assert_eq!(r["measurements"]["count"], 8);
    assert!(r["residuals"]["gap"].as_f64().unwrap() <= 1e-7);
    assert!(r["lhs_model"]["q"].is_array());
}

#[test]
fn analyze_steerable_werner_exits_2_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let o = qsteer(
        &["analyze", "--werner", "0.9", "--measurements", "fib:16", "--grid", "3", "--out", "r.json"],
        dir.path(),
    );
    assert_eq!(code(&o), 2);
    let r = read_json(&dir.path().join("r.json"));
    assert_eq!(r["verdict"], "steerable-for-set");
    let w = &r["witness"];
    assert!((w["value"].as_f64().unwrap() - r["s_value"].as_f64().unwrap()).abs() < 1e-6);
    assert_eq!(w["moment"].as_array().unwrap().len(), 16);
}

#[test]
fn analyze_unsteerable_werner_attaches_lhs_model() {
    let dir = tempfile::tempdir().unwrap();
    let o = qsteer(
        &["analyze", "--werner", "0.45", "--measurements", "fib:8", "--grid", "2", "--out", "r.json"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let r = read_json(&dir.path().join("r.json"));
    let q: f64 = r["lhs_model"]["q"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).sum();
    assert!((q - 1.0).abs() < 1e-10);
    assert_eq!(r["lhs_model"]["version"], "gmodel-v1");
}

#[test]
fn analyze_reads_state_files_and_names_bad_fields() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("ok.json"),
        r#"{"g": [[1,0,0,0],[0,-1,0,0],[0,0,-1,0],[0,0,0,-1]]}"#,
    )
    .unwrap();
    let o = qsteer(&["analyze", "--state", "ok.json", "--measurements", "fib:4", "--grid", "1"], dir.path());
    assert_eq!(code(&o), 2);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["verdict"], "steerable-for-set");

    std::fs::write(dir.path().join("bad.json"), r#"{"g": [[1,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,true,0]]}"#).unwrap();
    let o = qsteer(&["analyze", "--state", "bad.json", "--out", "r.json"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("g[3][2]"));
    assert!(!dir.path().join("r.json").exists());

    std::fs::write(dir.path().join("none.json"), r#"{"rho": 1}"#).unwrap();
    let o = qsteer(&["analyze", "--state", "none.json"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("density"));
}

#[test]
fn analyze_rejects_bad_inputs() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["analyze", "--werner", "1.5"][..],
        &["analyze", "--tstate", "2,0,0"],
        &["analyze", "--werner", "0.5", "--solver", "nope"],
        &["analyze", "--werner", "0.5", "--measurements", "grid:4"],
        &["analyze", "--werner", "0.5", "--grid", "9"],
    ] {
        let o = qsteer(args, dir.path());
        assert_eq!(code(&o), 1, "{args:?}");
    }
    // two state sources at once
    assert_ne!(code(&qsteer(&["analyze", "--werner", "0.5", "--seed", "1"], dir.path())), 0);
}

#[test]
fn analyze_with_simplex_backend_matches() {
    let dir = tempfile::tempdir().unwrap();
    let run = |solver: &str| {
        let o = qsteer(
            &["analyze", "--werner", "0.8", "--measurements", "fib:3", "--grid", "1", "--solver", solver],
            dir.path(),
        );
        assert_eq!(code(&o), 2);
        serde_json::from_slice::<Value>(&o.stdout).unwrap()["s_value"].as_f64().unwrap()
    };
    assert!((run("ipm") - run("simplex")).abs() < 1e-8);
}

#[test]
fn werner_sweep_is_ordered_monotone_and_job_independent() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["sweep", "--family", "werner", "--range", "0:1:0.1", "--measurements", "fib:8", "--grid", "2"];
    let one = qsteer(&[&base[..], &["--out", "a.csv"]].concat(), dir.path());
    let many = qsteer(&[&base[..], &["--out", "b.csv", "--jobs", "3"]].concat(), dir.path());
    assert_eq!((code(&one), code(&many)), (0, 0));
    let a = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, std::fs::read_to_string(dir.path().join("b.csv")).unwrap());
    assert!(a.starts_with("param,s_value,verdict,residual\n"));
    let rows = csv_rows(&a);
    assert_eq!(rows.len(), 11);
    let s: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(s.windows(2).all(|w| w[1] >= w[0] - 1e-9));
    let p: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(p[3], 0.3);
}

#[test]
fn mixture_sweep_crosses_one_above_the_analytic_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let o = qsteer(
        &[
            "sweep", "--family", "mixture:-0.5,-0.5,0", "--range", "0.05:0.35:0.03", "--measurements",
            "nest:4,8,16,32", "--grid", "2", "--jobs", "2",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&String::from_utf8(o.stdout).unwrap());
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap())).collect();
    let threshold = (1.0 - std::f64::consts::FRAC_PI_4) / (2.0 - std::f64::consts::FRAC_PI_4);
    for &(p, s) in &pts {
        if p <= threshold {
            assert!(s <= 1.0 + 1e-9, "p = {p}: s = {s}");
        }
    }
    let crossing = pts.windows(2).find(|w| w[0].1 <= 1.0 && w[1].1 > 1.0).expect("sign change");
    assert!(crossing[1].0 > threshold);
}

#[test]
fn sweep_edge_cases() {
    let dir = tempfile::tempdir().unwrap();
    let o = qsteer(&["sweep", "--family", "werner", "--range", "1:0:0.1"], dir.path());
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "param,s_value,verdict,residual\n");
    assert_eq!(code(&qsteer(&["sweep", "--family", "isotropic"], dir.path())), 1);
    assert_eq!(code(&qsteer(&["sweep", "--family", "werner", "--range", "0:1:-1"], dir.path())), 1);
}

#[test]
fn figures() {
    let dir = tempfile::tempdir().unwrap();
    let points = |args: &[&str]| -> Vec<[f64; 3]> {
        let o = qsteer(&[&["figure", "--directions", "2"][..], args].concat(), dir.path());
        assert_eq!(code(&o), 0);
        csv_rows(&String::from_utf8(o.stdout).unwrap())
            .iter()
            .map(|r| [r[3].parse().unwrap(), r[4].parse().unwrap(), r[5].parse().unwrap()])
            .collect()
    };
    let singlet = points(&["--werner", "1"]);
    assert_eq!(singlet.len(), 162);
    for p in &singlet {
        assert!(((p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt() - 0.5).abs() < 1e-12);
    }
    assert!(points(&["--tstate", "0,0,0"]).iter().all(|p| p.iter().all(|v| v.abs() < 1e-15)));
    let circle = points(&["--tstate", "-0.5,-0.5,0"]);
    for p in &circle {
        assert!(p[2].abs() < 1e-15);
        assert!((p[0] * p[0] + p[1] * p[1]).sqrt() <= 0.25 + 1e-12);
    }
    // directions in the xy-plane land on the circle of radius 1/4
    let o = qsteer(&["figure", "--tstate", "-0.5,-0.5,0", "--directions", "2"], dir.path());
    for r in csv_rows(&String::from_utf8(o.stdout).unwrap()) {
        let dz: f64 = r[2].parse().unwrap();
        if dz.abs() < 1e-12 {
            let (x, y): (f64, f64) = (r[3].parse().unwrap(), r[4].parse().unwrap());
            assert!(((x * x + y * y).sqrt() - 0.25).abs() < 1e-12);
        }
    }
}

#[test]
fn convergence_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = qsteer(
        &["converge", "--werner", "1", "--counts", "4,8", "--levels", "2,1", "--out", "c.csv"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "level,measurements,count,s_value,verdict");
    assert!(text.contains("\"nest:4,8\""));
    assert_eq!(text.lines().count(), 5);

    let o = qsteer(&["converge", "--tstate", "0,0,0", "--counts", "4,8", "--levels", "1,2"], dir.path());
    assert_eq!(code(&o), 0);
    for line in String::from_utf8(o.stdout).unwrap().lines().skip(1) {
        let s: f64 = line.rsplit(',').nth(1).unwrap().parse().unwrap();
        assert!(s.abs() < 1e-9);
    }

    let o = qsteer(&["converge", "--werner", "0.5", "--counts", "4,8,16", "--levels", "2"], dir.path());
    assert_eq!(code(&o), 0);
    for line in String::from_utf8(o.stdout).unwrap().lines().skip(1) {
        let s: f64 = line.rsplit(',').nth(1).unwrap().parse().unwrap();
        assert!(s <= 1.0 + 1e-9, "{line}");
    }
}

#[test]
fn models_mix_to_the_analytic_mass() {
    let dir = tempfile::tempdir().unwrap();
    let run = |args: &[&str]| {
        let o = qsteer(args, dir.path());
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    };
    let common = ["--measurements", "fib:6", "--grid", "2", "--ring", "90"];
    run(&[&["model", "--kind", "singlet", "--out", "s.json"][..], &common].concat());
    run(&[&["model", "--kind", "circle", "--out", "c.json"][..], &common].concat());
    run(&[
        "mix", "--model", "s.json", "--target", "werner:1", "--model", "c.json", "--target", "tstate:-0.5,-0.5,0",
        "--weights", "0.1,0.9", "--out", "m.json",
    ]);
    let m = read_json(&dir.path().join("m.json"));
    let s: f64 = m["q"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).sum();
    let expected = 0.2 + 0.9 * std::f64::consts::FRAC_PI_4;
    assert!((s - expected).abs() < 1e-9, "{s} vs {expected}");

    let o = qsteer(&["mix", "--model", "s.json", "--target", "werner:1", "--weights", "0.5,0.5"], dir.path());
    assert_eq!(code(&o), 1);
}

#[test]
fn lp_export_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["export-lp", "--werner", "0.7", "--measurements", "fib:2", "--grid", "0"];
    let a = qsteer(&args, dir.path());
    let b = qsteer(&args, dir.path());
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let dims: Vec<usize> = text.lines().nth(1).unwrap().split(' ').skip(1).map(|v| v.parse().unwrap()).collect();
    let entries = text.lines().skip_while(|l| *l != "entries").skip(1).take_while(|l| *l != "bounds").count();
    assert_eq!(dims[2], entries);
    assert!(text.ends_with("bounds\nall 0 inf\n"));
}

#[test]
fn analyze_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["analyze", "--seed", "4", "--measurements", "fib:6", "--grid", "2"];
    assert_eq!(qsteer(&args, dir.path()).stdout, qsteer(&args, dir.path()).stdout);
}
