use std::path::Path;
use std::process::{Command, Output};

fn epme(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epme"))
        .args(args)
        .env_remove("EPME_SEED")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

#[test]
fn eigen_all_ones() {
    let o = epme(&["eigen", "--u", "1,1,1", "--v", "1,1,1", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let h: Vec<f64> = json(&o)["h"].as_array().unwrap().iter().map(|z| z[0].as_f64().unwrap()).collect();
    let s = 5f64.sqrt();
    for (a, b) in h.iter().zip([-s, -1.0, -1.0, 1.0, 1.0, s]) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn svd_product_is_five() {
    let o = epme(&["svd", "--u", "1,1,1", "--v", "1,1,1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("product,5.0000000000"));
    assert!(stdout(&o).contains("b,34.0000000000"));
}

#[test]
fn zero_coordinate_exits_2() {
    for cmd in ["eigen", "svd"] {
        let o = epme(&[cmd, "--u", "1,0,1", "--v", "1,1,1"]);
        assert_eq!(code(&o), 2, "{cmd}");
        assert!(stderr(&o).contains("u2"));
    }
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(code(&epme(&["verify", "--points", "0"])), 2);
    assert_eq!(code(&epme(&["verify", "--tol", "bogus=1"])), 2);
    assert_eq!(code(&epme(&["nonsense"])), 2);
    assert_eq!(code(&epme(&["simulate", "--path", "/no/such/file.csv"])), 2);
}

#[test]
fn tampered_operator_exits_1_naming_entry() {
    let o = epme(&["verify", "--points", "1", "--tamper", "4,5"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("(4,5)"), "{}", stderr(&o));
}

#[test]
fn verify_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = epme(&["verify", "--seed", "7", "--points", "4", "--out", d.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    for f in ["verify_report.json", "verify_summary.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap());
    }
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(a.join("verify_report.json")).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["symbolic"].as_array().unwrap().len(), 7);
    assert_eq!(report["numeric"].as_array().unwrap().len(), 9);
    assert_eq!(report["findings"]["lambda_sign"]["omega1_eigenvalue"], -1.25);
}

#[test]
fn seed_sources_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "seed = 11\npoints = 1\n").unwrap();
    let run = |extra: &[&str], env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_epme"));
        c.args(["section", "--format", "json"]).args(extra).env_remove("EPME_SEED");
        if let Some(e) = env {
            c.env("EPME_SEED", e);
        }
        let o = c.output().unwrap();
        json(&o)["seed"].as_u64().unwrap()
    };
    let cfg_s = cfg.to_str().unwrap();
    assert_eq!(run(&["--points", "1"], None), 42);
    assert_eq!(run(&["--points", "1"], Some("5")), 5);
    assert_eq!(run(&["--config", cfg_s], Some("5")), 11);
    assert_eq!(run(&["--config", cfg_s, "--seed", "3"], Some("5")), 3);
}

#[test]
fn simulate_exp1_is_catenary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let args = [
        "simulate", "--path", "exp1", "--c", "1,1,1", "--l", "1,1,1", "--t0", "-1", "--t1", "1", "--steps", "2000",
        "--format", "svg", "--out", out,
    ];
    let o = epme(&args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["classification"], "NonDissipativeCatenary");
    assert!(report["max_residual_catenary"].as_f64().unwrap() < 1e-8);
    assert_eq!(report["integrator"]["steps"], 2000);
    let csv = std::fs::read_to_string(dir.path().join("solution.csv")).unwrap();
    assert!(csv.starts_with("t,w1,w2,w3,w4,w5,w6,A,u,delta\n"));
    assert_eq!(csv.lines().count(), 2002);
    let svg = std::fs::read_to_string(dir.path().join("plot.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
    let first = std::fs::read(dir.path().join("solution.csv")).unwrap();
    assert_eq!(code(&epme(&args)), 0);
    assert_eq!(first, std::fs::read(dir.path().join("solution.csv")).unwrap());
}

#[test]
fn dissipation_fixtures() {
    let class = |path: &str| json(&epme(&["dissipation", "--path", path]))["classification"].as_str().unwrap().to_string();
    assert_eq!(class("perturbed"), "Dissipative");
    assert_eq!(class("radial"), "NonDissipativeLine");
    assert_eq!(class("exp5"), "NonDissipativeCatenary");
    let d = json(&epme(&["dissipation", "--path", "perturbed"]))["D"].as_f64().unwrap();
    assert!(d > 1e-3);
}

fn write_csv(dir: &Path, name: &str, rows: &[String]) -> String {
    let p = dir.join(name);
    std::fs::write(&p, format!("t,u1,u2,u3,v1,v2,v3\n{}\n", rows.join("\n"))).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn trajectory_file_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_csv(dir.path(), "bad.csv", &["0,1,1,1,1,1,1".into(), "0.5,1,1,1,oops,1,1".into()]);
    let o = epme(&["simulate", "--path", &bad]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let rows: Vec<String> = (0..=20)
        .map(|i| {
            let t = i as f64 / 10.0;
            format!("{t},{},1,1,1,1,1", 1.0 - t)
        })
        .collect();
    let crossing = write_csv(dir.path(), "cross.csv", &rows);
    let out = dir.path().join("out");
    let o = epme(&["simulate", "--path", &crossing, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    assert!(stderr(&o).contains("u1"));
    assert!(!out.join("solution.csv").exists());
}

#[test]
fn section_at_all_ones() {
    let o = epme(&["section", "--u", "1,1,1", "--v", "1,1,1", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let row = &json(&o)["rows"][0];
    assert!((row["det_e"].as_f64().unwrap() + 64.0).abs() < 1e-9);
}
