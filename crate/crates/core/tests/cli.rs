use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mixedvol::bodies::{self, ConvexPolytope};
use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mixedvol")).args(args).output().unwrap()
}

fn scratch(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("mixedvol-cli-it-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn save(dir: &Path, name: &str, p: &ConvexPolytope) -> String {
    let path = dir.join(name);
    std::fs::write(&path, p.to_json()).unwrap();
    path.to_string_lossy().into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn check_linhart_on_segment() {
    let d = scratch("lin");
    let k = save(&d, "k.json", &bodies::segment(&mixedvol::Direction::axis(3, 1), 4.0).unwrap());
    let o = bin(&["check", "linhart", "--k", &k]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["result"]["satisfied"], true);
    assert_eq!(v["result"]["deficit"].as_f64(), Some(0.0));
    assert_eq!(v["config"]["tolerance"].as_f64(), Some(1e-9));
}

#[test]
fn isosceles_sweep_csv() {
    let o = bin(&["--format", "csv", "sweep", "isosceles", "--grid", "0.02:0.3:15"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# config "));
    assert!(lines[1].starts_with("family,index,param,eps"));
    assert_eq!(lines.len(), 2 + 15 + 1);
    let summary = lines.last().unwrap();
    assert!(summary.starts_with("isosceles,summary"));
    let slope: f64 = summary
        .split(['=', ';', ','])
        .skip_while(|s| *s != "tube_vs_eps")
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((slope - 0.5).abs() <= 0.05, "{slope}");
}

#[test]
fn constants_tau() {
    let o = bin(&["constants", "--dim", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let tau = v["result"]["tau"].as_f64().unwrap();
    assert!((tau - (std::f64::consts::PI / 12.0).sin()).abs() < 1e-10);
    assert_eq!(v["result"]["f_table"].as_array().unwrap().len(), 200);
    assert_eq!(v["result"]["n"], 3);
}

#[test]
fn compute_report() {
    let d = scratch("compute");
    let k = save(&d, "cube.json", &bodies::box_body(&[1.0, 1.0, 1.0]).unwrap());
    let o = bin(&["compute", "--body", &k, "--functionals", "vol,v1,r"]);
    assert_eq!(o.status.code(), Some(0));
    let r = &json(&o)["result"];
    assert_eq!(r["volume"].as_f64(), Some(1.0));
    assert!((r["v1"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    assert!(r.get("diameter").is_none());
    assert_eq!(r["method_tags"]["v1"], "exact");
}

#[test]
fn mixed_with_oracle() {
    let d = scratch("mixed");
    let k = save(&d, "k.json", &bodies::random_polytope(3, 8, 1).unwrap());
    let m = save(&d, "m.json", &bodies::random_polytope(3, 9, 2).unwrap());
    let o = bin(&["mixed", "--k", &k, "--m", &m, "--oracle"]);
    assert_eq!(o.status.code(), Some(0));
    let r = &json(&o)["result"];
    assert!(r["oracle"]["rel_err"].as_f64().unwrap() <= 1e-7);
}

#[test]
fn exit_codes() {
    // unreadable input
    let o = bin(&["compute", "--body", "/no/such/file.json"]);
    assert_eq!(o.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(err["error"].is_string() && err["message"].is_string());
    // malformed body
    let d = scratch("exit");
    let bad = d.join("bad.json");
    std::fs::write(&bad, "{\"dim\": 2, \"vertices\": [[0, 0, 0]]}").unwrap();
    let o = bin(&["compute", "--body", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    // bad flag
    assert_eq!(bin(&["sweep", "nonsense", "--grid", "1:2:3"]).status.code(), Some(1));
    assert_eq!(bin(&["--tolerance", "-1", "constants", "--dim", "3"]).status.code(), Some(1));
    // a sweep whose large instances leave the certified range reports failure
    let o = bin(&["sweep", "thin-box", "--grid", "0.01:0.2:4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sphere_profile_csv() {
    let o = bin(&["--format", "csv", "sphere-profile", "--dim", "4", "--alpha-steps", "25"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 25);
    assert!(rows.windows(2).all(|w| w[0][1] > w[1][1]));
}

#[test]
fn same_seed_same_bytes() {
    let d = scratch("det");
    let k = save(&d, "k.json", &bodies::random_polytope(3, 10, 4).unwrap());
    let a = bin(&["--seed", "3", "oracle", "--body", &k]);
    let b = bin(&["--seed", "3", "oracle", "--body", &k]);
    assert_eq!(a.stdout, b.stdout);
    let c = bin(&["--seed", "4", "oracle", "--body", &k]);
    assert_ne!(a.stdout, c.stdout);
}
