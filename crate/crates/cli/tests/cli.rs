use std::path::Path;
use std::process::{Command, Output};
use std::sync::Arc;

use crossed_ell1::io;
use crossed_ell1::reps::{aperiodic_apply, SeqVector};
use crossed_ell1::{AlgebraElement, Point, C64};
use serde_json::Value;
use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crossed-ell1"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn setup() -> TempDir {
    let dir = TempDir::new().unwrap();
    let files = [
        ("S.json", r#"{"backend":"finite_perm","n":5,"cycles":[[0,1,2],[3,4]]}"#),
        ("one_point.json", r#"{"backend":"finite_perm","perm":[0]}"#),
        ("aper.json", r#"{"backend":"aperiodic_orbit","window":64}"#),
        ("dplusdstar.json", r#"{"coeffs":{"1":{"table":[1]},"-1":{"table":[1]}}}"#),
        ("rho.json", r#"{"0":1,"1":[0.5,0.25],"-2":0.75,"4":[0,-0.5]}"#),
        ("tau.json", r#"{"3":1,"-1":[0,2],"0":"1/3"}"#),
        ("a.json", r#"{"coeffs":{"0":{"table":[1,0,0,0,0]},"2":{"table":[0,0,0,"1/2",[0,1]]}}}"#),
    ];
    for (name, text) in files {
        std::fs::write(dir.path().join(name), text).unwrap();
    }
    dir
}

#[test]
fn orbits_of_two_cycles() {
    let dir = setup();
    let v = stdout_json(&run(dir.path(), &["orbits", "--system", "S.json"]));
    assert_eq!(v, serde_json::json!([[0, 1, 2], [3, 4]]));
}

#[test]
fn solve_output_reapplies_to_tau() {
    let dir = setup();
    let v = stdout_json(&run(
        dir.path(),
        &["solve", "--system", "aper.json", "--x", "0", "--rho", "rho.json", "--tau", "tau.json", "--gamma", "0.5"],
    ));
    let sys = Arc::new(io::parse_system(r#"{"backend":"aperiodic_orbit","window":64}"#).unwrap());
    let a: AlgebraElement<C64> = io::element_from_json(&sys, &v["element"]).unwrap();
    let rho: SeqVector<C64> = io::seq_vector_from_json(&io::parse_json(r#"{"0":1,"1":[0.5,0.25],"-2":0.75,"4":[0,-0.5]}"#).unwrap()).unwrap();
    let tau: SeqVector<C64> = io::seq_vector_from_json(&io::parse_json(r#"{"3":1,"-1":[0,2],"0":"1/3"}"#).unwrap()).unwrap();
    let got = aperiodic_apply(&Point::Orbit(0), &a, &rho).unwrap();
    assert!(got.sub(&tau).norm(crossed_ell1::reps::LpOrder::P(1)) < 1e-12);
    assert!(v["residuals"].as_array().unwrap().iter().all(|r| r.as_f64().unwrap() < 1e-12));
}

#[test]
fn exact_solve_has_zero_residual() {
    let dir = setup();
    let v = stdout_json(&run(
        dir.path(),
        &["solve", "--system", "aper.json", "--x", "0", "--rho", "rho.json", "--tau", "tau.json", "--exact"],
    ));
    assert_eq!(v["residuals"], serde_json::json!([0.0]));
    assert!(v["epsilon"].as_f64().unwrap() <= 0.01);
}

#[test]
fn spectrum_of_delta_plus_adjoint_is_two_cos() {
    let dir = setup();
    let v = stdout_json(&run(
        dir.path(),
        &["spectrum", "--system", "one_point.json", "--element", "dplusdstar.json", "--samples", "256"],
    ));
    let got: Vec<f64> = v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(got.len(), 256);
    let mut expected: Vec<f64> = (0..256)
        .map(|k| 2.0 * (2.0 * std::f64::consts::PI * k as f64 / 256.0).cos())
        .collect();
    expected.sort_by(f64::total_cmp);
    for (g, e) in got.iter().zip(&expected) {
        assert!((-2.0..=2.0).contains(g));
        assert!((g - e).abs() < 1e-9, "{g} vs {e}");
    }
}

#[test]
fn ideal_membership_and_witness() {
    let dir = setup();
    let member = stdout_json(&run(
        dir.path(),
        &["ideal-member", "--system", "S.json", "--ideal", r#"{"orbit_of":3,"lambda":[0,1]}"#, "--element", "a.json", "--exact"],
    ));
    // a vanishes on the orbit {3, 4} only through its δ² strand, which is
    // nonzero there.
    assert_eq!(member, Value::Bool(false));
    let w = stdout_json(&run(dir.path(), &["radical-witness", "--system", "S.json", "--element", "a.json", "--exact"]));
    assert!(w.get("orbit_of").is_some());
    let incl = stdout_json(&run(
        dir.path(),
        &[
            "inclusion",
            "--system",
            "S.json",
            "--ideal1",
            r#"{"closure":[3,4]}"#,
            "--ideal2",
            r#"{"orbit_of":3,"lambda":[0,1]}"#,
        ],
    ));
    assert_eq!(incl, Value::Bool(true));
}

#[test]
fn exact_rep_matrix_round_trips() {
    let dir = setup();
    let v = stdout_json(&run(
        dir.path(),
        &["rep-matrix", "--system", "S.json", "--x", "3", "--lambda", "3/5,4/5", "--element", "a.json", "--exact"],
    ));
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    let reparsed: Value = rows
        .iter()
        .map(|row| {
            row.as_array()
                .unwrap()
                .iter()
                .map(|z| io::scalar_to_json(&io::scalar_from_json::<crossed_ell1::GaussianRational>(z).unwrap()))
                .collect::<Value>()
        })
        .collect();
    assert_eq!(reparsed, v);
    // π(a) on the orbit {3, 4}: a vanishes at 3 and 4 in degree 0, and δ²
    // acts as λ on each basis vector.
    assert_eq!(v[0][0], serde_json::json!(["3/10", "2/5"]));
}

#[test]
fn witness_and_structure() {
    let dir = setup();
    let w = stdout_json(&run(dir.path(), &["witness", "--arc", "0.25,0.75", "--lambda0", "0", "--tol", "1e-3"]));
    assert!(w["sup_on_forbidden"].as_f64().unwrap() <= 1e-3);
    assert!(w["order"].as_u64().unwrap() <= 2000);
    let s = stdout_json(&run(dir.path(), &["structure", "--system", "S.json"]));
    assert_eq!(s["components"], 2);
    let t = stdout_json(&run(
        dir.path(),
        &["structure", "--system", r#"{"backend":"rational_rotation","p":1,"q":3}"#],
    ));
    assert_eq!(t["description"], "T × T");
}

#[test]
fn closure_is_idempotent_through_the_cli() {
    let dir = setup();
    let set = r#"{"orbits":{"0":{"arcs":[[0.9,0.1]]},"1":{"points":[0.5]}}}"#;
    let once = stdout_json(&run(dir.path(), &["closure", "--system", "S.json", "--set", set]));
    let twice = stdout_json(&run(dir.path(), &["closure", "--system", "S.json", "--set", &once.to_string()]));
    assert_eq!(once, twice);
    let cert = stdout_json(&run(
        dir.path(),
        &["closure", "--system", "S.json", "--set", set, "--certify", "--grid", "4"],
    ));
    assert!(!cert["certificates"].as_array().unwrap().is_empty());
}

#[test]
fn validate_reports_line_numbers() {
    let dir = setup();
    std::fs::write(dir.path().join("good.json"), "{\"backend\":\"finite_perm\",\"perm\":[1,0]}").unwrap();
    std::fs::write(dir.path().join("bad.json"), "{\n  \"backend\": \"finite_perm\",\n  \"perm\": [1, 1]\n}").unwrap();
    std::fs::write(dir.path().join("ideal.json"), "{\n  \"orbit_of\": 3,\n  \"lambda\": [0.5, 0]\n}").unwrap();
    assert_eq!(stdout_json(&run(dir.path(), &["validate", "good.json"])), serde_json::json!([]));
    let bad = stdout_json(&run(dir.path(), &["validate", "bad.json"]));
    assert_eq!(bad[0]["line"], 3);
    assert!(bad[0]["message"].as_str().unwrap().contains("not a bijection"));
    let ideal = stdout_json(&run(dir.path(), &["validate", "ideal.json"]));
    assert_eq!(ideal[0]["line"], 3);
    assert!(ideal[0]["message"].as_str().unwrap().contains("is not 1"));
}

#[test]
fn exit_codes_and_error_json() {
    let dir = setup();
    let missing = run(dir.path(), &["orbits", "--system", "missing.json"]);
    assert_eq!(missing.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&missing.stderr).unwrap();
    assert_eq!(err["error"], "parse_error");

    let domain = run(dir.path(), &["rep-matrix", "--system", "S.json", "--x", "3", "--lambda", "2,0", "--element", "a.json"]);
    assert_eq!(domain.status.code(), Some(3));

    let tol = run(
        dir.path(),
        &[
            "solve", "--system", "aper.json", "--x", "0", "--rho", "rho.json", "--tau", "tau.json", "--n1-cap", "0", "--n2-cap", "0",
        ],
    );
    assert_eq!(tol.status.code(), Some(4));
    let err: Value = serde_json::from_slice(&tol.stderr).unwrap();
    assert_eq!(err["error"], "tolerance_not_met");
}

#[test]
fn output_is_deterministic_and_can_go_to_a_file() {
    let dir = setup();
    let args = ["solve", "--system", "aper.json", "--x", "0", "--rho", "rho.json", "--tau", "tau.json", "--minimal", "--gamma", "0.3"];
    let a = run(dir.path(), &args);
    let b = run(dir.path(), &args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let out = run(dir.path(), &["orbits", "--system", "S.json", "--output", "orbits.json"]);
    assert!(out.status.success() && out.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("orbits.json")).unwrap();
    assert_eq!(text.trim(), "[[0,1,2],[3,4]]");
}

#[test]
fn solved_element_round_trips_through_json() {
    let dir = setup();
    let v = stdout_json(&run(
        dir.path(),
        &["solve", "--system", "aper.json", "--x", "0", "--rho", "rho.json", "--tau", "tau.json", "--minimal"],
    ));
    let sys = Arc::new(io::parse_system(r#"{"backend":"aperiodic_orbit","window":64}"#).unwrap());
    let a: AlgebraElement<C64> = io::element_from_json(&sys, &v["element"]).unwrap();
    assert_eq!(io::element_to_json(&a), v["element"]);
}
