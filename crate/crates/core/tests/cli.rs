//! End-to-end runs of the `laxflow` binary.

use std::io::Write;
use std::process::{Command, Output, Stdio};

use laxflow::fixtures::{f3, f4};
use laxflow::sov::Divisor;
use laxflow::spectral::SpectralCurve;
use laxflow::{Node, Poly, PolyMatrix};

fn laxflow(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_laxflow"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn sample_emits_slice_member() {
    let o = laxflow(&["sample", "-r", "2", "-d", "2", "--slice", "s-infinity", "--seed", "3"], None);
    assert_eq!(o.status.code(), Some(0));
    let a = PolyMatrix::from_json(&stdout(&o)).unwrap();
    assert_eq!((a.r(), a.d()), (2, 2));
    assert!(a.in_slice(Node::Infinity, 1e-12));

    let o = laxflow(&["sample", "-r", "3", "-d", "2", "--slice", "s-c", "--at", "1-2i", "--seed", "1"], None);
    let a = PolyMatrix::from_json(&stdout(&o)).unwrap();
    assert!(a.in_slice(Node::finite(1.0, -2.0), 1e-12));
}

#[test]
fn curve_of_f3() {
    let o = laxflow(&["curve"], Some(&f3().to_json()));
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["report"]["genus"], 1);
    let curve = SpectralCurve::from_json(&v["curve"].to_string()).unwrap();
    assert!(curve.s(1).approx_eq(&Poly::from_real(&[-2.0]), 1e-14));
    assert!(curve.s(2).approx_eq(&Poly::from_real(&[0.0, -1.0, 0.0, 0.0, -1.0]), 1e-14));
}

#[test]
fn normalform_and_theta_from_file() {
    let dir = std::env::temp_dir().join(format!("laxflow-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("f4.json");
    std::fs::write(&file, f4().to_json()).unwrap();
    let file = file.to_str().unwrap();

    let o = laxflow(&["normalform", "--at", "1", file], None);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let s = PolyMatrix::from_json(&v["slice_member"].to_string()).unwrap();
    assert!(s.in_slice(Node::finite(1.0, 0.0), 1e-9));
    assert_eq!(v["gauge"]["b"].as_array().unwrap().len(), 2);

    let o = laxflow(&["theta", "--at", "inf", file], None);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["outside_theta"], serde_json::json!([true, true, true]));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn sov_of_f3() {
    let o = laxflow(&["sov"], Some(&f3().to_json()));
    assert_eq!(o.status.code(), Some(0));
    let div = Divisor::from_json(&stdout(&o)).unwrap();
    assert_eq!(div.len(), 1);
    let (x, y) = div.points[0];
    assert!(x.norm() < 1e-12 && (y.re - 2.0).abs() < 1e-12);
}

#[test]
fn flow_exports_json_and_csv() {
    let args = ["flow", "--field", "projected", "--a", "1", "--t", "0.1", "--dt", "1e-2"];
    let o = laxflow(&args, Some(&f3().to_json()));
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["samples"].as_array().unwrap().len(), 11);
    assert_eq!(v["field"]["kind"], "projected");

    let mut csv_args = args.to_vec();
    csv_args.extend(["--csv", "--stride", "5"]);
    let o = laxflow(&csv_args, Some(&f3().to_json()));
    let text = stdout(&o);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 12);
    assert!(lines[0].starts_with("t,drift,c0_re,c0_im"));
    assert!(lines[2].ends_with(",,"));
}

#[test]
fn flow_off_slice_fails_with_exit_one() {
    let o = laxflow(&["flow", "--field", "projected"], Some(&PolyMatrix::random(2, 2, 0, laxflow::SampleSlice::Full).unwrap().to_json()));
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("slice"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(laxflow(&["bogus"], None).status.code(), Some(2));
    assert_eq!(laxflow(&["theta"], None).status.code(), Some(2));
    assert_eq!(laxflow(&["sample", "-r", "2", "-d", "2", "--slice", "diagonal"], None).status.code(), Some(2));
    assert_eq!(laxflow(&["curve"], Some("{not json")).status.code(), Some(2));
    assert_eq!(laxflow(&["verify", "--suite", "nope"], None).status.code(), Some(2));
}

#[test]
fn verify_report_is_deterministic() {
    let run = || laxflow(&["verify", "--suite", "gauge", "--seed", "42"], None);
    let (a, b) = (run(), run());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    let names: Vec<_> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap().to_string()).collect();
    assert_eq!(names, ["05-gauge-covariance-of-d", "06-normal-form", "13-chart-covering", "14-theta-test"]);
    assert!(v["checks"][0].get("wall_time_s").is_none());
    assert_eq!(String::from_utf8_lossy(&a.stderr).lines().count(), 4);
}

#[test]
fn verify_suites_compose() {
    let o = laxflow(&["verify", "--suite", "sov", "--seed", "42", "--timings"], None);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let names: Vec<_> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"11-closed-form-cross-checks"));
    assert!(v["checks"][0]["wall_time_s"].is_number());

    let o = laxflow(&["verify", "--suite", "flows", "--seed", "42"], None);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let names: Vec<_> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["02-spectral-conservation", "03-field-commutativity", "04-quotient-vanishing-and-dimension"]);
    let failed = v["failed"].as_u64().unwrap();
    assert_eq!(o.status.code(), Some(if failed == 0 { 0 } else { 1 }));
}

#[test]
fn verify_reads_config_file() {
    let dir = std::env::temp_dir().join(format!("laxflow-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("tight.toml");
    std::fs::write(&cfg, "[tolerances]\nnu_independence = 1e-30\n").unwrap();
    let o = laxflow(&["verify", "--suite", "sov", "--config", cfg.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["tolerances"]["nu_independence"], 1e-30);

    std::fs::write(&cfg, "[tolerances]\nunknown = 1\n").unwrap();
    let o = laxflow(&["verify", "--suite", "sov", "--config", cfg.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    std::fs::remove_dir_all(dir).unwrap();
}
