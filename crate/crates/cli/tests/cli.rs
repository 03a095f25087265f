use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn slopekit(dir: &Path, args: &[&str]) -> i32 {
    let out = Command::new(env!("CARGO_BIN_EXE_slopekit"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("binary runs");
    out.status.code().expect("exit code")
}

fn config(dir: &Path, body: &str) -> String {
    let p = dir.join("config.json");
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn lattice_audit_on_200_random_lattices_passes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(slopekit(dir.path(), &["lattice-audit", "--count", "200", "--seed", "11", "--no-timestamp"]), 0);
    let j = read_json(&dir.path().join("audit.json"));
    assert_eq!(j["summary"]["instances"], 200);
    assert_eq!(j["summary"]["fail"], 0);
    assert_eq!(j["summary"]["pass"], 7 * 200);
}

#[test]
fn fujita_table_on_two_sided_model() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), r#"{"model":{"kind":"two_sided","a":"1","b":"-1"}}"#);
    assert_eq!(slopekit(dir.path(), &["fujita", "--config", &cfg, "--p", "2,4,8", "--degrees", "100,200,400"]), 0);
    let csv = std::fs::read_to_string(dir.path().join("fujita.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 3);
    for r in rows {
        let v: f64 = r.split(',').nth(2).unwrap().parse().unwrap();
        assert!((v - 0.5).abs() <= 0.03 * 0.5, "{r}");
    }
}

#[test]
fn trace_distances_decrease() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), r#"{"model":{"kind":"weighted_p1","lambda":"1"}}"#);
    assert_eq!(slopekit(dir.path(), &["trace", "--config", &cfg, "--degrees", "50,100,200,400"]), 0);
    let csv = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(
        lines.next().unwrap(),
        "n,rank,h0,h0_normalized,lambda_max_over_n,cdf_distance_to_reference"
    );
    let d: Vec<f64> = lines.map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(d.len(), 4);
    assert!(d.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn outputs_are_byte_identical_without_timestamp() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        let cfg = config(dir, r#"{"model":{"kind":"weighted_p1","lambda":"1/2"}}"#);
        assert_eq!(slopekit(dir, &["trace", "--config", &cfg, "--degrees", "100,200,400", "--no-timestamp"]), 0);
        assert_eq!(slopekit(dir, &["metric-compare", "--config", &cfg, "--seed", "4", "--no-timestamp"]), 0);
        assert_eq!(slopekit(dir, &["lattice-audit", "--count", "5", "--no-timestamp"]), 0);
    }
    for f in ["trace.csv", "trace.json", "metric.json", "audit.json"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // a decreasing test function breaks the domination: audit failure
    let cfg = config(
        d,
        r#"{"model":{"kind":"weighted_p1","lambda":"1"},"count":5,
            "phi":{"knots":[["0","0"]],"left_slope":"-1","right_slope":"-1"}}"#,
    );
    assert_eq!(slopekit(d, &["metric-compare", "--config", &cfg]), 1);
    assert_eq!(read_json(&d.join("failure.json"))["exit_code"], 1);
    // tolerance failure
    let cfg = config(d, r#"{"model":{"kind":"weighted_p1","lambda":"1"}}"#);
    assert_eq!(slopekit(d, &["trace", "--config", &cfg, "--degrees", "10,20", "--tol-vol", "0.0001"]), 2);
    // budget exhaustion
    assert_eq!(slopekit(d, &["lattice-audit", "--budget-nodes", "1", "--seed", "3"]), 3);
    // config errors
    assert_eq!(slopekit(d, &["trace", "--config", &cfg]), 4);
    assert_eq!(slopekit(d, &["--config", "/nonexistent/config.json"]), 4);
    let bad = config(d, r#"{"model":{"kind":"random_lattice","rank":3,"bound":5}}"#);
    assert_eq!(slopekit(d, &["lattice-audit", "--config", &bad]), 4);
}

#[test]
fn measure_and_truncation_commands() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cfg = config(
        d,
        r#"{"filtration":{"dim":2,"flag":[{"t":"1","basis":[["1","0"],["0","1"]]},{"t":"3","basis":[["1","0"]]}]}}"#,
    );
    assert_eq!(slopekit(d, &["measure", "--config", &cfg, "--no-timestamp"]), 0);
    assert_eq!(std::fs::read_to_string(d.join("measure.csv")).unwrap(), "x,w,cdf\n1,1/2,1/2\n3,1/2,1\n");
    let cfg = config(d, r#"{"model":{"kind":"two_sided","a":"1","b":"-1"},"xs":["-1/2",0,"1/2"]}"#);
    assert_eq!(slopekit(d, &["truncation", "--config", &cfg, "--degrees", "1,2,3,50", "--p", "2,3"]), 0);
    let j = read_json(&d.join("truncation.json"));
    assert_eq!(j["subseries"].as_array().unwrap().len(), 3);
}
