use std::fs;
use std::process::{Command, Output};

use conelab::report::{Report, CSV_HEADER};

fn conelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conelab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn verify_prints_csv_and_exits_zero() {
    let out = conelab(&["verify", "--check", "plancherel", "--d", "3", "--qs", "3,5,9"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    assert_eq!(lines.count(), 4);
}

#[test]
fn verify_single_field_from_p_and_e() {
    let out = conelab(&["verify", "--check", "cone-reconstruction", "--p", "3", "--e", "2", "--d", "3"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("cone-reconstruction,3,2,3,9,"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&conelab(&["verify", "--check", "bogus", "--d", "4"])), 2);
    assert_eq!(code(&conelab(&["verify", "--check", "kernel-decay", "--d", "5"])), 2);
    assert_eq!(code(&conelab(&["verify", "--check", "plancherel", "--d", "4", "--qs", "4"])), 2);
    assert_eq!(code(&conelab(&["subspace", "--p", "4", "--d", "4"])), 2);
    assert_eq!(code(&conelab(&["frobnicate"])), 2);
}

#[test]
fn failing_verdict_exits_one() {
    // the regularity decay ratio fit misses its target at these small orders
    let out = conelab(&["verify", "--check", "cone-regularity", "--d", "4", "--qs", "3,5,7,9"]);
    assert_eq!(code(&out), 1);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("disagree"));
}

#[test]
fn json_output_round_trips_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = conelab(&[
            "verify", "--check", "adjoint-l2-split", "--d", "4", "--qs", "5,9,13", "--seed", "3",
            "--format", "json", "--out", path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
    }
    let bytes = fs::read(&a).unwrap();
    assert_eq!(bytes, fs::read(&b).unwrap());
    let report = Report::read_json(&bytes[..]).unwrap();
    assert_eq!(report.metadata.seed, 3);
    assert_eq!(report.metadata.fields.len(), 3);
    assert_eq!(report.metadata.fields[1].modulus, vec![1, 0, 1]);
    assert_eq!(report.rows.len(), 4);
}

#[test]
fn scan_from_config_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scan.cfg");
    let file_out = dir.path().join("from-file.csv");
    let flag_out = dir.path().join("from-flag.json");
    fs::write(
        &cfg,
        format!(
            "# odd dimension\nd = 3\nqs = 3, 5, 7\npairs = P0; 1/1:1/2\nout = {}\nformat = csv\n",
            file_out.display()
        ),
    )
    .unwrap();
    let out = conelab(&["scan", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(&file_out).unwrap();
    assert!(csv.starts_with(CSV_HEADER));
    let out = conelab(&[
        "scan", "--config", cfg.to_str().unwrap(), "--out", flag_out.to_str().unwrap(), "--format", "json",
    ]);
    assert_eq!(code(&out), 0);
    let report = Report::read_json(&fs::read(&flag_out).unwrap()[..]).unwrap();
    assert_eq!(report.rows.iter().filter(|r| r.is_summary()).count(), 2);
}

#[test]
fn bad_scan_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "d = 4\nqs = 3, 5\n").unwrap();
    // q = 3 and q = 5 fall in different hull cases
    assert_eq!(code(&conelab(&["scan", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn subspace_reports_json() {
    let out = conelab(&["subspace", "--p", "3", "--d", "4"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["eta_minus_one"], -1);
    assert_eq!(v["predicted_max_dim"], 1);
    assert_eq!(v["found_dim"], 1);
    assert_eq!(v["exhaustive"], true);
    let out = conelab(&["subspace", "--p", "3", "--d", "6"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["found_dim"], 3);
    assert_eq!(v["basis"].as_array().unwrap().len(), 3);
}

#[test]
fn opnorm_agrees_with_dense() {
    let out = conelab(&["opnorm", "--p", "3", "--d", "4"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let power = v["power_iteration"].as_f64().unwrap();
    let dense = v["dense"].as_f64().unwrap();
    assert!((power - dense).abs() < 1e-6 * dense);
}
