use conelab::checks::{self, measure_instances, verify, VerifyOptions};
use conelab::report::{Metadata, Report, ReportRow, CSV_HEADER, REPORT_VERSION};
use conelab::scan::{run_scan, Mode, PairSpec, ScanConfig};
use conelab::LabError;
use conelab_core::ExponentPair;

fn opts() -> VerifyOptions {
    VerifyOptions::default()
}

fn summaries(rows: &[ReportRow]) -> Vec<&ReportRow> {
    rows.iter().filter(|r| r.is_summary()).collect()
}

#[test]
fn rejects_unknown_and_mismatched_checks() {
    assert!(matches!(
        verify("no-such-check", 4, None, &opts()),
        Err(LabError::UnknownCheck(_))
    ));
    assert!(matches!(
        verify("kernel-decay", 5, Some(&[3]), &opts()),
        Err(LabError::ParityMismatch { d: 5, .. })
    ));
    assert!(matches!(
        verify("forward-mid-norm", 4, Some(&[3]), &opts()),
        Err(LabError::DimensionMismatch { .. })
    ));
    assert!(matches!(
        verify("adjoint-mid-norm-d4", 6, Some(&[3]), &opts()),
        Err(LabError::DimensionMismatch { .. })
    ));
    assert!(verify("plancherel", 4, Some(&[6]), &opts()).is_err());
}

#[test]
fn checks_for_respects_parity() {
    let odd = checks::checks_for(3);
    assert!(odd.contains(&"plancherel"));
    assert!(!odd.contains(&"kernel-decay"));
    let four = checks::checks_for(4);
    assert!(four.contains(&"adjoint-mid-norm-d4"));
    assert!(!four.contains(&"forward-mid-norm"));
    let six = checks::checks_for(6);
    assert!(six.contains(&"adjoint-mid-norm"));
    assert!(!six.contains(&"adjoint-mid-norm-d4"));
}

#[test]
fn extension_identity_example() {
    let rows = verify("extension-identity", 4, Some(&[3, 5, 7]), &opts()).unwrap();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert_eq!(r.verdict, "exact-pass");
        assert!(r.constant.unwrap() <= 1e-10);
    }
    assert!(rows[3].is_summary());
}

#[test]
fn kernel_decay_example_matches_closed_form() {
    let qs = [3u32, 5, 7, 9];
    let rows = verify("kernel-decay", 4, Some(&qs), &opts()).unwrap();
    let zero = summaries(&rows)
        .into_iter()
        .find(|r| r.check_id == "kernel-decay:gamma-zero")
        .unwrap();
    assert_eq!(zero.verdict, "stable", "{zero:?}");
    // off the dual cone q^2 |K| = 1 / (1 + eta(-1) (q - 1) / q^2) exactly
    let oracle: Vec<f64> = qs
        .iter()
        .map(|&q| {
            let q = q as f64;
            let eta = if q as u32 % 4 == 1 { 1.0 } else { -1.0 };
            1.0 / (1.0 + eta * (q - 1.0) / (q * q))
        })
        .collect();
    let nonzero: Vec<&ReportRow> = rows
        .iter()
        .filter(|r| r.check_id == "kernel-decay:gamma-nonzero")
        .collect();
    for (r, want) in nonzero.iter().zip(&oracle) {
        assert!((r.constant.unwrap() - want).abs() < 1e-9, "{r:?} vs {want}");
    }
    let lq: Vec<f64> = qs.iter().map(|&q| (q as f64).ln()).collect();
    let lv: Vec<f64> = oracle.iter().map(|v| v.ln()).collect();
    let (mx, my) = (lq.iter().sum::<f64>() / 4.0, lv.iter().sum::<f64>() / 4.0);
    let num: f64 = lq.iter().zip(&lv).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lq.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = num / den;
    let s = nonzero.last().unwrap();
    assert!(s.is_summary());
    assert!((s.slope.unwrap() - slope).abs() < 1e-9);
    // the eta(-1) alternation tips this four-point fit past the threshold
    assert_eq!(s.verdict, "decaying");
}

#[test]
fn endpoint_p1_example_d6() {
    let rows = verify("endpoint-p1", 6, Some(&[3, 5]), &opts()).unwrap();
    let s = summaries(&rows);
    assert_eq!(s.len(), 1);
    assert_eq!(s[0].pair_inv_p, "5/6");
    assert_eq!(s[0].pair_inv_r, "1/4");
    assert_eq!(s[0].verdict, "measured", "two points give no slope");
    let rows = verify("endpoint-p1", 6, Some(&[3, 5, 7]), &opts()).unwrap();
    assert_eq!(summaries(&rows)[0].verdict, "stable");
}

#[test]
fn endpoint_p1_is_report_only_in_d4() {
    let rows = verify("endpoint-p1", 4, Some(&[5, 13, 17]), &opts()).unwrap();
    let s = summaries(&rows);
    assert_eq!(s[0].verdict, "report-only");
    assert!(s[0].family.contains("open"));
}

#[test]
fn single_point_dual_energy_oracle() {
    // E = {0}: E^v(m) = q^{-d} everywhere
    let (q, d) = (5u32, 4usize);
    let inst = measure_instances(q, d, 1).unwrap();
    let point = inst.iter().find(|i| i.family == "point").unwrap();
    let qf = q as f64;
    // |C*| for d = 4 matches |C| with the same sign pattern
    let dual_size = qf.powi(3) + (qf * qf - qf);
    let expected = dual_size * qf.powi(-2 * d as i32);
    assert!((point.dual_energy - expected).abs() < 1e-12 * expected.max(1.0));
    assert!(inst.iter().filter(|i| i.in_cone).all(|i| i.fm.is_some()));
    assert!(inst.iter().filter(|i| !i.in_cone).all(|i| i.fm.is_none()));
}

#[test]
fn verify_is_deterministic() {
    let a = verify("forward-sup", 4, Some(&[5, 7, 9]), &opts()).unwrap();
    let b = verify("forward-sup", 4, Some(&[5, 7, 9]), &opts()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn one_row_csv_and_json_round_trip() {
    let mut row = ReportRow::new("plancherel", 4).with_field(3, 1);
    row.constant = Some(1e-16);
    row.verdict = "exact-pass".into();
    let report = Report {
        metadata: Metadata {
            version: REPORT_VERSION.into(),
            seed: 7,
            threshold: 0.15,
            fields: conelab::scan::field_info(&[3]).unwrap(),
            notes: vec![],
        },
        rows: vec![row],
    };
    let mut csv = Vec::new();
    report.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv.clone()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(Report::read_csv_rows(&csv[..]).unwrap(), report.rows);
    let mut json = Vec::new();
    report.write_json(&mut json).unwrap();
    assert_eq!(Report::read_json(&json[..]).unwrap(), report);
}

#[test]
fn scan_origin_pair_has_zero_slope() {
    let mut cfg = ScanConfig::new(4, vec![5, 13, 17]);
    cfg.pairs = PairSpec::List(vec![ExponentPair::from_fractions(0, 1, 0, 1).unwrap()]);
    let report = run_scan(&cfg).unwrap();
    for r in report.rows.iter().filter(|r| !r.is_summary()) {
        assert!((r.ratio.unwrap() - 1.0).abs() < 1e-12);
    }
    let s = report.rows.last().unwrap();
    assert!(s.slope.unwrap().abs() < 1e-12);
    assert_eq!(s.verdict, "agree");
}

#[test]
fn conjecture_mode_reports_only() {
    let cfg = ScanConfig::parse("d = 4\nqs = 3, 7, 11\npairs = P0\nmode = conjecture\n").unwrap();
    assert_eq!(cfg.mode, Mode::Conjecture);
    let report = run_scan(&cfg).unwrap();
    let s: Vec<_> = report.rows.iter().filter(|r| r.is_summary()).collect();
    assert_eq!(s.len(), 1);
    assert_eq!(s[0].verdict, "report-only");
    assert!(!report.has_failure());
}

#[test]
fn adjoint_scan_runs() {
    let cfg = ScanConfig::parse("d = 3\nqs = 3, 5, 7\npairs = P0; 1/1:0/1\ndirection = adjoint\n").unwrap();
    let report = run_scan(&cfg).unwrap();
    let s: Vec<_> = report.rows.iter().filter(|r| r.is_summary()).collect();
    assert_eq!(s.len(), 2);
    assert!(s.iter().all(|r| r.verdict == "agree"), "{s:?}");
}
