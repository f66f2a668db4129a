//! Log-log slope fits and verdicts.

use serde::{Deserialize, Serialize};

pub const DEFAULT_THRESHOLD: f64 = 0.15;

/// Least-squares slope of `ln value` against `ln q`; needs three or more
/// points with positive values.
pub fn fit_slope(qs: &[f64], values: &[f64]) -> Option<f64> {
    if qs.len() != values.len() || qs.len() < 3 {
        return None;
    }
    if values.iter().chain(qs).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return None;
    }
    let xs: Vec<f64> = qs.iter().map(|q| q.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Stable,
    Growing,
    Decaying,
    ExactPass,
    ExactFail,
    Agree,
    Disagree,
    ReportOnly,
    Measured,
}

impl Verdict {
    pub fn tag(self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::Growing => "growing",
            Verdict::Decaying => "decaying",
            Verdict::ExactPass => "exact-pass",
            Verdict::ExactFail => "exact-fail",
            Verdict::Agree => "agree",
            Verdict::Disagree => "disagree",
            Verdict::ReportOnly => "report-only",
            Verdict::Measured => "measured",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        [
            Verdict::Stable,
            Verdict::Growing,
            Verdict::Decaying,
            Verdict::ExactPass,
            Verdict::ExactFail,
            Verdict::Agree,
            Verdict::Disagree,
            Verdict::ReportOnly,
            Verdict::Measured,
        ]
        .into_iter()
        .find(|v| v.tag() == tag)
    }

    /// Whether a summary row with this verdict counts as a failure.
    pub fn is_failure(self) -> bool {
        matches!(
            self,
            Verdict::Growing | Verdict::Decaying | Verdict::ExactFail | Verdict::Disagree
        )
    }
}

pub fn slope_verdict(slope: f64, threshold: f64) -> Verdict {
    if slope.abs() <= threshold {
        Verdict::Stable
    } else if slope > 0.0 {
        Verdict::Growing
    } else {
        Verdict::Decaying
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_power_law() {
        let qs = [3.0, 5.0, 7.0, 9.0];
        let vals: Vec<f64> = qs.iter().map(|q: &f64| 2.0 * q.powf(0.5)).collect();
        assert!((fit_slope(&qs, &vals).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(fit_slope(&qs[..2], &vals[..2]), None);
        assert_eq!(fit_slope(&qs[..3], &[1.0, 0.0, 1.0]), None);
    }

    #[test]
    fn verdicts() {
        assert_eq!(slope_verdict(0.1, 0.15), Verdict::Stable);
        assert_eq!(slope_verdict(0.2, 0.15), Verdict::Growing);
        assert_eq!(slope_verdict(-0.2, 0.15), Verdict::Decaying);
        assert_eq!(Verdict::from_tag("exact-pass"), Some(Verdict::ExactPass));
    }
}
