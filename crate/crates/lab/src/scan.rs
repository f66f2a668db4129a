//! Exponent scans: operator ratios over a grid of `(1/p, 1/r)` pairs and a
//! list of field orders, classified against the conjectured hull.

use std::path::PathBuf;
use std::str::FromStr;

use conelab_core::families::dyadic_sizes;
use conelab_core::operators::ConeOperator;
use conelab_core::subspace::predicted_max_dim;
use conelab_core::{
    generate_family, Direction, ExponentPair, FamilyMember, FieldSpec, Space, TestFamily,
};
use num_complex::Complex64;
use num_rational::Ratio;

use crate::error::{LabError, LabResult};
use crate::hull::{self, HullCase, Location};
use crate::report::{FieldInfo, Metadata, Report, ReportRow, REPORT_VERSION};
use crate::slope::{fit_slope, Verdict, DEFAULT_THRESHOLD};

/// Exponent used by the `dyadic` family in scans.
pub const SCAN_DYADIC_EXPONENT: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Bounded inside the hull, unbounded outside.
    Sharpness,
    /// Measurements only.
    Conjecture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = LabError;

    fn from_str(s: &str) -> LabResult<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(LabError::Config(format!("unknown format `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PairSpec {
    /// The default grid for the hull case.
    Default,
    List(Vec<ExponentPair>),
}

#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub d: usize,
    pub qs: Vec<u32>,
    pub pairs: PairSpec,
    pub families: Vec<String>,
    pub direction: Direction,
    pub seed: u64,
    pub threshold: f64,
    pub mode: Mode,
    pub out: Option<PathBuf>,
    pub format: Format,
}

pub const DEFAULT_FAMILIES: &[&str] = &["constant", "delta", "subspace", "cone", "random"];

impl ScanConfig {
    pub fn new(d: usize, qs: Vec<u32>) -> Self {
        ScanConfig {
            d,
            qs,
            pairs: PairSpec::Default,
            families: DEFAULT_FAMILIES.iter().map(|s| s.to_string()).collect(),
            direction: Direction::Forward,
            seed: 1,
            threshold: DEFAULT_THRESHOLD,
            mode: Mode::Sharpness,
            out: None,
            format: Format::Csv,
        }
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> LabResult<Self> {
        let mut d = None;
        let mut qs = None;
        let mut pair_text = None;
        let mut cfg = ScanConfig::new(0, Vec::new());
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| LabError::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| LabError::Config(format!("line {}: bad {what} `{value}`", lineno + 1));
            match key {
                "d" => d = Some(value.parse::<usize>().map_err(|_| bad("d"))?),
                "qs" => {
                    qs = Some(
                        split_list(value)
                            .map(|s| s.parse::<u32>().map_err(|_| bad("q")))
                            .collect::<LabResult<Vec<_>>>()?,
                    )
                }
                "pairs" => pair_text = Some(value.to_string()),
                "families" => cfg.families = split_list(value).map(str::to_string).collect(),
                "direction" => {
                    cfg.direction = match value {
                        "forward" => Direction::Forward,
                        "adjoint" => Direction::Adjoint,
                        _ => return Err(bad("direction")),
                    }
                }
                "seed" => cfg.seed = value.parse().map_err(|_| bad("seed"))?,
                "threshold" => {
                    cfg.threshold = value.parse().map_err(|_| bad("threshold"))?;
                    if !(cfg.threshold.is_finite() && cfg.threshold > 0.0) {
                        return Err(bad("threshold"));
                    }
                }
                "mode" => {
                    cfg.mode = match value {
                        "sharpness" => Mode::Sharpness,
                        "conjecture" => Mode::Conjecture,
                        _ => return Err(bad("mode")),
                    }
                }
                "out" => cfg.out = Some(PathBuf::from(value)),
                "format" => cfg.format = value.parse()?,
                _ => return Err(LabError::Config(format!("line {}: unknown key `{key}`", lineno + 1))),
            }
        }
        cfg.d = d.ok_or_else(|| LabError::Config("missing `d`".into()))?;
        cfg.qs = qs.ok_or_else(|| LabError::Config("missing `qs`".into()))?;
        if cfg.qs.is_empty() {
            return Err(LabError::Config("`qs` is empty".into()));
        }
        if cfg.d < 3 {
            return Err(LabError::Config(format!("scans need d >= 3, got {}", cfg.d)));
        }
        for f in &cfg.families {
            if !["constant", "delta", "subspace", "cone", "random", "dyadic"].contains(&f.as_str()) {
                return Err(LabError::Config(format!("unknown family `{f}`")));
            }
        }
        if let Some(text) = pair_text {
            cfg.pairs = parse_pairs(&text, cfg.d)?;
        }
        Ok(cfg)
    }
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split([',', ' ']).map(str::trim).filter(|s| !s.is_empty())
}

fn parse_ratio(s: &str) -> LabResult<Ratio<i64>> {
    s.trim()
        .parse::<Ratio<i64>>()
        .map_err(|_| LabError::Config(format!("bad fraction `{s}`")))
}

/// `default`, or `;`-separated entries that are `a/b:c/d` or one of
/// `P0`, `P1`, `P2`, `centroid`.
pub fn parse_pairs(text: &str, d: usize) -> LabResult<PairSpec> {
    if text.trim() == "default" {
        return Ok(PairSpec::Default);
    }
    let di = d as i64;
    let mut out = Vec::new();
    for entry in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let pair = match entry {
            "P0" => hull::p0(di),
            "P1" => hull::p1(di),
            "P2" => hull::p2(di),
            "centroid" => hull::centroid(hull_case_for_parity(d), di),
            _ => {
                let (a, b) = entry
                    .split_once(':')
                    .ok_or_else(|| LabError::Config(format!("bad pair `{entry}`")))?;
                ExponentPair::new(parse_ratio(a)?, parse_ratio(b)?)
                    .map_err(|_| LabError::Config(format!("pair `{entry}` outside [0,1]^2")))?
            }
        };
        out.push(pair);
    }
    if out.is_empty() {
        return Err(LabError::Config("no pairs given".into()));
    }
    Ok(PairSpec::List(out))
}

fn hull_case_for_parity(d: usize) -> HullCase {
    if d % 2 == 0 {
        HullCase::HalfDimSubspace
    } else {
        HullCase::NoLargeSubspace
    }
}

/// The hull case shared by every order in `qs`.
pub fn hull_case(d: usize, qs: &[u32]) -> LabResult<HullCase> {
    let mut case = None;
    for &q in qs {
        let field = FieldSpec::from_order(q as u64)?;
        let c = if d % 2 == 0 && predicted_max_dim(&field, d) == d / 2 {
            HullCase::HalfDimSubspace
        } else {
            HullCase::NoLargeSubspace
        };
        match case {
            None => case = Some(c),
            Some(prev) if prev != c => {
                return Err(LabError::Config(format!(
                    "orders {qs:?} mix cones with and without a {}-dimensional subspace",
                    d / 2
                )))
            }
            _ => {}
        }
    }
    case.ok_or_else(|| LabError::Config("`qs` is empty".into()))
}

/// Points used by `levels` dyadic layers.
pub fn dyadic_total(levels: usize, exponent: f64) -> usize {
    dyadic_sizes(levels, exponent).iter().sum()
}

fn scan_families(cfg: &ScanConfig, op: &ConeOperator) -> LabResult<Vec<FamilyMember>> {
    let space = op.space();
    let (q, d) = (space.q() as f64, space.d() as f64);
    let pool = match cfg.direction {
        Direction::Forward => space.len(),
        Direction::Adjoint => op.cone().cardinality(),
    };
    let mut out = Vec::new();
    for (k, name) in cfg.families.iter().enumerate() {
        let fams = match name.as_str() {
            "constant" => vec![TestFamily::Constant],
            "delta" => vec![TestFamily::Delta],
            "subspace" => vec![TestFamily::SubspaceIndicator],
            "cone" => vec![TestFamily::ConeIndicator],
            "random" => [(d - 2.0) / 2.0, (d - 1.0) / 2.0, (d + 1.0) / 2.0]
                .iter()
                .map(|e| TestFamily::RandomSet {
                    size: (q.powf(*e).ceil() as usize).clamp(1, pool),
                    count: 2,
                })
                .collect(),
            "dyadic" => {
                let levels = (1..=12)
                    .rev()
                    .find(|&l| dyadic_total(l, SCAN_DYADIC_EXPONENT) <= pool)
                    .unwrap_or(1);
                vec![TestFamily::DyadicStep {
                    levels,
                    exponent: SCAN_DYADIC_EXPONENT,
                    count: 2,
                }]
            }
            _ => return Err(LabError::Config(format!("unknown family `{name}`"))),
        };
        for (j, fam) in fams.iter().enumerate() {
            let seed = cfg
                .seed
                .wrapping_mul(0x100_0193)
                .wrapping_add((k * 16 + j) as u64)
                ^ ((space.q() as u64) << 32);
            out.extend(generate_family(fam, op, cfg.direction, seed)?);
        }
    }
    Ok(out)
}

/// Input and image of one test function, evaluated once and normed per pair.
struct Evaluated {
    id: String,
    input: Vec<Complex64>,
    input_weight: f64,
    image: Vec<Complex64>,
    image_weight: f64,
}

fn evaluate(op: &ConeOperator, m: &FamilyMember, direction: Direction) -> LabResult<Evaluated> {
    let vol = op.space().volume();
    let ncone = op.cone().cardinality() as f64;
    Ok(match direction {
        Direction::Forward => Evaluated {
            id: m.id.clone(),
            input: m.function.values().to_vec(),
            input_weight: 1.0 / vol,
            image: op.apply_restricted(&m.function)?,
            image_weight: 1.0 / ncone,
        },
        Direction::Adjoint => Evaluated {
            id: m.id.clone(),
            input: op.cone().restrict(&m.function),
            input_weight: 1.0 / ncone,
            image: op.apply_adjoint(&m.function)?.into_values(),
            image_weight: 1.0 / vol,
        },
    })
}

fn norm(values: &[Complex64], weight: f64, p: f64) -> LabResult<f64> {
    Ok(conelab_core::harmonic::weighted_norm(values, weight, p)?)
}

fn pair_ratio(e: &Evaluated, pair: &ExponentPair, direction: Direction) -> LabResult<Option<f64>> {
    let (den_exp, num_exp) = match direction {
        Direction::Forward => (pair.p(), pair.r()),
        Direction::Adjoint => (pair.r_conjugate(), pair.p_conjugate()),
    };
    let den = norm(&e.input, e.input_weight, den_exp)?;
    if den == 0.0 {
        return Ok(None);
    }
    Ok(Some(norm(&e.image, e.image_weight, num_exp)? / den))
}

pub fn field_info(qs: &[u32]) -> LabResult<Vec<FieldInfo>> {
    let mut qs = qs.to_vec();
    qs.sort_unstable();
    qs.dedup();
    qs.iter()
        .map(|&q| {
            let f = FieldSpec::from_order(q as u64)?;
            Ok(FieldInfo {
                q,
                p: f.p(),
                e: f.e(),
                modulus: f.modulus().to_vec(),
            })
        })
        .collect()
}

/// Runs the scan described by `cfg`.
pub fn run_scan(cfg: &ScanConfig) -> LabResult<Report> {
    let case = hull_case(cfg.d, &cfg.qs)?;
    let di = cfg.d as i64;
    let pairs = match &cfg.pairs {
        PairSpec::Default => hull::default_grid(case, di),
        PairSpec::List(v) => v.clone(),
    };
    // per_pair[k] holds the per-q rows of pair k
    let mut per_pair: Vec<Vec<ReportRow>> = vec![Vec::new(); pairs.len()];
    // ratios of the designated witness family at outside pairs
    let mut witness: Vec<Vec<Option<f64>>> = vec![Vec::new(); pairs.len()];
    for &q in &cfg.qs {
        let field = FieldSpec::from_order(q as u64)?;
        let space = Space::new(field.clone(), cfg.d)?;
        let op = ConeOperator::new(&space)?;
        let evaluated: Vec<Evaluated> = scan_families(cfg, &op)?
            .iter()
            .map(|m| evaluate(&op, m, cfg.direction))
            .collect::<LabResult<_>>()?;
        for (k, pair) in pairs.iter().enumerate() {
            let loc = hull::hull_classify(pair, di, case);
            let witness_id = hull::witness_family(pair, di, case);
            let mut best: Option<(f64, &str)> = None;
            let mut witness_ratio = None;
            for e in &evaluated {
                if let Some(r) = pair_ratio(e, pair, cfg.direction)? {
                    if best.is_none_or(|(b, _)| r > b) {
                        best = Some((r, &e.id));
                    }
                    if e.id == witness_id {
                        witness_ratio = Some(r);
                    }
                }
            }
            let (ratio, family) = best.ok_or_else(|| LabError::Config("no usable test functions".into()))?;
            witness[k].push(witness_ratio);
            let mut row = ReportRow::new(&format!("scan:{}", loc.tag()), cfg.d)
                .with_field(field.p(), field.e())
                .with_pair(pair);
            row.family = family.to_string();
            row.ratio = Some(ratio);
            row.constant = Some(ratio);
            row.verdict = Verdict::Measured.tag().into();
            per_pair[k].push(row);
        }
    }
    let mut rows = Vec::new();
    for ((pair, pair_rows), witness_vals) in pairs.iter().zip(per_pair).zip(witness) {
        let loc = hull::hull_classify(pair, di, case);
        let qs: Vec<f64> = pair_rows.iter().filter_map(|r| r.q.map(f64::from)).collect();
        let mut vals: Vec<f64> = pair_rows.iter().filter_map(|r| r.ratio).collect();
        let mut s = ReportRow::new(&format!("scan:{}", loc.tag()), cfg.d).with_pair(pair);
        if loc == Location::Outside {
            let w: Option<Vec<f64>> = witness_vals.into_iter().collect();
            s.family = match w {
                Some(w) => {
                    vals = w;
                    hull::witness_family(pair, di, case).to_string()
                }
                None => "best".to_string(),
            };
        }
        s.slope = fit_slope(&qs, &vals);
        s.constant = vals.iter().copied().reduce(f64::max);
        s.verdict = match (cfg.mode, s.slope) {
            (Mode::Conjecture, _) => Verdict::ReportOnly,
            (Mode::Sharpness, None) => Verdict::Measured,
            (Mode::Sharpness, Some(slope)) => {
                let bounded = slope <= cfg.threshold;
                if bounded == (loc != Location::Outside) {
                    Verdict::Agree
                } else {
                    Verdict::Disagree
                }
            }
        }
        .tag()
        .into();
        rows.extend(pair_rows);
        rows.push(s);
    }
    Ok(Report {
        metadata: Metadata {
            version: REPORT_VERSION.into(),
            seed: cfg.seed,
            threshold: cfg.threshold,
            fields: field_info(&cfg.qs)?,
            notes: vec![
                format!("scan d={} direction={}", cfg.d, cfg.direction.tag()),
                format!(
                    "hull case: {}",
                    match case {
                        HullCase::HalfDimSubspace => "half-dimensional subspace in cone",
                        HullCase::NoLargeSubspace => "no large subspace in cone",
                    }
                ),
            ],
        },
        rows,
    })
}
