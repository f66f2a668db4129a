//! Named verification checks: exact identities, structural facts,
//! constant-stability of the inequalities, and the endpoint estimates.

use std::collections::BTreeMap;
use std::sync::Arc;

use conelab_core::harmonic::{surface_norm_values, weighted_norm};
use conelab_core::operators::ConeOperator;
use conelab_core::subspace::{max_subspace_in_cone, predicted_max_dim};
use conelab_core::varieties::{kernel_m, kernel_profile, regularity_report};
use conelab_core::{
    build_variety, convolve, fourier_hat, generate_family, inverse_fourier, lp_norm, Direction,
    ExponentPair, FamilyMember, FieldElement, FieldSpec, FunctionOnSpace, MeasureSide, Space,
    TestFamily, VarietyKind,
};
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{LabError, LabResult};
use crate::hull;
use crate::report::ReportRow;
use crate::slope::{fit_slope, slope_verdict, Verdict};

pub const EXACT_TOLERANCE: f64 = 1e-9;
pub const SUBSPACE_BUDGET: u64 = 1_000_000;

const DX: MeasureSide = MeasureSide::SpaceDx;

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub seed: u64,
    pub threshold: f64,
    /// Random inputs per `q` for exact identities.
    pub trials: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 1,
            threshold: crate::slope::DEFAULT_THRESHOLD,
            trials: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    Exact,
    Structural,
    Inequality,
    Endpoint,
}

#[derive(Debug, Clone, Copy)]
pub struct CheckInfo {
    pub id: &'static str,
    pub kind: CheckKind,
    pub even_only: bool,
    pub min_d: usize,
    pub max_d: usize,
}

const fn info(id: &'static str, kind: CheckKind, even_only: bool, min_d: usize) -> CheckInfo {
    CheckInfo {
        id,
        kind,
        even_only,
        min_d,
        max_d: usize::MAX,
    }
}

pub const CHECKS: &[CheckInfo] = &[
    info("fourier-inversion", CheckKind::Exact, false, 3),
    info("plancherel", CheckKind::Exact, false, 3),
    info("convolution-theorem", CheckKind::Exact, false, 3),
    info("orthogonality", CheckKind::Exact, false, 3),
    info("duality", CheckKind::Exact, false, 3),
    info("forward-decomposition", CheckKind::Exact, false, 3),
    info("adjoint-decomposition", CheckKind::Exact, false, 3),
    info("extension-identity", CheckKind::Exact, false, 3),
    info("cone-reconstruction", CheckKind::Exact, false, 3),
    info("kernel-origin", CheckKind::Exact, false, 3),
    info("cone-cardinality", CheckKind::Structural, false, 3),
    info("cone-regularity", CheckKind::Structural, false, 3),
    info("kernel-decay", CheckKind::Structural, true, 4),
    info("subspace-dichotomy", CheckKind::Structural, true, 4),
    info("dual-cone-energy", CheckKind::Inequality, true, 4),
    info("kernel-energy-localized", CheckKind::Inequality, true, 4),
    info("kernel-energy-split", CheckKind::Inequality, true, 4),
    info("forward-sup", CheckKind::Inequality, true, 4),
    info("forward-l2-localized", CheckKind::Inequality, true, 4),
    info("forward-l2-split", CheckKind::Inequality, true, 4),
    info("forward-l2-power", CheckKind::Inequality, true, 4),
    info("forward-l2-regimes", CheckKind::Inequality, true, 4),
    info("forward-mid-norm", CheckKind::Inequality, true, 6),
    info("adjoint-sup", CheckKind::Inequality, true, 4),
    info("adjoint-l2-localized", CheckKind::Inequality, true, 4),
    info("adjoint-l2-split", CheckKind::Inequality, true, 4),
    info("adjoint-l2-regimes", CheckKind::Inequality, true, 4),
    info("adjoint-mid-norm", CheckKind::Inequality, true, 6),
    CheckInfo {
        max_d: 4,
        ..info("adjoint-mid-norm-d4", CheckKind::Inequality, true, 4)
    },
    info("endpoint-p1", CheckKind::Endpoint, true, 4),
    info("endpoint-p2", CheckKind::Endpoint, true, 4),
];

pub fn check_info(id: &str) -> LabResult<CheckInfo> {
    CHECKS
        .iter()
        .find(|c| c.id == id)
        .copied()
        .ok_or_else(|| LabError::UnknownCheck(id.to_string()))
}

/// Checks that apply in dimension `d`.
pub fn checks_for(d: usize) -> Vec<&'static str> {
    CHECKS
        .iter()
        .filter(|c| d >= c.min_d && d <= c.max_d && (!c.even_only || d % 2 == 0))
        .map(|c| c.id)
        .collect()
}

fn validate(c: &CheckInfo, d: usize) -> LabResult<()> {
    if c.even_only && d % 2 == 1 {
        return Err(LabError::ParityMismatch {
            check: c.id.to_string(),
            d,
        });
    }
    if d < c.min_d || d > c.max_d {
        return Err(LabError::DimensionMismatch {
            check: c.id.to_string(),
            d,
            min: c.min_d,
        });
    }
    Ok(())
}

/// Field orders used when none are given.
pub fn default_qs(id: &str, d: usize) -> LabResult<Vec<u32>> {
    let c = check_info(id)?;
    Ok(match c.kind {
        CheckKind::Exact => vec![3, 5, 9],
        CheckKind::Structural if id == "kernel-decay" && d == 4 => vec![3, 5, 7, 9, 11],
        CheckKind::Structural if id == "kernel-decay" => vec![7, 9, 11, 13],
        CheckKind::Structural => vec![3, 5, 7, 9],
        CheckKind::Inequality => match d {
            4 => vec![29, 37, 41],
            6 => vec![9, 11, 13],
            _ => vec![3, 5, 7],
        },
        CheckKind::Endpoint => match d {
            4 => vec![5, 13, 17],
            _ => vec![3, 5, 7],
        },
    })
}

fn space_for(q: u32, d: usize) -> LabResult<Arc<Space>> {
    Ok(Space::new(FieldSpec::from_order(q as u64)?, d)?)
}

fn q_row(id: &str, space: &Space) -> ReportRow {
    let f = space.field();
    ReportRow::new(id, space.d()).with_field(f.p(), f.e())
}

fn summary(id: &str, d: usize) -> ReportRow {
    ReportRow::new(id, d)
}

fn c1(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn random_values(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

fn rng_for(seed: u64, q: u32, salt: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    rng.set_stream(q as u64);
    rng
}

fn inner(a: &[Complex64], b: &[Complex64], weight: f64) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum::<Complex64>() * weight
}

/// Largest residual of one exact identity over `trials` random inputs.
fn exact_residual(id: &str, op: &ConeOperator, trials: usize, rng: &mut ChaCha8Rng) -> LabResult<f64> {
    let space = op.space();
    let n = space.len();
    let vol = space.volume();
    let cone = op.cone();
    let ncone = cone.cardinality();
    let rand_dx = |rng: &mut ChaCha8Rng| FunctionOnSpace::from_values(space, DX, random_values(n, rng));
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let r = match id {
            "fourier-inversion" => {
                let f = rand_dx(rng)?;
                let a = fourier_hat(&inverse_fourier(&f)?)?.max_abs_diff(&f) / f.max_abs();
                let g = rand_dx(rng)?.with_side(MeasureSide::DualDm);
                let b = inverse_fourier(&fourier_hat(&g)?)?.max_abs_diff(&g) / g.max_abs();
                a.max(b)
            }
            "plancherel" => {
                let f = rand_dx(rng)?;
                let l = lp_norm(&f, 2.0)?;
                (lp_norm(&inverse_fourier(&f)?, 2.0)? - l).abs() / l
            }
            "convolution-theorem" => {
                let f = rand_dx(rng)?;
                let h = rand_dx(rng)?;
                let fh = convolve(&f, &h)?;
                let lhs = inverse_fourier(&fh)?;
                let rhs = inverse_fourier(&f)?.mul(&inverse_fourier(&h)?)?;
                let mut r = lhs.max_abs_diff(&rhs);
                // spot-check the defining sum at a few points
                for _ in 0..8 {
                    let y = rng.gen_range(0..n);
                    let direct: Complex64 = (0..n)
                        .map(|x| f.get(space.sub_index(y, x)) * h.get(x))
                        .sum::<Complex64>()
                        / vol;
                    r = r.max((direct - fh.get(y)).norm());
                }
                r
            }
            "orthogonality" => {
                let one = FunctionOnSpace::constant(space, DX, c1(1.0));
                let v = inverse_fourier(&one)?;
                let delta = FunctionOnSpace::delta(space, MeasureSide::DualDm);
                v.max_abs_diff(&delta)
            }
            "duality" => {
                let f = rand_dx(rng)?;
                let h = random_values(ncone, rng);
                let lhs = inner(&op.apply_restricted(&f)?, &h, 1.0 / ncone as f64);
                let rhs = inner(f.values(), op.apply_adjoint_values(&h)?.values(), 1.0 / vol);
                (lhs - rhs).norm()
            }
            "forward-decomposition" => op.decompose_forward(&rand_dx(rng)?)?.residual,
            "adjoint-decomposition" => {
                let h = cone.extend(&random_values(ncone, rng), DX)?;
                op.decompose_adjoint(&h)?.residual
            }
            "extension-identity" => {
                let vals = random_values(ncone, rng);
                let f = cone.extend(&vals, DX)?;
                let sigma = op.measure().as_function();
                let lhs = lp_norm(&inverse_fourier(&f.mul(&sigma)?)?, 2.0)?;
                let l2c = surface_norm_values(&vals, 2.0)?;
                let rhs = vol.sqrt() / (ncone as f64).sqrt() * l2c;
                (lhs - rhs).abs() / rhs
            }
            "cone-reconstruction" => {
                let mhat = fourier_hat(&kernel_m(cone)?)?;
                let frac = op.cone_fraction();
                (0..n)
                    .map(|x| {
                        let target = if cone.contains(x) { 1.0 } else { 0.0 };
                        (mhat.get(x) + frac - target).norm()
                    })
                    .fold(0.0, f64::max)
            }
            "kernel-origin" => {
                let sigma_v = inverse_fourier(&op.measure().as_function())?;
                let cone_v = inverse_fourier(&cone.indicator(DX))?;
                let m = op.kernel_m();
                (sigma_v.get(0) - 1.0)
                    .norm()
                    .max((cone_v.get(0) - op.cone_fraction()).norm())
                    .max(op.kernel_k().get(0).norm())
                    .max(m.get(0).norm())
            }
            _ => return Err(LabError::UnknownCheck(id.to_string())),
        };
        worst = worst.max(r);
        if matches!(id, "orthogonality" | "cone-reconstruction" | "kernel-origin") {
            break;
        }
    }
    Ok(worst)
}

fn run_exact(ids: &[&str], d: usize, qs: &[u32], opts: &VerifyOptions) -> LabResult<Vec<ReportRow>> {
    let mut per_check: BTreeMap<&str, Vec<ReportRow>> = BTreeMap::new();
    for &q in qs {
        let space = space_for(q, d)?;
        let op = ConeOperator::new(&space)?;
        for (k, &id) in ids.iter().enumerate() {
            let mut rng = rng_for(opts.seed, q, k as u64 + 1);
            let r = exact_residual(id, &op, opts.trials, &mut rng)?;
            let mut row = q_row(id, &space);
            row.constant = Some(r);
            row.verdict = exact_verdict(r).tag().into();
            per_check.entry(id).or_default().push(row);
        }
    }
    let mut out = Vec::new();
    for &id in ids {
        let rows = per_check.remove(id).unwrap_or_default();
        let worst = rows.iter().filter_map(|r| r.constant).fold(0.0, f64::max);
        out.extend(rows);
        let mut s = summary(id, d);
        s.constant = Some(worst);
        s.verdict = exact_verdict(worst).tag().into();
        out.push(s);
    }
    Ok(out)
}

fn exact_verdict(residual: f64) -> Verdict {
    if residual <= EXACT_TOLERANCE {
        Verdict::ExactPass
    } else {
        Verdict::ExactFail
    }
}

/// `|V| / q^{d-1}` within `[1/2, 2]`.
fn range_verdict(ok: bool) -> Verdict {
    if ok {
        Verdict::ExactPass
    } else {
        Verdict::ExactFail
    }
}

fn slope_summary(id: &str, d: usize, rows: &[ReportRow], threshold: f64) -> ReportRow {
    let qs: Vec<f64> = rows.iter().filter_map(|r| r.q.map(f64::from)).collect();
    let vals: Vec<f64> = rows.iter().filter_map(|r| r.constant).collect();
    let mut s = summary(id, d);
    s.slope = if vals.len() == qs.len() {
        fit_slope(&qs, &vals)
    } else {
        None
    };
    s.constant = vals.iter().copied().reduce(f64::max);
    s.verdict = match s.slope {
        Some(slope) => slope_verdict(slope, threshold).tag().into(),
        None => Verdict::Measured.tag().into(),
    };
    s
}

fn run_structural(id: &str, d: usize, qs: &[u32], opts: &VerifyOptions) -> LabResult<Vec<ReportRow>> {
    let mut out = Vec::new();
    match id {
        "cone-cardinality" => {
            let mut rows = Vec::new();
            let mut in_range = true;
            for &q in qs {
                let space = space_for(q, d)?;
                let cone = build_variety(&space, VarietyKind::Cone)?;
                let ratio = cone.cardinality() as f64 / (q as f64).powi(d as i32 - 1);
                let ok = (0.5..=2.0).contains(&ratio);
                in_range &= ok;
                let mut row = q_row(id, &space);
                row.ratio = Some(cone.cardinality() as f64);
                row.constant = Some(ratio);
                row.verdict = range_verdict(ok).tag().into();
                rows.push(row);
            }
            let mut s = slope_summary(id, d, &rows, opts.threshold);
            s.verdict = range_verdict(in_range).tag().into();
            out.extend(rows);
            out.push(s);
        }
        "cone-regularity" => {
            let (size_id, decay_id) = ("cone-regularity:size", "cone-regularity:decay");
            let (mut size_rows, mut decay_rows) = (Vec::new(), Vec::new());
            let mut in_range = true;
            for &q in qs {
                let space = space_for(q, d)?;
                let cone = build_variety(&space, VarietyKind::Cone)?;
                let (size, decay) = regularity_report(&cone)?;
                let ok = (0.5..=2.0).contains(&size);
                in_range &= ok;
                let mut row = q_row(size_id, &space);
                row.constant = Some(size);
                row.verdict = range_verdict(ok).tag().into();
                size_rows.push(row);
                let mut row = q_row(decay_id, &space);
                row.constant = Some(decay);
                row.verdict = Verdict::Measured.tag().into();
                decay_rows.push(row);
            }
            let mut size_summary = slope_summary(size_id, d, &size_rows, opts.threshold);
            size_summary.verdict = range_verdict(in_range).tag().into();
            let mut decay_summary = slope_summary(decay_id, d, &decay_rows, opts.threshold);
            // regular in odd dimensions; decay ratio ~ q^{1/2} in even ones
            let expected = if d % 2 == 1 { 0.0 } else { 0.5 };
            decay_summary.ratio = Some(expected);
            if let Some(slope) = decay_summary.slope {
                decay_summary.verdict = if (slope - expected).abs() <= opts.threshold {
                    Verdict::Agree
                } else {
                    Verdict::Disagree
                }
                .tag()
                .into();
            }
            out.extend(size_rows);
            out.push(size_summary);
            out.extend(decay_rows);
            out.push(decay_summary);
        }
        "kernel-decay" => {
            let (zero_id, nonzero_id) = ("kernel-decay:gamma-zero", "kernel-decay:gamma-nonzero");
            let (mut zero_rows, mut nonzero_rows) = (Vec::new(), Vec::new());
            for &q in qs {
                let space = space_for(q, d)?;
                let op = ConeOperator::new(&space)?;
                let prof = kernel_profile(op.kernel_k());
                let qf = q as f64;
                let sz = qf.powf((d as f64 - 2.0) / 2.0);
                let snz = qf.powf(d as f64 / 2.0);
                let mut row = q_row(zero_id, &space);
                row.constant = Some(sz * prof.gamma_zero_max);
                row.ratio = Some(sz * prof.gamma_zero_min);
                row.verdict = Verdict::Measured.tag().into();
                zero_rows.push(row);
                let mut row = q_row(nonzero_id, &space);
                row.constant = Some(snz * prof.gamma_nonzero_max);
                row.ratio = Some(snz * prof.gamma_nonzero_min);
                row.verdict = Verdict::Measured.tag().into();
                nonzero_rows.push(row);
            }
            let zs = slope_summary(zero_id, d, &zero_rows, opts.threshold);
            let nzs = slope_summary(nonzero_id, d, &nonzero_rows, opts.threshold);
            out.extend(zero_rows);
            out.push(zs);
            out.extend(nonzero_rows);
            out.push(nzs);
        }
        "subspace-dichotomy" => {
            let mut all_ok = true;
            for &q in qs {
                let space = space_for(q, d)?;
                let found = max_subspace_in_cone(&space, SUBSPACE_BUDGET)?;
                let field = space.field();
                let eta = field.eta(field.neg(FieldElement::ONE)) as i32;
                let expected = if eta == eta.pow(d as u32 / 2) { d / 2 } else { (d - 2) / 2 };
                let ok = found.subspace.dim() == expected
                    && predicted_max_dim(field, d) == expected
                    && found.subspace.lies_in_cone(&space);
                all_ok &= ok;
                let mut row = q_row(id, &space);
                row.constant = Some(found.subspace.dim() as f64);
                row.ratio = Some(found.subspace.points().len() as f64);
                row.family = if found.exhaustive { "exhaustive" } else { "structured" }.into();
                row.verdict = if ok { Verdict::ExactPass } else { Verdict::ExactFail }.tag().into();
                out.push(row);
            }
            let mut s = summary(id, d);
            s.verdict = if all_ok { Verdict::ExactPass } else { Verdict::ExactFail }.tag().into();
            out.push(s);
        }
        _ => return Err(LabError::UnknownCheck(id.to_string())),
    }
    Ok(out)
}

/// Scalar measurements of one witness set.
#[derive(Debug, Clone)]
pub struct Instance {
    pub family: String,
    pub size: f64,
    pub in_cone: bool,
    /// `sum_{Γ(m)=0} |E^v(m)|^2`.
    pub dual_energy: f64,
    /// `sum_{m != 0} |E^v(m) sigma^v(m)|^2`.
    pub kernel_energy: f64,
    /// Norms of `E * K^` on `(C, sigma)`: sup, `L^2`, `L^{(d-2)/2}`.
    pub ek: [f64; 3],
    /// Norms of `F * M^` on `dx`: sup, `L^2`, `L^{(d^2-2d+2)/(2d)}`, `L^{10/3}`.
    pub fm: Option<[f64; 4]>,
}

fn witness_sets(op: &ConeOperator, q: u32, seed: u64) -> LabResult<Vec<(String, Vec<usize>, bool)>> {
    let space = op.space();
    let d = space.d() as f64;
    let qf = q as f64;
    let mut rng = rng_for(seed, q, 0xE5E7);
    let mut sets = vec![
        ("point".to_string(), vec![0usize], true),
        ("cone".to_string(), op.cone().points().to_vec(), true),
        ("subspace".to_string(), op.subspace().points().to_vec(), true),
    ];
    let h = op.subspace().points();
    let mid = qf.powf((d - 1.0) / 2.0).ceil() as usize;
    if mid <= h.len() {
        let mut pick: Vec<usize> = sample(&mut rng, h.len(), mid).into_iter().map(|k| h[k]).collect();
        pick.sort_unstable();
        sets.push(("subspace-subset".to_string(), pick, true));
    }
    let sizes = [
        ("small", (qf.powf((d - 2.0) / 2.0) / 2.0).ceil() as usize),
        ("mid", mid),
        ("large", qf.powf((d + 1.0) / 2.0).ceil() as usize),
    ];
    let cone_pts = op.cone().points();
    for (label, size) in sizes {
        let mut pick: Vec<usize> = sample(&mut rng, space.len(), size).into_vec();
        pick.sort_unstable();
        sets.push((format!("random-{label}"), pick, false));
    }
    for (label, size) in sizes {
        let size = size.min(cone_pts.len());
        let mut pick: Vec<usize> = sample(&mut rng, cone_pts.len(), size)
            .into_iter()
            .map(|k| cone_pts[k])
            .collect();
        pick.sort_unstable();
        sets.push((format!("cone-random-{label}"), pick, true));
    }
    Ok(sets)
}

/// Measures every witness set at one `q`.
pub fn measure_instances(q: u32, d: usize, seed: u64) -> LabResult<Vec<Instance>> {
    let space = space_for(q, d)?;
    let op = ConeOperator::new(&space)?;
    let dual = build_variety(&space, VarietyKind::DualCone)?;
    let kernel = op.kernel_k();
    let frac = op.cone_fraction();
    let df = d as f64;
    let mid_exp = ((df - 2.0) / 2.0).max(1.0);
    let adj_exp = (df * df - 2.0 * df + 2.0) / (2.0 * df);
    let mut out = Vec::new();
    for (family, pts, in_cone) in witness_sets(&op, q, seed)? {
        let e = FunctionOnSpace::indicator(&space, DX, &pts);
        let ev = inverse_fourier(&e)?;
        let dual_energy: f64 = dual.points().iter().map(|&m| ev.get(m).norm_sqr()).sum();
        let prod = ev.mul(kernel)?;
        let kernel_energy: f64 = prod.values().iter().map(|v| v.norm_sqr()).sum();
        let ek_full = fourier_hat(&prod)?;
        let ek_cone = op.cone().restrict(&ek_full);
        let ek = [
            surface_norm_values(&ek_cone, f64::INFINITY)?,
            surface_norm_values(&ek_cone, 2.0)?,
            surface_norm_values(&ek_cone, mid_exp)?,
        ];
        let fm = if in_cone {
            let w = 1.0 / space.volume();
            let vals = ek_full.values();
            Some([
                frac * weighted_norm(vals, w, f64::INFINITY)?,
                frac * weighted_norm(vals, w, 2.0)?,
                frac * weighted_norm(vals, w, adj_exp)?,
                frac * weighted_norm(vals, w, 10.0 / 3.0)?,
            ])
        } else {
            None
        };
        out.push(Instance {
            family,
            size: pts.len() as f64,
            in_cone,
            dual_energy,
            kernel_energy,
            ek,
            fm,
        });
    }
    Ok(out)
}

type Measure = fn(&Instance) -> Option<f64>;
type Shape = fn(f64, f64, f64) -> f64;
type Regime = fn(f64, f64, f64) -> bool;

struct Inequality {
    id: &'static str,
    lhs: Measure,
    shape: Shape,
    regime: Option<Regime>,
}

const SLACK: f64 = 1.0 + 1e-12;

fn large(n: f64, q: f64, d: f64) -> bool {
    n * SLACK >= q.powf(d / 2.0)
}

fn mid(n: f64, q: f64, d: f64) -> bool {
    n * SLACK >= q.powf((d - 2.0) / 2.0) && n <= q.powf(d / 2.0) * SLACK
}

fn small(n: f64, q: f64, d: f64) -> bool {
    n <= q.powf((d - 2.0) / 2.0) * SLACK
}

/// Inequalities sharing a base id; two-term sums use `max` as the shape.
fn inequalities(base: &str) -> Vec<Inequality> {
    let ek = |k: usize| -> Measure {
        match k {
            0 => |i| Some(i.ek[0]),
            1 => |i| Some(i.ek[1]),
            _ => |i| Some(i.ek[2]),
        }
    };
    let fm = |k: usize| -> Measure {
        match k {
            0 => |i| i.fm.map(|v| v[0]),
            1 => |i| i.fm.map(|v| v[1]),
            2 => |i| i.fm.map(|v| v[2]),
            _ => |i| i.fm.map(|v| v[3]),
        }
    };
    let one = |id, lhs, shape| vec![Inequality { id, lhs, shape, regime: None }];
    match base {
        "dual-cone-energy" => one(
            "dual-cone-energy",
            |i| Some(i.dual_energy),
            |n, q, d| (q.powf(-d - 1.0) * n).max(q.powf(-1.5 * d) * n * n),
        ),
        "kernel-energy-localized" => one(
            "kernel-energy-localized",
            |i| Some(i.kernel_energy),
            |n, q, d| q.powf(-2.0 * d + 2.0) * n,
        ),
        "kernel-energy-split" => one(
            "kernel-energy-split",
            |i| Some(i.kernel_energy),
            |n, q, d| (q.powf(-2.0 * d + 1.0) * n).max(q.powf((-5.0 * d + 4.0) / 2.0) * n * n),
        ),
        "forward-sup" => one("forward-sup", ek(0), |n, q, d| n / q.powf(d - 1.0)),
        "forward-l2-localized" => one("forward-l2-localized", ek(1), |n, q, d| {
            q.powf((-2.0 * d + 3.0) / 2.0) * n.sqrt()
        }),
        "forward-l2-split" => one("forward-l2-split", ek(1), |n, q, d| {
            (q.powf(-d + 1.0) * n.sqrt()).max(q.powf((-5.0 * d + 6.0) / 4.0) * n)
        }),
        "forward-l2-power" => one("forward-l2-power", ek(1), |n, q, d| {
            q.powf(-d + 1.0) * n.powf((d + 2.0) / (2.0 * d))
        }),
        "forward-l2-regimes" => vec![
            Inequality {
                id: "forward-l2-regimes:large",
                lhs: ek(1),
                shape: |n, q, d| q.powf((-2.0 * d + 3.0) / 2.0) * n.sqrt(),
                regime: Some(large),
            },
            Inequality {
                id: "forward-l2-regimes:mid",
                lhs: ek(1),
                shape: |n, q, d| q.powf((-5.0 * d + 6.0) / 4.0) * n,
                regime: Some(mid),
            },
            Inequality {
                id: "forward-l2-regimes:small",
                lhs: ek(1),
                shape: |n, q, d| q.powf(-d + 1.0) * n.sqrt(),
                regime: Some(small),
            },
        ],
        "forward-mid-norm" => one("forward-mid-norm", ek(2), |n, q, d| {
            q.powf(-d + 1.0) * n.powf((d - 2.0) / d)
        }),
        "adjoint-sup" => one("adjoint-sup", fm(0), |n, q, d| n / q.powf(d)),
        "adjoint-l2-localized" => one("adjoint-l2-localized", fm(1), |n, q, d| {
            q.powf(-d) * n.sqrt()
        }),
        "adjoint-l2-split" => one("adjoint-l2-split", fm(1), |n, q, d| {
            (q.powf((-2.0 * d - 1.0) / 2.0) * n.sqrt()).max(q.powf(-1.25 * d) * n)
        }),
        "adjoint-l2-regimes" => vec![
            Inequality {
                id: "adjoint-l2-regimes:large",
                lhs: fm(1),
                shape: |n, q, d| q.powf(-d) * n.sqrt(),
                regime: Some(large),
            },
            Inequality {
                id: "adjoint-l2-regimes:mid",
                lhs: fm(1),
                shape: |n, q, d| q.powf(-1.25 * d) * n,
                regime: Some(mid),
            },
            Inequality {
                id: "adjoint-l2-regimes:small",
                lhs: fm(1),
                shape: |n, q, d| q.powf((-2.0 * d - 1.0) / 2.0) * n.sqrt(),
                regime: Some(small),
            },
        ],
        "adjoint-mid-norm" => one("adjoint-mid-norm", fm(2), |n, q, d| {
            let den = d * d - 2.0 * d + 2.0;
            n.powf((d * d - 4.0 * d + 6.0) / den) / q.powf((d * d * d - 2.0 * d * d + 4.0 * d) / den)
        }),
        "adjoint-mid-norm-d4" => vec![
            Inequality {
                id: "adjoint-mid-norm-d4:large",
                lhs: fm(3),
                shape: |n, q, _| q.powf(-4.0) * n.powf(0.7),
                regime: Some(|n, q, _| n * SLACK >= q * q),
            },
            Inequality {
                id: "adjoint-mid-norm-d4:mid",
                lhs: fm(3),
                shape: |n, q, _| q.powf(-4.6) * n,
                regime: Some(|n, q, _| n * SLACK >= q && n <= q * q * SLACK),
            },
            Inequality {
                id: "adjoint-mid-norm-d4:small",
                lhs: fm(3),
                shape: |n, q, _| q.powf(-4.3) * n.powf(0.7),
                regime: Some(|n, q, _| n <= q * SLACK),
            },
        ],
        _ => Vec::new(),
    }
}

fn run_inequalities(
    ids: &[&str],
    d: usize,
    qs: &[u32],
    opts: &VerifyOptions,
    cache: &mut BTreeMap<(u32, usize), Vec<Instance>>,
) -> LabResult<Vec<ReportRow>> {
    let mut out = Vec::new();
    for &base in ids {
        for ineq in inequalities(base) {
            let mut rows = Vec::new();
            for &q in qs {
                let instances = match cache.entry((q, d)) {
                    std::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(measure_instances(q, d, opts.seed)?)
                    }
                };
                let field = FieldSpec::from_order(q as u64)?;
                let (qf, df) = (q as f64, d as f64);
                let mut best: Option<(f64, f64, &str)> = None;
                for inst in instances {
                    if let Some(regime) = ineq.regime {
                        if !regime(inst.size, qf, df) {
                            continue;
                        }
                    }
                    let Some(lhs) = (ineq.lhs)(inst) else { continue };
                    let constant = lhs / (ineq.shape)(inst.size, qf, df);
                    if best.is_none_or(|(c, _, _)| constant > c) {
                        best = Some((constant, lhs, &inst.family));
                    }
                }
                let mut row = ReportRow::new(ineq.id, d).with_field(field.p(), field.e());
                if let Some((constant, lhs, family)) = best {
                    row.constant = Some(constant);
                    row.ratio = Some(lhs);
                    row.family = family.to_string();
                }
                row.verdict = Verdict::Measured.tag().into();
                rows.push(row);
            }
            let s = slope_summary(ineq.id, d, &rows, opts.threshold);
            out.extend(rows);
            out.push(s);
        }
    }
    Ok(out)
}

/// Witness families for operator ratios at one `q`.
pub fn witness_families(
    op: &ConeOperator,
    direction: Direction,
    seed: u64,
    dyadic_exponent: Option<f64>,
) -> LabResult<Vec<FamilyMember>> {
    let space = op.space();
    let (q, d) = (space.q() as f64, space.d() as f64);
    let pool = match direction {
        Direction::Forward => space.len(),
        Direction::Adjoint => op.cone().cardinality(),
    };
    let mut families = vec![
        TestFamily::Constant,
        TestFamily::Delta,
        TestFamily::SubspaceIndicator,
        TestFamily::ConeIndicator,
    ];
    for size in [
        (q.powf((d - 2.0) / 2.0) / 2.0).ceil() as usize,
        q.powf((d - 1.0) / 2.0).ceil() as usize,
        q.powf((d + 1.0) / 2.0).ceil() as usize,
    ] {
        families.push(TestFamily::RandomSet {
            size: size.min(pool),
            count: 1,
        });
    }
    if let Some(exponent) = dyadic_exponent {
        let levels = (1..=8)
            .rev()
            .find(|&l| crate::scan::dyadic_total(l, exponent) <= pool)
            .unwrap_or(1);
        families.push(TestFamily::DyadicStep {
            levels,
            exponent,
            count: 1,
        });
    }
    let mut members = Vec::new();
    for (k, fam) in families.iter().enumerate() {
        let fam_seed = seed.wrapping_add(k as u64).wrapping_mul(0x100_0193) ^ space.q() as u64;
        members.extend(generate_family(fam, op, direction, fam_seed)?);
    }
    Ok(members)
}

fn run_endpoint(id: &str, d: usize, qs: &[u32], opts: &VerifyOptions) -> LabResult<Vec<ReportRow>> {
    let di = d as i64;
    let cases: Vec<(String, ExponentPair, Direction)> = match id {
        "endpoint-p1" => vec![(id.to_string(), hull::p1(di), Direction::Forward)],
        _ => vec![
            (format!("{id}:forward"), hull::p2(di), Direction::Forward),
            (format!("{id}:adjoint"), hull::p2(di), Direction::Adjoint),
        ],
    };
    let report_only = id == "endpoint-p1" && d == 4;
    let mut per_case: Vec<Vec<ReportRow>> = vec![Vec::new(); cases.len()];
    for &q in qs {
        let space = space_for(q, d)?;
        let op = ConeOperator::new(&space)?;
        for (k, (cid, pair, dir)) in cases.iter().enumerate() {
            let exponent = match dir {
                Direction::Forward => pair.p(),
                Direction::Adjoint => pair.r_conjugate(),
            };
            let members = witness_families(&op, *dir, opts.seed, Some(exponent))?;
            let best = conelab_core::best_ratio(&op, &members, *pair, *dir)?;
            let mut row = q_row(cid, &space).with_pair(pair);
            row.ratio = Some(best.ratio);
            row.constant = Some(best.ratio);
            row.family = best.family_id;
            row.verdict = Verdict::Measured.tag().into();
            per_case[k].push(row);
        }
    }
    let mut out = Vec::new();
    for ((cid, pair, _), rows) in cases.iter().zip(per_case) {
        let mut s = slope_summary(cid, d, &rows, opts.threshold).with_pair(pair);
        if report_only {
            s.verdict = Verdict::ReportOnly.tag().into();
            s.family = "open - exploration only".into();
        }
        out.extend(rows);
        out.push(s);
    }
    Ok(out)
}

/// Runs one check.
pub fn verify(id: &str, d: usize, qs: Option<&[u32]>, opts: &VerifyOptions) -> LabResult<Vec<ReportRow>> {
    verify_suite(&[id], d, qs, opts)
}

/// Runs several checks, sharing per-`q` measurements between inequalities.
pub fn verify_suite(
    ids: &[&str],
    d: usize,
    qs: Option<&[u32]>,
    opts: &VerifyOptions,
) -> LabResult<Vec<ReportRow>> {
    let infos: Vec<CheckInfo> = ids.iter().map(|id| check_info(id)).collect::<LabResult<_>>()?;
    for c in &infos {
        validate(c, d)?;
    }
    let mut cache = BTreeMap::new();
    let mut out = Vec::new();
    for c in &infos {
        let qs = match qs {
            Some(qs) => qs.to_vec(),
            None => default_qs(c.id, d)?,
        };
        for &q in &qs {
            FieldSpec::from_order(q as u64)?;
        }
        let rows = match c.kind {
            CheckKind::Exact => run_exact(&[c.id], d, &qs, opts)?,
            CheckKind::Structural => run_structural(c.id, d, &qs, opts)?,
            CheckKind::Inequality => run_inequalities(&[c.id], d, &qs, opts, &mut cache)?,
            CheckKind::Endpoint => run_endpoint(c.id, d, &qs, opts)?,
        };
        out.extend(rows);
    }
    Ok(out)
}

/// Runs all exact identities over the given orders in one pass per `q`.
pub fn verify_exact_suite(d: usize, qs: &[u32], opts: &VerifyOptions) -> LabResult<Vec<ReportRow>> {
    let ids: Vec<&str> = CHECKS
        .iter()
        .filter(|c| c.kind == CheckKind::Exact)
        .map(|c| c.id)
        .collect();
    run_exact(&ids, d, qs, opts)
}
