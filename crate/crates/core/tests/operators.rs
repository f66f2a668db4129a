mod common;

use common::*;
use conelab_core::operators::{
    l2_opnorm, l2_opnorm_dense, refine_ratio, PowerIteration, RefineOptions,
};
use conelab_core::{
    best_ratio, generate_family, inverse_fourier, lp_norm, ratio, ConeOperator, Direction,
    Error, ExponentPair, FunctionOnSpace, MeasureSide, TestFamily,
};
use num_complex::Complex64;

const DX: MeasureSide = MeasureSide::SpaceDx;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// |C|^{-1} sum_{x in C} f(y - x) for y in C.
fn direct_restricted(op: &ConeOperator, f: &FunctionOnSpace) -> Vec<Complex64> {
    let s = op.space();
    let pts = op.cone().points();
    pts.iter()
        .map(|&y| {
            pts.iter().map(|&x| f.get(s.sub_index(y, x))).sum::<Complex64>() / pts.len() as f64
        })
        .collect()
}

/// (q^d/|C|^2) sum_{x in C} C(x - y) h(x).
fn direct_adjoint(op: &ConeOperator, h: &FunctionOnSpace) -> Vec<Complex64> {
    let s = op.space();
    let pts = op.cone().points();
    let n = pts.len() as f64;
    (0..s.len())
        .map(|y| {
            pts.iter()
                .filter(|&&x| op.cone().contains(s.sub_index(x, y)))
                .map(|&x| h.get(x))
                .sum::<Complex64>()
                * s.volume()
                / (n * n)
        })
        .collect()
}

fn random_on_cone(op: &ConeOperator, seed: u64) -> FunctionOnSpace {
    let vals = random_values(op.cone().cardinality(), seed);
    op.cone().extend(&vals, DX).unwrap()
}

fn l2_sigma_inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum::<Complex64>() / a.len() as f64
}

fn l2_dx_inner(a: &FunctionOnSpace, b: &FunctionOnSpace) -> Complex64 {
    a.values().iter().zip(b.values()).map(|(x, y)| x * y.conj()).sum::<Complex64>()
        / a.space().volume()
}

#[test]
fn restricted_operator_matches_direct_sum() {
    for (q, d) in [(3u64, 3usize), (3, 4), (5, 3)] {
        let op = ConeOperator::new(&space(q, d)).unwrap();
        for seed in 0..5 {
            let f = random_fn(op.space(), DX, seed);
            let fast = op.apply_restricted(&f).unwrap();
            assert!(max_diff(&fast, &direct_restricted(&op, &f)) < 1e-10);
        }
        let ones = FunctionOnSpace::constant(op.space(), DX, one());
        assert!(op.apply_restricted(&ones).unwrap().iter().all(|v| (v - one()).norm() < 1e-12));
        let delta = FunctionOnSpace::delta(op.space(), DX);
        let n = op.cone().cardinality() as f64;
        assert!(op
            .apply_restricted(&delta)
            .unwrap()
            .iter()
            .all(|v| (v.re - 1.0 / n).abs() < 1e-12 && v.im.abs() < 1e-12));
    }
}

#[test]
fn adjoint_matches_direct_sum_and_duality() {
    for (q, d) in [(3u64, 3usize), (3, 4), (5, 3)] {
        let op = ConeOperator::new(&space(q, d)).unwrap();
        for seed in 0..5 {
            let h = random_on_cone(&op, seed);
            let fast = op.apply_adjoint(&h).unwrap();
            assert!(max_diff(fast.values(), &direct_adjoint(&op, &h)) < 1e-9);
            let f = random_fn(op.space(), DX, 77 + seed);
            let lhs = l2_sigma_inner(&op.apply_restricted(&f).unwrap(), &op.cone().restrict(&h));
            let rhs = l2_dx_inner(&f, &fast);
            assert!((lhs - rhs).norm() < 1e-10);
        }
        let zero = FunctionOnSpace::zeros(op.space(), DX);
        assert_eq!(op.apply_adjoint(&zero).unwrap().max_abs(), 0.0);
        let ones = op.cone().indicator(DX);
        let a1 = op.apply_adjoint(&ones).unwrap();
        assert!(max_diff(a1.values(), &direct_adjoint(&op, &ones)) < 1e-9);
        let off = (0..op.space().len()).find(|&i| !op.cone().contains(i)).unwrap();
        let bad = FunctionOnSpace::indicator(op.space(), DX, &[off]);
        assert_eq!(op.apply_adjoint(&bad), Err(Error::SupportViolation { index: off }));
    }
}

#[test]
fn decompositions_reconstruct() {
    let op = ConeOperator::new(&space(3, 4)).unwrap();
    for seed in 0..10 {
        let f = random_fn(op.space(), DX, seed);
        assert!(op.decompose_forward(&f).unwrap().residual < 1e-10);
        let h = random_on_cone(&op, 500 + seed);
        let dec = op.decompose_adjoint(&h).unwrap();
        assert!(dec.residual < 1e-10);
    }
    let ones = FunctionOnSpace::constant(op.space(), DX, one());
    let dec = op.decompose_forward(&ones).unwrap();
    assert!(dec.oscillatory_part.iter().all(|v| v.norm() < 1e-12));
    let zero = FunctionOnSpace::zeros(op.space(), DX);
    let dec = op.decompose_adjoint(&zero).unwrap();
    assert_eq!(dec.kernel_part.max_abs(), 0.0);
    assert_eq!(dec.constant_part.max_abs(), 0.0);
}

#[test]
fn extension_identity() {
    for (q, d) in [(3u64, 4usize), (5, 3), (9, 3)] {
        let op = ConeOperator::new(&space(q, d)).unwrap();
        let sigma = op.measure().as_function();
        let n = op.cone().cardinality() as f64;
        for seed in 0..5 {
            let vals = random_values(op.cone().cardinality(), seed);
            let f = op.cone().extend(&vals, DX).unwrap();
            let lhs = lp_norm(&inverse_fourier(&f.mul(&sigma).unwrap()).unwrap(), 2.0).unwrap();
            let l2c = (vals.iter().map(|v| v.norm_sqr()).sum::<f64>() / n).sqrt();
            let rhs = op.space().volume().sqrt() / n.sqrt() * l2c;
            assert!((lhs - rhs).abs() < 1e-10 * rhs.max(1.0));
        }
    }
}

#[test]
fn linearity_and_scale_invariance() {
    let op = ConeOperator::new(&space(5, 3)).unwrap();
    let f = random_fn(op.space(), DX, 1);
    let g = random_fn(op.space(), DX, 2);
    let (a, b) = (Complex64::new(0.3, -1.2), Complex64::new(-2.0, 0.5));
    let combo = f.scale(a).add(&g.scale(b)).unwrap();
    let lhs = op.apply_restricted(&combo).unwrap();
    let af = op.apply_restricted(&f).unwrap();
    let ag = op.apply_restricted(&g).unwrap();
    let rhs: Vec<Complex64> = af.iter().zip(&ag).map(|(x, y)| a * x + b * y).collect();
    assert!(max_diff(&lhs, &rhs) < 1e-10);
    let pair = ExponentPair::from_fractions(2, 3, 1, 4).unwrap();
    let r1 = ratio(&op, "f", &f, pair, Direction::Forward).unwrap().ratio;
    let r2 = ratio(&op, "f", &f.scale(a), pair, Direction::Forward).unwrap().ratio;
    assert!((r1 - r2).abs() < 1e-12 * r1);
}

#[test]
fn ratio_examples() {
    let op = ConeOperator::new(&space(3, 4)).unwrap();
    let ones = FunctionOnSpace::constant(op.space(), DX, one());
    for (a, b, c, d) in [(0, 1, 0, 1), (1, 2, 1, 2), (3, 4, 1, 4), (1, 1, 0, 1)] {
        let pair = ExponentPair::from_fractions(a, b, c, d).unwrap();
        let r = ratio(&op, "one", &ones, pair, Direction::Forward).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-12);
    }
    let sup = ExponentPair::from_fractions(0, 1, 0, 1).unwrap();
    for seed in 0..10 {
        let f = random_fn(op.space(), DX, seed);
        assert!(ratio(&op, "f", &f, sup, Direction::Forward).unwrap().ratio <= 1.0 + 1e-12);
    }
    let zero = FunctionOnSpace::zeros(op.space(), DX);
    assert_eq!(
        ratio(&op, "z", &zero, sup, Direction::Forward),
        Err(Error::ZeroFunction)
    );
    assert!(ExponentPair::from_fractions(3, 2, 0, 1).is_err());
}

#[test]
fn l2_norm_two_ways() {
    for (q, d) in [(3u64, 3usize), (5, 3), (3, 4)] {
        let op = ConeOperator::new(&space(q, d)).unwrap();
        let power = l2_opnorm(&op, PowerIteration::default()).unwrap();
        let dense = l2_opnorm_dense(&op).unwrap();
        assert!((power - dense).abs() < 1e-8, "q={q} d={d}: {power} vs {dense}");
        assert!(power >= 1.0 - 1e-12);
        let half = ExponentPair::from_fractions(1, 2, 1, 2).unwrap();
        for seed in 0..10 {
            let f = random_fn(op.space(), DX, seed);
            assert!(ratio(&op, "f", &f, half, Direction::Forward).unwrap().ratio <= power + 1e-8);
        }
    }
    let op = ConeOperator::new(&space(9, 4)).unwrap();
    assert!(matches!(l2_opnorm_dense(&op), Err(Error::TooLarge { .. })));
}

#[test]
fn family_examples_and_determinism() {
    let op = ConeOperator::new(&space(5, 4)).unwrap();
    let delta = generate_family(&TestFamily::Delta, &op, Direction::Forward, 0).unwrap();
    assert_eq!(delta[0].function.support(), vec![0]);
    let cone = generate_family(&TestFamily::ConeIndicator, &op, Direction::Forward, 0).unwrap();
    let expected = op.cone().cardinality() as f64 / 625.0;
    assert!((lp_norm(&cone[0].function, 1.0).unwrap() - expected).abs() < 1e-15);
    let fam = TestFamily::DyadicStep { levels: 3, exponent: 2.0, count: 1 };
    let a = generate_family(&fam, &op, Direction::Forward, 7).unwrap();
    let b = generate_family(&fam, &op, Direction::Forward, 7).unwrap();
    assert_eq!(a[0].function, b[0].function);
    let vals = a[0].function.values();
    for (i, size) in [1usize, 4, 16].iter().enumerate() {
        let level = (-(i as f64)).exp2();
        assert_eq!(vals.iter().filter(|v| v.re == level).count(), *size);
    }
    let adj = generate_family(&fam, &op, Direction::Adjoint, 7).unwrap();
    assert!(op.cone().support_violation(&adj[0].function).is_none());
    let rs = TestFamily::RandomSet { size: 30, count: 3 };
    let sets = generate_family(&rs, &op, Direction::Adjoint, 1).unwrap();
    assert_eq!(sets.len(), 3);
    for m in &sets {
        assert_eq!(m.function.support().len(), 30);
        assert!(op.cone().support_violation(&m.function).is_none());
    }
    let bad = TestFamily::DyadicStep { levels: 20, exponent: 2.0, count: 1 };
    assert!(matches!(
        generate_family(&bad, &op, Direction::Forward, 1),
        Err(Error::BadParams(_))
    ));
    let h = generate_family(&TestFamily::SubspaceIndicator, &op, Direction::Adjoint, 0).unwrap();
    assert_eq!(h[0].function.support().len(), 25);
}

#[test]
fn best_ratio_and_refinement() {
    let op = ConeOperator::new(&space(3, 4)).unwrap();
    let pair = ExponentPair::from_fractions(3, 4, 1, 2).unwrap();
    let constant = generate_family(&TestFamily::Constant, &op, Direction::Forward, 0).unwrap();
    assert!((best_ratio(&op, &constant, pair, Direction::Forward).unwrap().ratio - 1.0).abs() < 1e-12);
    let mut members = constant;
    members.extend(generate_family(&TestFamily::Delta, &op, Direction::Forward, 0).unwrap());
    members.extend(generate_family(&TestFamily::ConeIndicator, &op, Direction::Forward, 0).unwrap());
    let best = best_ratio(&op, &members, pair, Direction::Forward).unwrap();
    for m in &members {
        assert!(ratio(&op, &m.id, &m.function, pair, Direction::Forward).unwrap().ratio <= best.ratio);
    }
    let start = &members[2].function;
    let base = ratio(&op, "c", start, pair, Direction::Forward).unwrap().ratio;
    let (_, refined) = refine_ratio(&op, start, pair, Direction::Forward, RefineOptions::default()).unwrap();
    assert!(refined >= base);
}
