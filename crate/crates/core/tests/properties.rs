mod common;

use common::*;
use conelab_core::field::FieldElement;
use conelab_core::{
    convolve, fourier_hat, inverse_fourier, lp_norm, ratio, ConeOperator, Direction,
    ExponentPair, FieldSpec, FunctionOnSpace, IndexCodec, MeasureSide,
};
use num_complex::Complex64;
use proptest::prelude::*;

const DX: MeasureSide = MeasureSide::SpaceDx;
const ORDERS: [u64; 8] = [3, 5, 7, 9, 11, 25, 27, 49];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_laws(qi in 0usize..ORDERS.len(), a in 0u32..1000, b in 0u32..1000, c in 0u32..1000) {
        let f = FieldSpec::from_order(ORDERS[qi]).unwrap();
        let q = f.q();
        let (a, b, c) = (FieldElement::new(a % q), FieldElement::new(b % q), FieldElement::new(c % q));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        prop_assert_eq!(f.pow(a, q as u64), a);
        prop_assert_eq!(f.eta(f.mul(a, b)), f.eta(a) * f.eta(b));
        prop_assert_eq!(f.trace(f.pow(a, f.p() as u64)), f.trace(a));
    }

    #[test]
    fn codec_roundtrip(qi in 0usize..ORDERS.len(), d in 2usize..5, raw in any::<u64>()) {
        let codec = IndexCodec::new(ORDERS[qi] as u32, d).unwrap();
        let i = (raw % codec.len() as u64) as usize;
        prop_assert_eq!(codec.encode(&codec.decode(i)).unwrap(), i);
    }

    #[test]
    fn transform_identities(qi in 0usize..3, d in 2usize..4, seed in any::<u64>()) {
        let q = [3u64, 5, 9][qi];
        let s = space(q, d);
        let f = random_fn(&s, DX, seed);
        let h = random_fn(&s, DX, seed ^ 0xabcdef);
        let fv = inverse_fourier(&f).unwrap();
        prop_assert!(fourier_hat(&fv).unwrap().max_abs_diff(&f) <= 1e-9 * f.max_abs());
        let (l, r) = (lp_norm(&f, 2.0).unwrap(), lp_norm(&fv, 2.0).unwrap());
        prop_assert!((l - r).abs() <= 1e-10 * l);
        let lhs = inverse_fourier(&convolve(&f, &h).unwrap()).unwrap();
        let rhs = fv.mul(&inverse_fourier(&h).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn duality_and_scale_invariance(qi in 0usize..3, seed in any::<u64>(), re in -3.0f64..3.0, im in 0.1f64..3.0) {
        let (q, d) = [(3u64, 3usize), (3, 4), (5, 3)][qi];
        let op = ConeOperator::new(&space(q, d)).unwrap();
        let f = random_fn(op.space(), DX, seed);
        let hv = random_values(op.cone().cardinality(), seed.wrapping_add(1));
        let af = op.apply_restricted(&f).unwrap();
        let lhs: Complex64 = af.iter().zip(&hv).map(|(x, y)| x * y.conj()).sum::<Complex64>()
            / hv.len() as f64;
        let ah = op.apply_adjoint_values(&hv).unwrap();
        let rhs: Complex64 = f.values().iter().zip(ah.values()).map(|(x, y)| x * y.conj()).sum::<Complex64>()
            / op.space().volume();
        prop_assert!((lhs - rhs).norm() <= 1e-10);
        let pair = ExponentPair::from_fractions(3, 5, 1, 3).unwrap();
        let alpha = Complex64::new(re, im);
        for dir in [Direction::Forward, Direction::Adjoint] {
            let g = if dir == Direction::Adjoint { op.cone().extend(&hv, DX).unwrap() } else { f.clone() };
            let r1 = ratio(&op, "g", &g, pair, dir).unwrap().ratio;
            let r2 = ratio(&op, "g", &g.scale(alpha), pair, dir).unwrap().ratio;
            prop_assert!((r1 - r2).abs() <= 1e-10 * r1);
        }
    }

    #[test]
    fn cone_is_symmetric(qi in 0usize..4, raw in any::<u64>()) {
        let (q, d) = [(3u64, 4usize), (5, 4), (9, 3), (7, 3)][qi];
        let s = space(q, d);
        let op = ConeOperator::new(&s).unwrap();
        let x = (raw % s.len() as u64) as usize;
        prop_assert_eq!(op.cone().contains(x), op.cone().contains(s.negate_index(x)));
        let f = FunctionOnSpace::indicator(&s, DX, &[x]);
        prop_assert!(lp_norm(&f, 1.0).unwrap() > 0.0);
    }
}
