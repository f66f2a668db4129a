#![allow(dead_code)]

use std::sync::Arc;

use conelab_core::{FieldSpec, FunctionOnSpace, MeasureSide, Space};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn space(q: u64, d: usize) -> Arc<Space> {
    Space::new(FieldSpec::from_order(q).unwrap(), d).unwrap()
}

pub fn random_values(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

pub fn random_fn(space: &Arc<Space>, side: MeasureSide, seed: u64) -> FunctionOnSpace {
    FunctionOnSpace::from_values(space, side, random_values(space.len(), seed)).unwrap()
}

/// Sum over m of chi(-m.x) g(m), one term at a time.
pub fn naive_hat(g: &FunctionOnSpace) -> Vec<Complex64> {
    let s = g.space();
    (0..s.len())
        .map(|x| {
            (0..s.len())
                .map(|m| s.character(x, m).conj() * g.get(m))
                .sum()
        })
        .collect()
}

pub fn naive_inverse(f: &FunctionOnSpace) -> Vec<Complex64> {
    let s = f.space();
    let n = s.volume();
    (0..s.len())
        .map(|m| {
            (0..s.len())
                .map(|x| s.character(x, m) * f.get(x))
                .sum::<Complex64>()
                / n
        })
        .collect()
}

/// q^{-d} sum_x f(y - x) h(x).
pub fn direct_convolve(f: &FunctionOnSpace, h: &FunctionOnSpace) -> Vec<Complex64> {
    let s = f.space();
    let n = s.volume();
    (0..s.len())
        .map(|y| {
            (0..s.len())
                .map(|x| f.get(s.sub_index(y, x)) * h.get(x))
                .sum::<Complex64>()
                / n
        })
        .collect()
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}
