//! Seeded test-function families used as witnesses for operator ratios.

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::harmonic::{FunctionOnSpace, MeasureSide};
use crate::operators::{ConeOperator, Direction};

#[derive(Debug, Clone, PartialEq)]
pub enum TestFamily {
    /// `f = 1`; on the adjoint side, the constant 1 on the cone.
    Constant,
    /// Indicator of the origin.
    Delta,
    /// Indicator of a maximal subspace inside the cone.
    SubspaceIndicator,
    ConeIndicator,
    /// `count` independent random sets of the given size.
    RandomSet { size: usize, count: usize },
    /// `f = sum_i 2^{-i} E_i` with disjoint random `E_i`, `|E_i| = ceil(2^{exponent i})`.
    DyadicStep {
        levels: usize,
        exponent: f64,
        count: usize,
    },
    Custom {
        name: String,
        functions: Vec<FunctionOnSpace>,
    },
}

impl TestFamily {
    pub fn name(&self) -> String {
        match self {
            TestFamily::Constant => "constant".into(),
            TestFamily::Delta => "delta".into(),
            TestFamily::SubspaceIndicator => "subspace-indicator".into(),
            TestFamily::ConeIndicator => "cone-indicator".into(),
            TestFamily::RandomSet { size, .. } => format!("random-set-{size}"),
            TestFamily::DyadicStep { levels, .. } => format!("dyadic-{levels}"),
            TestFamily::Custom { name, .. } => name.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub id: String,
    pub function: FunctionOnSpace,
}

/// Sizes `ceil(2^{exponent i})` for `i = 0..levels`.
pub fn dyadic_sizes(levels: usize, exponent: f64) -> Vec<usize> {
    (0..levels)
        .map(|i| (exponent * i as f64).exp2().ceil() as usize)
        .collect()
}

/// Generates the family's functions; adjoint-side members are supported on
/// the cone. Output depends only on `(family, q, d, direction, seed)`.
pub fn generate_family(
    family: &TestFamily,
    op: &ConeOperator,
    direction: Direction,
    seed: u64,
) -> Result<Vec<FamilyMember>> {
    let space = op.space();
    let side = MeasureSide::SpaceDx;
    let on_cone = direction == Direction::Adjoint;
    let pool: Vec<usize> = if on_cone {
        op.cone().points().to_vec()
    } else {
        (0..space.len()).collect()
    };
    let name = family.name();
    let single = |f: FunctionOnSpace| {
        Ok(vec![FamilyMember {
            id: name.clone(),
            function: f,
        }])
    };
    let rng_for = |j: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(j as u64);
        rng
    };
    match family {
        TestFamily::Constant if on_cone => single(op.cone().indicator(side)),
        TestFamily::Constant => single(FunctionOnSpace::constant(
            space,
            side,
            Complex64::new(1.0, 0.0),
        )),
        TestFamily::Delta => single(FunctionOnSpace::delta(space, side)),
        TestFamily::SubspaceIndicator => single(FunctionOnSpace::indicator(
            space,
            side,
            op.subspace().points(),
        )),
        TestFamily::ConeIndicator => single(op.cone().indicator(side)),
        TestFamily::RandomSet { size, count } => {
            if *size == 0 || *size > pool.len() {
                return Err(Error::BadParams(format!(
                    "random set size {size} not in [1, {}]",
                    pool.len()
                )));
            }
            Ok((0..*count)
                .map(|j| {
                    let mut picked: Vec<usize> = sample(&mut rng_for(j), pool.len(), *size)
                        .into_iter()
                        .map(|k| pool[k])
                        .collect();
                    picked.sort_unstable();
                    FamilyMember {
                        id: format!("{name}-{j}"),
                        function: FunctionOnSpace::indicator(space, side, &picked),
                    }
                })
                .collect())
        }
        TestFamily::DyadicStep {
            levels,
            exponent,
            count,
        } => {
            if *levels == 0 || !exponent.is_finite() || *exponent < 1.0 {
                return Err(Error::BadParams(format!(
                    "dyadic family needs levels >= 1 and a finite exponent >= 1, got {levels}, {exponent}"
                )));
            }
            let sizes = dyadic_sizes(*levels, *exponent);
            let total: usize = sizes.iter().sum();
            if total > pool.len() {
                return Err(Error::BadParams(format!(
                    "dyadic levels need {total} points, only {} available",
                    pool.len()
                )));
            }
            Ok((0..*count)
                .map(|j| {
                    let order = sample(&mut rng_for(j), pool.len(), total).into_vec();
                    let mut values = vec![Complex64::new(0.0, 0.0); space.len()];
                    let mut offset = 0;
                    for (i, &s) in sizes.iter().enumerate() {
                        let v = Complex64::new((-(i as f64)).exp2(), 0.0);
                        for &k in &order[offset..offset + s] {
                            values[pool[k]] = v;
                        }
                        offset += s;
                    }
                    FamilyMember {
                        id: format!("{name}-{j}"),
                        function: FunctionOnSpace::from_values(space, side, values)
                            .expect("length matches"),
                    }
                })
                .collect())
        }
        TestFamily::Custom { functions, .. } => functions
            .iter()
            .enumerate()
            .map(|(j, f)| {
                if **f.space() != **space || f.side() != side {
                    return Err(Error::SpecMismatch);
                }
                if on_cone {
                    if let Some(index) = op.cone().support_violation(f) {
                        return Err(Error::SupportViolation { index });
                    }
                }
                Ok(FamilyMember {
                    id: format!("{name}-{j}"),
                    function: f.clone(),
                })
            })
            .collect(),
    }
}
