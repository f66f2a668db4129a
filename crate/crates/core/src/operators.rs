//! The restricted averaging operator `A_C f = (f * sigma)|_C`, its adjoint,
//! the kernel decompositions, operator ratios and the `L^2 -> L^2` norm.

use std::fmt;
use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::families::FamilyMember;
use crate::harmonic::{
    fourier_hat, inverse_fourier, lp_norm, surface_norm_values, FunctionOnSpace, MeasureSide,
    Space,
};
use crate::subspace::{structured_isotropic_basis, Subspace};
use crate::varieties::{build_variety, kernel_k, SurfaceMeasure, Variety, VarietyKind};

/// Largest `q^d` for which the dense matrix of `A_C` is formed.
pub const DENSE_LIMIT: usize = 4096;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// The cone over a given space with its measure and kernel precomputed.
pub struct ConeOperator {
    space: Arc<Space>,
    cone: Variety,
    measure: SurfaceMeasure,
    kernel: FunctionOnSpace,
    sigma_dual: FunctionOnSpace,
    subspace: OnceLock<Subspace>,
}

impl fmt::Debug for ConeOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConeOperator")
            .field("space", &self.space)
            .field("cone_size", &self.cone.cardinality())
            .finish()
    }
}

#[derive(Debug, Clone)]
pub struct ForwardDecomposition {
    /// `f * 1` on the cone (a constant).
    pub constant_part: Vec<Complex64>,
    /// `f * K^` on the cone.
    pub oscillatory_part: Vec<Complex64>,
    /// `max |A_C f - f * 1 - f * K^|` over the cone.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct AdjointDecomposition {
    /// `(q^{2d}/|C|^2) h * M^`.
    pub kernel_part: FunctionOnSpace,
    /// `(q^d/|C|) h * 1`.
    pub constant_part: FunctionOnSpace,
    /// `max |A_C^* h - kernel_part - constant_part|`.
    pub residual: f64,
}

impl ConeOperator {
    pub fn new(space: &Arc<Space>) -> Result<Self> {
        let cone = build_variety(space, VarietyKind::Cone)?;
        let measure = cone.surface_measure()?;
        let kernel = kernel_k(&cone)?;
        let mut sigma_dual = kernel.clone().into_values();
        sigma_dual[0] = c(1.0);
        let sigma_dual = FunctionOnSpace::from_values(space, MeasureSide::DualDm, sigma_dual)?;
        Ok(ConeOperator {
            space: space.clone(),
            cone,
            measure,
            kernel,
            sigma_dual,
            subspace: OnceLock::new(),
        })
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    pub fn cone(&self) -> &Variety {
        &self.cone
    }

    pub fn measure(&self) -> &SurfaceMeasure {
        &self.measure
    }

    /// `K = sigma^v - delta_0`.
    pub fn kernel_k(&self) -> &FunctionOnSpace {
        &self.kernel
    }

    /// `M = (|C|/q^d) K`.
    pub fn kernel_m(&self) -> FunctionOnSpace {
        self.kernel.scale(c(self.cone_fraction()))
    }

    /// `|C| / q^d`.
    pub fn cone_fraction(&self) -> f64 {
        self.cone.cardinality() as f64 / self.space.volume()
    }

    /// A maximal totally isotropic subspace, built once.
    pub fn subspace(&self) -> &Subspace {
        self.subspace.get_or_init(|| {
            let basis = structured_isotropic_basis(self.space.field(), self.space.d());
            Subspace::span(&self.space, basis).expect("structured basis is independent")
        })
    }

    fn check_dx(&self, f: &FunctionOnSpace) -> Result<()> {
        if **f.space() != *self.space {
            return Err(Error::SpecMismatch);
        }
        if f.side() != MeasureSide::SpaceDx {
            return Err(Error::SideMismatch);
        }
        Ok(())
    }

    fn multiply_hat(&self, f: &FunctionOnSpace, g: &FunctionOnSpace) -> Result<FunctionOnSpace> {
        self.check_dx(f)?;
        fourier_hat(&inverse_fourier(f)?.mul(g)?)
    }

    /// `f * sigma` on all of `F_q^d`.
    pub fn average(&self, f: &FunctionOnSpace) -> Result<FunctionOnSpace> {
        self.multiply_hat(f, &self.sigma_dual)
    }

    /// `A_C f`, listed in the order of `cone().points()`.
    pub fn apply_restricted(&self, f: &FunctionOnSpace) -> Result<Vec<Complex64>> {
        Ok(self.cone.restrict(&self.average(f)?))
    }

    /// `f * K^` on all of `F_q^d`.
    pub fn star_k_hat(&self, f: &FunctionOnSpace) -> Result<FunctionOnSpace> {
        self.multiply_hat(f, &self.kernel)
    }

    /// `f * M^ = (|C|/q^d) f * K^`.
    pub fn star_m_hat(&self, f: &FunctionOnSpace) -> Result<FunctionOnSpace> {
        Ok(self.star_k_hat(f)?.scale(c(self.cone_fraction())))
    }

    fn check_support(&self, h: &FunctionOnSpace) -> Result<()> {
        self.check_dx(h)?;
        match self.cone.support_violation(h) {
            Some(index) => Err(Error::SupportViolation { index }),
            None => Ok(()),
        }
    }

    /// `A_C^* h = (q^{2d}/|C|^2) h * C` for `h` supported on the cone.
    pub fn apply_adjoint(&self, h: &FunctionOnSpace) -> Result<FunctionOnSpace> {
        self.check_support(h)?;
        Ok(self.average(h)?.scale(c(1.0 / self.cone_fraction())))
    }

    /// As [`apply_adjoint`](Self::apply_adjoint), for values listed on the cone.
    pub fn apply_adjoint_values(&self, h: &[Complex64]) -> Result<FunctionOnSpace> {
        self.apply_adjoint(&self.cone.extend(h, MeasureSide::SpaceDx)?)
    }

    pub fn decompose_forward(&self, f: &FunctionOnSpace) -> Result<ForwardDecomposition> {
        self.check_dx(f)?;
        let mean = f.integral();
        let n = self.cone.cardinality();
        let constant_part = vec![mean; n];
        let oscillatory_part = self.cone.restrict(&self.star_k_hat(f)?);
        let full = self.apply_restricted(f)?;
        let residual = (0..n)
            .map(|i| (full[i] - constant_part[i] - oscillatory_part[i]).norm())
            .fold(0.0, f64::max);
        Ok(ForwardDecomposition {
            constant_part,
            oscillatory_part,
            residual,
        })
    }

    pub fn decompose_adjoint(&self, h: &FunctionOnSpace) -> Result<AdjointDecomposition> {
        self.check_support(h)?;
        let frac = self.cone_fraction();
        let kernel_part = self.star_m_hat(h)?.scale(c(1.0 / (frac * frac)));
        let constant_part =
            FunctionOnSpace::constant(&self.space, MeasureSide::SpaceDx, h.integral() / frac);
        let full = self.apply_adjoint(h)?;
        let residual = full.max_abs_diff(&kernel_part.add(&constant_part)?);
        Ok(AdjointDecomposition {
            kernel_part,
            constant_part,
            residual,
        })
    }
}

/// A point `(1/p, 1/r)` of the unit square, held exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExponentPair {
    pub inv_p: Ratio<i64>,
    pub inv_r: Ratio<i64>,
}

impl ExponentPair {
    pub fn new(inv_p: Ratio<i64>, inv_r: Ratio<i64>) -> Result<Self> {
        let unit = |x: &Ratio<i64>| *x >= Ratio::zero() && *x <= Ratio::one();
        if !unit(&inv_p) || !unit(&inv_r) {
            return Err(Error::BadParams(format!(
                "exponent pair ({inv_p}, {inv_r}) is outside [0,1]^2"
            )));
        }
        Ok(ExponentPair { inv_p, inv_r })
    }

    pub fn from_fractions(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if b == 0 || d == 0 {
            return Err(Error::BadParams("zero denominator".into()));
        }
        Self::new(Ratio::new(a, b), Ratio::new(c, d))
    }

    fn exponent(inv: Ratio<i64>) -> f64 {
        if inv.is_zero() {
            f64::INFINITY
        } else {
            *inv.denom() as f64 / *inv.numer() as f64
        }
    }

    /// `p`, infinite when `1/p = 0`.
    pub fn p(&self) -> f64 {
        Self::exponent(self.inv_p)
    }

    pub fn r(&self) -> f64 {
        Self::exponent(self.inv_r)
    }

    /// `p' = p/(p-1)`.
    pub fn p_conjugate(&self) -> f64 {
        Self::exponent(Ratio::one() - self.inv_p)
    }

    /// `r' = r/(r-1)`.
    pub fn r_conjugate(&self) -> f64 {
        Self::exponent(Ratio::one() - self.inv_r)
    }
}

impl fmt::Display for ExponentPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.inv_p, self.inv_r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// `||A_C f||_{L^r(C, sigma)} / ||f||_{L^p(dx)}`.
    Forward,
    /// `||A_C^* h||_{L^{p'}(dx)} / ||h||_{L^{r'}(C, sigma)}`.
    Adjoint,
}

impl Direction {
    pub fn tag(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Adjoint => "adjoint",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioResult {
    pub q: u32,
    pub d: usize,
    pub family_id: String,
    pub pair: ExponentPair,
    pub direction: Direction,
    pub ratio: f64,
}

fn ratio_value(
    op: &ConeOperator,
    f: &FunctionOnSpace,
    pair: ExponentPair,
    direction: Direction,
) -> Result<f64> {
    let (num, den) = match direction {
        Direction::Forward => {
            let den = lp_norm(f, pair.p())?;
            if den == 0.0 {
                return Err(Error::ZeroFunction);
            }
            (surface_norm_values(&op.apply_restricted(f)?, pair.r())?, den)
        }
        Direction::Adjoint => {
            let den = surface_norm_values(&op.cone.restrict(f), pair.r_conjugate())?;
            if den == 0.0 {
                return Err(Error::ZeroFunction);
            }
            (lp_norm(&op.apply_adjoint(f)?, pair.p_conjugate())?, den)
        }
    };
    Ok(num / den)
}

/// Operator ratio of one test function at one exponent pair.
pub fn ratio(
    op: &ConeOperator,
    id: &str,
    f: &FunctionOnSpace,
    pair: ExponentPair,
    direction: Direction,
) -> Result<RatioResult> {
    Ok(RatioResult {
        q: op.space.q(),
        d: op.space.d(),
        family_id: id.to_string(),
        pair,
        direction,
        ratio: ratio_value(op, f, pair, direction)?,
    })
}

/// Largest ratio over a list of test functions; ties keep the first.
pub fn best_ratio(
    op: &ConeOperator,
    members: &[FamilyMember],
    pair: ExponentPair,
    direction: Direction,
) -> Result<RatioResult> {
    let mut best: Option<RatioResult> = None;
    for m in members {
        let r = ratio(op, &m.id, &m.function, pair, direction)?;
        if best.as_ref().is_none_or(|b| r.ratio > b.ratio) {
            best = Some(r);
        }
    }
    best.ok_or_else(|| Error::BadParams("empty family".into()))
}

#[derive(Debug, Clone, Copy)]
pub struct PowerIteration {
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for PowerIteration {
    fn default() -> Self {
        PowerIteration {
            max_iter: 2000,
            tol: 1e-13,
            seed: 1,
        }
    }
}

/// `||A_C||_{L^2(dx) -> L^2(C, sigma)}` by power iteration on `A_C^* A_C`.
pub fn l2_opnorm(op: &ConeOperator, opts: PowerIteration) -> Result<f64> {
    let space = &op.space;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let values = (0..space.len())
        .map(|_| c(rng.gen_range(-1.0..1.0)))
        .collect();
    let mut f = FunctionOnSpace::from_values(space, MeasureSide::SpaceDx, values)?;
    f = f.scale(c(1.0 / lp_norm(&f, 2.0)?));
    let mut lambda = 0.0;
    for _ in 0..opts.max_iter {
        let g = op.apply_adjoint_values(&op.apply_restricted(&f)?)?;
        let next: f64 = g
            .values()
            .iter()
            .zip(f.values())
            .map(|(a, b)| (a * b.conj()).re)
            .sum::<f64>()
            / space.volume();
        let norm = lp_norm(&g, 2.0)?;
        if norm == 0.0 {
            return Ok(0.0);
        }
        f = g.scale(c(1.0 / norm));
        let done = (next - lambda).abs() <= opts.tol * next.abs();
        lambda = next;
        if done {
            break;
        }
    }
    Ok(lambda.max(0.0).sqrt())
}

/// The same norm from the singular values of the dense matrix
/// `B[y, z] = 1_C(y - z)`, `y` in `C`, `z` in `F_q^d`.
pub fn l2_opnorm_dense(op: &ConeOperator) -> Result<f64> {
    let space = &op.space;
    let n = space.len();
    let rows = op.cone.cardinality();
    if n > DENSE_LIMIT {
        return Err(Error::TooLarge { rows, cols: n });
    }
    let points = op.cone.points();
    let b = DMatrix::<f64>::from_fn(rows, n, |i, z| {
        if op.cone.contains(space.sub_index(points[i], z)) {
            1.0
        } else {
            0.0
        }
    });
    let smax = b.singular_values().max();
    let card = rows as f64;
    Ok(space.volume().sqrt() * card.powf(-1.5) * smax)
}

#[derive(Debug, Clone, Copy)]
pub struct RefineOptions {
    pub steps: usize,
    pub step: f64,
    pub seed: u64,
}

impl Default for RefineOptions {
    fn default() -> Self {
        RefineOptions {
            steps: 200,
            step: 0.1,
            seed: 1,
        }
    }
}

/// Coordinate-wise multiplicative ascent on the ratio, starting from `f`.
pub fn refine_ratio(
    op: &ConeOperator,
    f: &FunctionOnSpace,
    pair: ExponentPair,
    direction: Direction,
    opts: RefineOptions,
) -> Result<(FunctionOnSpace, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let support = f.support();
    if support.is_empty() {
        return Err(Error::ZeroFunction);
    }
    let mut best = f.clone().into_values();
    let mut best_ratio = ratio_value(op, f, pair, direction)?;
    for _ in 0..opts.steps {
        let i = support[rng.gen_range(0..support.len())];
        for factor in [1.0 + opts.step, 1.0 - opts.step] {
            let mut trial = best.clone();
            trial[i] *= factor;
            let g = FunctionOnSpace::from_values(&op.space, f.side(), trial)?;
            let r = ratio_value(op, &g, pair, direction)?;
            if r > best_ratio {
                best_ratio = r;
                best = g.into_values();
                break;
            }
        }
    }
    Ok((
        FunctionOnSpace::from_values(&op.space, f.side(), best)?,
        best_ratio,
    ))
}
