//! Functions on `(F_q^d, dx)` and `(F_q^d, dm)`, the additive character,
//! Fourier transforms, convolution and weighted norms.

use std::f64::consts::PI;
use std::fmt;
use std::io::{BufRead, Write};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::varieties::Variety;
use crate::vector::{IndexCodec, PointVector, DEFAULT_POINT_LIMIT};

/// Which measure a function is integrated against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureSide {
    /// Normalized counting measure, weight `q^{-d}` per point.
    SpaceDx,
    /// Counting measure, weight 1 per point.
    DualDm,
}

impl MeasureSide {
    pub fn tag(self) -> &'static str {
        match self {
            MeasureSide::SpaceDx => "dx",
            MeasureSide::DualDm => "dm",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "dx" => Some(MeasureSide::SpaceDx),
            "dm" => Some(MeasureSide::DualDm),
            _ => None,
        }
    }
}

impl fmt::Display for MeasureSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// `F_q^d` together with the tables the fast transform needs.
pub struct Space {
    field: FieldSpec,
    codec: IndexCodec,
    /// `p`-th roots of unity, `roots[k] = exp(2 pi i k / p)`.
    roots: Vec<Complex64>,
    /// Maps a point to the `(Z/p)^{ed}` coordinates of its trace-dual.
    perm: Option<Vec<u32>>,
}

impl fmt::Debug for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Space")
            .field("field", &self.field)
            .field("d", &self.codec.d())
            .finish()
    }
}

impl PartialEq for Space {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.codec == other.codec
    }
}

impl Space {
    pub fn new(field: FieldSpec, d: usize) -> Result<Arc<Space>> {
        Self::with_limit(field, d, DEFAULT_POINT_LIMIT)
    }

    pub fn with_limit(field: FieldSpec, d: usize, limit: usize) -> Result<Arc<Space>> {
        if d < 1 {
            return Err(Error::DimensionTooSmall { d, min: 1 });
        }
        let codec = IndexCodec::with_limit(field.q(), d, limit)?;
        let p = field.p() as usize;
        let roots = (0..p)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / p as f64))
            .collect();
        let perm = (field.e() > 1).then(|| trace_dual_permutation(&field, &codec));
        Ok(Arc::new(Space {
            field,
            codec,
            roots,
            perm,
        }))
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn codec(&self) -> &IndexCodec {
        &self.codec
    }

    pub fn d(&self) -> usize {
        self.codec.d()
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    /// `q^d`.
    pub fn len(&self) -> usize {
        self.codec.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `q^d` as a float.
    pub fn volume(&self) -> f64 {
        self.codec.len() as f64
    }

    pub fn point(&self, index: usize) -> PointVector {
        self.codec.decode(index)
    }

    pub fn index_of(&self, x: &PointVector) -> Result<usize> {
        self.codec.encode(x)
    }

    /// Index of `-x`.
    pub fn negate_index(&self, index: usize) -> usize {
        let q = self.codec.q();
        let (mut rest, mut out, mut scale) = (index, 0usize, 1usize);
        for _ in 0..self.d() {
            let c = FieldElement::new((rest % q) as u32);
            out += self.field.neg(c).index() as usize * scale;
            rest /= q;
            scale *= q;
        }
        out
    }

    /// Index of `x - y`.
    pub fn sub_index(&self, x: usize, y: usize) -> usize {
        let q = self.codec.q();
        let (mut a, mut b, mut out, mut scale) = (x, y, 0usize, 1usize);
        for _ in 0..self.d() {
            let ca = FieldElement::new((a % q) as u32);
            let cb = FieldElement::new((b % q) as u32);
            out += self.field.sub(ca, cb).index() as usize * scale;
            a /= q;
            b /= q;
            scale *= q;
        }
        out
    }

    /// `chi(x . m)` for two point indices.
    pub fn character(&self, x: usize, m: usize) -> Complex64 {
        let q = self.codec.q();
        let (mut a, mut b) = (x, m);
        let mut acc = FieldElement::ZERO;
        for _ in 0..self.d() {
            let ca = FieldElement::new((a % q) as u32);
            let cb = FieldElement::new((b % q) as u32);
            acc = self.field.add(acc, self.field.mul(ca, cb));
            a /= q;
            b /= q;
        }
        self.roots[self.field.trace(acc) as usize]
    }
}

fn trace_dual_permutation(field: &FieldSpec, codec: &IndexCodec) -> Vec<u32> {
    let (p, e, q) = (field.p(), field.e() as usize, field.q() as usize);
    let basis: Vec<FieldElement> = (0..e).map(|a| FieldElement::new(p.pow(a as u32))).collect();
    let gram: Vec<Vec<u32>> = basis
        .iter()
        .map(|&a| basis.iter().map(|&b| field.trace(field.mul(a, b))).collect())
        .collect();
    let single: Vec<usize> = (0..q as u32)
        .map(|c| {
            let x = field.digits(FieldElement::new(c));
            let mut y = 0usize;
            for a in (0..e).rev() {
                let ya = (0..e).map(|b| gram[a][b] * x[b]).sum::<u32>() % p;
                y = y * p as usize + ya as usize;
            }
            y
        })
        .collect();
    let mut perm = vec![0u32; codec.len()];
    for (x, slot) in perm.iter_mut().enumerate() {
        let (mut rest, mut out, mut scale) = (x, 0usize, 1usize);
        for _ in 0..codec.d() {
            out += single[rest % q] * scale;
            rest /= q;
            scale *= q;
        }
        *slot = out as u32;
    }
    perm
}

/// The additive character `chi(a) = exp(2 pi i Tr(a) / p)`.
pub fn chi(field: &FieldSpec, a: FieldElement) -> Complex64 {
    let t = field.trace(a) as f64;
    Complex64::from_polar(1.0, 2.0 * PI * t / field.p() as f64)
}

/// A dense complex function on `F_q^d`, tagged with its measure.
#[derive(Debug, Clone)]
pub struct FunctionOnSpace {
    space: Arc<Space>,
    side: MeasureSide,
    values: Vec<Complex64>,
}

impl PartialEq for FunctionOnSpace {
    fn eq(&self, other: &Self) -> bool {
        *self.space == *other.space && self.side == other.side && self.values == other.values
    }
}

impl FunctionOnSpace {
    pub fn from_values(
        space: &Arc<Space>,
        side: MeasureSide,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                found: values.len(),
            });
        }
        Ok(FunctionOnSpace {
            space: space.clone(),
            side,
            values,
        })
    }

    pub fn from_real(space: &Arc<Space>, side: MeasureSide, values: &[f64]) -> Result<Self> {
        Self::from_values(
            space,
            side,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn zeros(space: &Arc<Space>, side: MeasureSide) -> Self {
        Self::constant(space, side, Complex64::new(0.0, 0.0))
    }

    pub fn constant(space: &Arc<Space>, side: MeasureSide, c: Complex64) -> Self {
        FunctionOnSpace {
            space: space.clone(),
            side,
            values: vec![c; space.len()],
        }
    }

    /// Indicator of a set of point indices.
    pub fn indicator(space: &Arc<Space>, side: MeasureSide, points: &[usize]) -> Self {
        let mut f = Self::zeros(space, side);
        for &i in points {
            f.values[i] = Complex64::new(1.0, 0.0);
        }
        f
    }

    /// `delta_0`.
    pub fn delta(space: &Arc<Space>, side: MeasureSide) -> Self {
        Self::indicator(space, side, &[0])
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    pub fn side(&self) -> MeasureSide {
        self.side
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, index: usize) -> Complex64 {
        self.values[index]
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|v| v * s)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        FunctionOnSpace {
            space: self.space.clone(),
            side: self.side,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if *self.space != *other.space {
            return Err(Error::SpecMismatch);
        }
        if self.side != other.side {
            return Err(Error::SideMismatch);
        }
        Ok(())
    }

    pub fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(FunctionOnSpace {
            space: self.space.clone(),
            side: self.side,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    /// Same values, relabelled to another measure side.
    pub fn with_side(&self, side: MeasureSide) -> Self {
        FunctionOnSpace {
            space: self.space.clone(),
            side,
            values: self.values.clone(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Integral against the tagged measure.
    pub fn integral(&self) -> Complex64 {
        let s: Complex64 = self.values.iter().sum();
        s * self.weight()
    }

    /// Weight of a single point under the tagged measure.
    pub fn weight(&self) -> f64 {
        match self.side {
            MeasureSide::SpaceDx => 1.0 / self.space.volume(),
            MeasureSide::DualDm => 1.0,
        }
    }

    /// Indices with nonzero value, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&i| self.values[i] != Complex64::new(0.0, 0.0))
            .collect()
    }

    /// Writes `p=..,e=..,d=..,side=..`, then `index,re,im` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let field = self.space.field();
        writeln!(
            w,
            "p={},e={},d={},side={}",
            field.p(),
            field.e(),
            self.space.d(),
            self.side
        )?;
        writeln!(w, "index,re,im")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{:?},{:?}", i, v.re, v.im)?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let parse_err = |msg: &str| Error::Parse(msg.to_string());
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| parse_err("missing header"))?
            .map_err(|e| Error::Parse(e.to_string()))?;
        let (mut p, mut e, mut d, mut side) = (None, None, None, None);
        for part in header.trim().split(',') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| parse_err("malformed header"))?;
            match k.trim() {
                "p" => p = v.trim().parse::<u64>().ok(),
                "e" => e = v.trim().parse::<u32>().ok(),
                "d" => d = v.trim().parse::<usize>().ok(),
                "side" => side = MeasureSide::from_tag(v.trim()),
                _ => return Err(parse_err("unknown header key")),
            }
        }
        let (p, e, d, side) = match (p, e, d, side) {
            (Some(p), Some(e), Some(d), Some(s)) => (p, e, d, s),
            _ => return Err(parse_err("incomplete header")),
        };
        let space = Space::new(FieldSpec::new(p, e)?, d)?;
        let columns = lines
            .next()
            .ok_or_else(|| parse_err("missing column header"))?
            .map_err(|e| Error::Parse(e.to_string()))?;
        if columns.trim() != "index,re,im" {
            return Err(parse_err("expected columns index,re,im"));
        }
        let mut values = vec![Complex64::new(0.0, 0.0); space.len()];
        let mut seen = vec![false; space.len()];
        for line in lines {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.trim().split(',');
            let mut next = || it.next().ok_or_else(|| parse_err("short row"));
            let i: usize = next()?.parse().map_err(|_| parse_err("bad index"))?;
            let re: f64 = next()?.parse().map_err(|_| parse_err("bad re"))?;
            let im: f64 = next()?.parse().map_err(|_| parse_err("bad im"))?;
            if i >= values.len() || seen[i] {
                return Err(parse_err("index out of range or repeated"));
            }
            seen[i] = true;
            values[i] = Complex64::new(re, im);
        }
        if seen.iter().any(|s| !s) {
            return Err(parse_err("missing rows"));
        }
        Self::from_values(&space, side, values)
    }
}

/// Length-`p` DFTs along each of the `e d` axes of `(Z/p)^{ed}`.
fn dft_axes(space: &Space, input: &[Complex64], inverse: bool) -> Vec<Complex64> {
    let p = space.field.p() as usize;
    let naxes = space.field.e() as usize * space.d();
    let w: Vec<Complex64> = space
        .roots
        .iter()
        .map(|&r| if inverse { r } else { r.conj() })
        .collect();
    let n = input.len();
    let mut src = input.to_vec();
    let mut dst = vec![Complex64::new(0.0, 0.0); n];
    let mut stride = 1usize;
    for _ in 0..naxes {
        let block = stride * p;
        if stride == 1 {
            for (sb, db) in src.chunks_exact(p).zip(dst.chunks_exact_mut(p)) {
                for (k, out) in db.iter_mut().enumerate() {
                    let mut acc = sb[0];
                    for t in 1..p {
                        acc += w[(k * t) % p] * sb[t];
                    }
                    *out = acc;
                }
            }
        } else {
            for (sb, db) in src.chunks_exact(block).zip(dst.chunks_exact_mut(block)) {
                for (k, out) in db.chunks_exact_mut(stride).enumerate() {
                    out.copy_from_slice(&sb[..stride]);
                    for t in 1..p {
                        let wk = w[(k * t) % p];
                        let row = &sb[t * stride..(t + 1) * stride];
                        for (o, &r) in out.iter_mut().zip(row) {
                            *o += wk * r;
                        }
                    }
                }
            }
        }
        std::mem::swap(&mut src, &mut dst);
        stride = block;
    }
    src
}

fn gather(space: &Space, g: Vec<Complex64>, scale: f64) -> Vec<Complex64> {
    match &space.perm {
        None if scale == 1.0 => g,
        None => g.into_iter().map(|v| v * scale).collect(),
        Some(perm) => perm.iter().map(|&y| g[y as usize] * scale).collect(),
    }
}

/// `g^(x) = sum_m chi(-m . x) g(m)`, from `dm` to `dx`.
pub fn fourier_hat(g: &FunctionOnSpace) -> Result<FunctionOnSpace> {
    if g.side != MeasureSide::DualDm {
        return Err(Error::WrongSide {
            expected: MeasureSide::DualDm,
            found: g.side,
        });
    }
    let raw = dft_axes(&g.space, &g.values, false);
    Ok(FunctionOnSpace {
        space: g.space.clone(),
        side: MeasureSide::SpaceDx,
        values: gather(&g.space, raw, 1.0),
    })
}

/// `f^v(m) = q^{-d} sum_x chi(m . x) f(x)`, from `dx` to `dm`.
pub fn inverse_fourier(f: &FunctionOnSpace) -> Result<FunctionOnSpace> {
    if f.side != MeasureSide::SpaceDx {
        return Err(Error::WrongSide {
            expected: MeasureSide::SpaceDx,
            found: f.side,
        });
    }
    let raw = dft_axes(&f.space, &f.values, true);
    Ok(FunctionOnSpace {
        space: f.space.clone(),
        side: MeasureSide::DualDm,
        values: gather(&f.space, raw, 1.0 / f.space.volume()),
    })
}

/// `(f * h)(y) = q^{-d} sum_x f(y - x) h(x)`.
pub fn convolve(f: &FunctionOnSpace, h: &FunctionOnSpace) -> Result<FunctionOnSpace> {
    f.check_compatible(h)?;
    if f.side != MeasureSide::SpaceDx {
        return Err(Error::WrongSide {
            expected: MeasureSide::SpaceDx,
            found: f.side,
        });
    }
    let product = inverse_fourier(f)?.mul(&inverse_fourier(h)?)?;
    fourier_hat(&product)
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        Err(Error::BadExponent(p))
    } else {
        Ok(())
    }
}

/// `(weight * sum |v|^p)^{1/p}`, or `max |v|` when `p` is infinite.
pub fn weighted_norm<'a>(
    values: impl IntoIterator<Item = &'a Complex64>,
    weight: f64,
    p: f64,
) -> Result<f64> {
    check_exponent(p)?;
    let it = values.into_iter();
    if p.is_infinite() {
        return Ok(it.map(|v| v.norm()).fold(0.0, f64::max));
    }
    let s: f64 = if p == 2.0 {
        it.map(|v| v.norm_sqr()).sum()
    } else if p == 1.0 {
        it.map(|v| v.norm()).sum()
    } else {
        it.map(|v| v.norm().powf(p)).sum()
    };
    Ok((weight * s).powf(1.0 / p))
}

/// `L^p` norm with respect to the function's own measure.
pub fn lp_norm(f: &FunctionOnSpace, p: f64) -> Result<f64> {
    weighted_norm(&f.values, f.weight(), p)
}

/// `L^r(V, sigma)` norm of values given on the points of `V`, in order.
pub fn surface_norm_values(values: &[Complex64], r: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyVariety);
    }
    weighted_norm(values, 1.0 / values.len() as f64, r)
}

/// `(|V|^{-1} sum_{x in V} |f(x)|^r)^{1/r}`.
pub fn surface_norm(f: &FunctionOnSpace, v: &Variety, r: f64) -> Result<f64> {
    if v.is_empty() {
        return Err(Error::EmptyVariety);
    }
    if **f.space() != **v.space() {
        return Err(Error::SpecMismatch);
    }
    let restricted: Vec<Complex64> = v.points().iter().map(|&i| f.values[i]).collect();
    surface_norm_values(&restricted, r)
}
