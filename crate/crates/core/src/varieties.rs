//! The cone, its dual cone, comparison quadrics, surface measures and the
//! kernels `K` and `M`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::harmonic::{inverse_fourier, FunctionOnSpace, MeasureSide, Space};
use crate::quadric::{cone_form_coords, gamma_form_coords};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarietyKind {
    /// `x_1^2 + ... + x_{d-2}^2 = x_{d-1} x_d`.
    Cone,
    /// `{m : Γ(m) = 0}`, including the origin.
    DualCone,
    /// `x_d = x_1^2 + ... + x_{d-1}^2`.
    Paraboloid,
    /// `x_1^2 + ... + x_d^2 = j`.
    Sphere(u32),
}

impl VarietyKind {
    fn min_dimension(self) -> usize {
        match self {
            VarietyKind::Cone | VarietyKind::DualCone => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Variety {
    kind: VarietyKind,
    space: Arc<Space>,
    points: Vec<usize>,
    mask: Vec<bool>,
}

/// Enumerates the zero set of `form` over all of `F_q^d`.
fn scan(space: &Space, form: impl Fn(&[FieldElement]) -> bool) -> (Vec<usize>, Vec<bool>) {
    let mut mask = vec![false; space.len()];
    let mut points = Vec::new();
    let mut coords = Vec::with_capacity(space.d());
    for (i, slot) in mask.iter_mut().enumerate() {
        space.codec().decode_into(i, &mut coords);
        if form(&coords) {
            *slot = true;
            points.push(i);
        }
    }
    (points, mask)
}

pub fn build_variety(space: &Arc<Space>, kind: VarietyKind) -> Result<Variety> {
    let d = space.d();
    let min = kind.min_dimension();
    if d < min {
        return Err(Error::DimensionTooSmall { d, min });
    }
    let field = space.field();
    let (points, mask) = match kind {
        VarietyKind::Cone => scan(space, |x| cone_form_coords(field, x).is_zero()),
        VarietyKind::DualCone => scan(space, |x| gamma_form_coords(field, x).is_zero()),
        VarietyKind::Paraboloid => scan(space, |x| {
            let s = x[..d - 1]
                .iter()
                .fold(FieldElement::ZERO, |acc, &c| field.add(acc, field.square(c)));
            s == x[d - 1]
        }),
        VarietyKind::Sphere(j) => {
            let j = field.element(j)?;
            scan(space, |x| {
                x.iter()
                    .fold(FieldElement::ZERO, |acc, &c| field.add(acc, field.square(c)))
                    == j
            })
        }
    };
    Ok(Variety {
        kind,
        space: space.clone(),
        points,
        mask,
    })
}

impl Variety {
    pub fn kind(&self) -> VarietyKind {
        self.kind
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    /// Sorted point indices.
    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn cardinality(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.mask[index]
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Position of a point in `points()`.
    pub fn position(&self, index: usize) -> Option<usize> {
        self.points.binary_search(&index).ok()
    }

    pub fn indicator(&self, side: MeasureSide) -> FunctionOnSpace {
        FunctionOnSpace::indicator(&self.space, side, &self.points)
    }

    /// Restricts a function to the variety, in point order.
    pub fn restrict(&self, f: &FunctionOnSpace) -> Vec<Complex64> {
        self.points.iter().map(|&i| f.get(i)).collect()
    }

    /// Extends values given on the variety by zero.
    pub fn extend(&self, values: &[Complex64], side: MeasureSide) -> Result<FunctionOnSpace> {
        if values.len() != self.points.len() {
            return Err(Error::LengthMismatch {
                expected: self.points.len(),
                found: values.len(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.space.len()];
        for (&i, &v) in self.points.iter().zip(values) {
            out[i] = v;
        }
        FunctionOnSpace::from_values(&self.space, side, out)
    }

    /// First index where `f` is nonzero off the variety.
    pub fn support_violation(&self, f: &FunctionOnSpace) -> Option<usize> {
        f.values()
            .iter()
            .enumerate()
            .find(|&(i, v)| !self.mask[i] && v.norm() != 0.0)
            .map(|(i, _)| i)
    }

    pub fn surface_measure(&self) -> Result<SurfaceMeasure> {
        SurfaceMeasure::new(self)
    }
}

/// The probability measure with mass `1/|V|` at each point of `V`.
#[derive(Debug, Clone)]
pub struct SurfaceMeasure {
    variety: Variety,
    point_mass: f64,
    density_on_dx: f64,
}

impl SurfaceMeasure {
    pub fn new(v: &Variety) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::EmptyVariety);
        }
        let n = v.cardinality() as f64;
        Ok(SurfaceMeasure {
            variety: v.clone(),
            point_mass: 1.0 / n,
            density_on_dx: v.space.volume() / n,
        })
    }

    pub fn variety(&self) -> &Variety {
        &self.variety
    }

    pub fn point_mass(&self) -> f64 {
        self.point_mass
    }

    pub fn density_on_dx(&self) -> f64 {
        self.density_on_dx
    }

    pub fn total_mass(&self) -> f64 {
        self.point_mass * self.variety.cardinality() as f64
    }

    /// `sigma(x) = (q^d / |V|) V(x)` as a function on `dx`.
    pub fn as_function(&self) -> FunctionOnSpace {
        self.variety
            .indicator(MeasureSide::SpaceDx)
            .scale(Complex64::new(self.density_on_dx, 0.0))
    }
}

fn require_cone(cone: &Variety) -> Result<()> {
    if cone.kind != VarietyKind::Cone {
        return Err(Error::BadParams("expected the cone".into()));
    }
    Ok(())
}

/// `K = sigma^v - delta_0`.
pub fn kernel_k(cone: &Variety) -> Result<FunctionOnSpace> {
    require_cone(cone)?;
    let sigma = cone.surface_measure()?.as_function();
    let mut values = inverse_fourier(&sigma)?.into_values();
    values[0] = Complex64::new(0.0, 0.0);
    FunctionOnSpace::from_values(cone.space(), MeasureSide::DualDm, values)
}

/// `M = C^v - (|C|/q^d) delta_0`.
pub fn kernel_m(cone: &Variety) -> Result<FunctionOnSpace> {
    require_cone(cone)?;
    let mut values = inverse_fourier(&cone.indicator(MeasureSide::SpaceDx))?.into_values();
    values[0] = Complex64::new(0.0, 0.0);
    FunctionOnSpace::from_values(cone.space(), MeasureSide::DualDm, values)
}

/// `(|V| / q^{d-1}, q^{(d+1)/2} max_{m != 0} |V^v(m)|)`.
pub fn regularity_report(v: &Variety) -> Result<(f64, f64)> {
    if v.is_empty() {
        return Err(Error::EmptyVariety);
    }
    let space = v.space();
    let q = space.q() as f64;
    let d = space.d() as f64;
    let size_ratio = v.cardinality() as f64 / q.powf(d - 1.0);
    let dual = inverse_fourier(&v.indicator(MeasureSide::SpaceDx))?;
    let max = dual.values()[1..]
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    Ok((size_ratio, q.powf((d + 1.0) / 2.0) * max))
}

/// Extremes of `|K(m)|` over `m != 0`, split by whether `Γ(m) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelProfile {
    pub gamma_zero_max: f64,
    pub gamma_zero_min: f64,
    pub gamma_nonzero_max: f64,
    pub gamma_nonzero_min: f64,
}

pub fn kernel_profile(k: &FunctionOnSpace) -> KernelProfile {
    let space = k.space();
    let field = space.field();
    let mut prof = KernelProfile {
        gamma_zero_max: 0.0,
        gamma_zero_min: f64::INFINITY,
        gamma_nonzero_max: 0.0,
        gamma_nonzero_min: f64::INFINITY,
    };
    let mut coords = Vec::with_capacity(space.d());
    for (m, v) in k.values().iter().enumerate().skip(1) {
        space.codec().decode_into(m, &mut coords);
        let a = v.norm();
        if gamma_form_coords(field, &coords).is_zero() {
            prof.gamma_zero_max = prof.gamma_zero_max.max(a);
            prof.gamma_zero_min = prof.gamma_zero_min.min(a);
        } else {
            prof.gamma_nonzero_max = prof.gamma_nonzero_max.max(a);
            prof.gamma_nonzero_min = prof.gamma_nonzero_min.min(a);
        }
    }
    prof
}
