//! The cone form, its dual form, and cone membership.

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::vector::PointVector;

fn require_d3(d: usize) -> Result<()> {
    if d < 3 {
        Err(Error::DimensionTooSmall { d, min: 3 })
    } else {
        Ok(())
    }
}

fn sum_of_squares(field: &FieldSpec, xs: &[FieldElement]) -> FieldElement {
    xs.iter()
        .fold(FieldElement::ZERO, |acc, &x| field.add(acc, field.square(x)))
}

/// `Q(x) = x_1^2 + ... + x_{d-2}^2 - x_{d-1} x_d`, so that `C = {Q = 0}`.
pub fn cone_form_coords(field: &FieldSpec, x: &[FieldElement]) -> FieldElement {
    let d = x.len();
    let s = sum_of_squares(field, &x[..d - 2]);
    field.sub(s, field.mul(x[d - 2], x[d - 1]))
}

/// `Γ(ξ) = ξ_1^2 + ... + ξ_{d-2}^2 - 4 ξ_{d-1} ξ_d`.
pub fn gamma_form_coords(field: &FieldSpec, xi: &[FieldElement]) -> FieldElement {
    let d = xi.len();
    let s = sum_of_squares(field, &xi[..d - 2]);
    let four = field.from_int(4);
    field.sub(s, field.mul(four, field.mul(xi[d - 2], xi[d - 1])))
}

pub fn cone_form(field: &FieldSpec, x: &PointVector) -> Result<FieldElement> {
    require_d3(x.d())?;
    Ok(cone_form_coords(field, x.coords()))
}

pub fn gamma_form(field: &FieldSpec, xi: &PointVector) -> Result<FieldElement> {
    require_d3(xi.d())?;
    Ok(gamma_form_coords(field, xi.coords()))
}

pub fn cone_contains(field: &FieldSpec, x: &PointVector) -> Result<bool> {
    Ok(cone_form(field, x)?.is_zero())
}

/// Polar form `Q(x + y) - Q(x) - Q(y)` of the cone form.
pub fn cone_polar(field: &FieldSpec, x: &[FieldElement], y: &[FieldElement]) -> FieldElement {
    let d = x.len();
    let mut acc = FieldElement::ZERO;
    for i in 0..d - 2 {
        acc = field.add(acc, field.mul(x[i], y[i]));
    }
    acc = field.add(acc, acc);
    let cross = field.add(
        field.mul(x[d - 2], y[d - 1]),
        field.mul(y[d - 2], x[d - 1]),
    );
    field.sub(acc, cross)
}
