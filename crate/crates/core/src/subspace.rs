//! Totally isotropic subspaces of the cone form.
//!
//! A subspace lies in the cone iff it is totally isotropic for the cone form;
//! in odd characteristic that is equivalent to every basis vector being
//! isotropic and every pair of basis vectors being polar-orthogonal.

use std::ops::ControlFlow;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::harmonic::Space;
use crate::quadric::{cone_form_coords, cone_polar};
use crate::vector::PointVector;

#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: Vec<PointVector>,
    points: Vec<usize>,
}

impl Subspace {
    /// The span of linearly independent vectors, with all `q^k` points.
    pub fn span(space: &Space, basis: Vec<PointVector>) -> Result<Self> {
        let field = space.field();
        if rank(field, &basis) != basis.len() {
            return Err(Error::BadParams("basis is not linearly independent".into()));
        }
        let d = space.d();
        let k = basis.len();
        let q = field.q();
        let mut coeffs = vec![0u32; k];
        let mut points = Vec::with_capacity((q as usize).pow(k as u32));
        let mut acc = vec![FieldElement::ZERO; d];
        loop {
            acc.iter_mut().for_each(|c| *c = FieldElement::ZERO);
            for (b, &c) in basis.iter().zip(&coeffs) {
                let c = FieldElement::new(c);
                for (a, &x) in acc.iter_mut().zip(b.coords()) {
                    *a = field.add(*a, field.mul(c, x));
                }
            }
            points.push(space.codec().encode_coords(&acc));
            if !odometer(&mut coeffs, q) {
                break;
            }
        }
        points.sort_unstable();
        points.dedup();
        Ok(Subspace { basis, points })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[PointVector] {
        &self.basis
    }

    /// Sorted indices of all points in the span.
    pub fn points(&self) -> &[usize] {
        &self.points
    }

    /// True iff every point of the span satisfies the cone equation.
    pub fn lies_in_cone(&self, space: &Space) -> bool {
        let mut coords = Vec::with_capacity(space.d());
        self.points.iter().all(|&i| {
            space.codec().decode_into(i, &mut coords);
            cone_form_coords(space.field(), &coords).is_zero()
        })
    }
}

/// Outcome of [`max_subspace_in_cone`].
#[derive(Debug, Clone)]
pub struct SubspaceSearch {
    pub subspace: Subspace,
    /// Witt index of the cone form.
    pub predicted_max_dim: usize,
    /// Maximality was confirmed by enumerating every subspace one dimension up.
    pub exhaustive: bool,
    /// The enumeration was skipped because it would exceed the budget.
    pub budget_exceeded: bool,
}

fn odometer(digits: &mut [u32], base: u32) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

pub fn rank(field: &FieldSpec, vectors: &[PointVector]) -> usize {
    let mut rows: Vec<Vec<FieldElement>> = vectors.iter().map(|v| v.coords().to_vec()).collect();
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for col in 0..ncols {
        let Some(pivot) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, pivot);
        let inv = field.inv(rows[r][col]).expect("pivot is nonzero");
        let pivot_row: Vec<FieldElement> = rows[r].iter().map(|&x| field.mul(inv, x)).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let factor = row[col];
            for (x, &y) in row.iter_mut().zip(&pivot_row) {
                *x = field.sub(*x, field.mul(factor, y));
            }
        }
        rows[r] = pivot_row;
        r += 1;
    }
    r
}

pub fn is_totally_isotropic(field: &FieldSpec, basis: &[PointVector]) -> bool {
    basis.iter().enumerate().all(|(i, u)| {
        cone_form_coords(field, u.coords()).is_zero()
            && basis[i + 1..]
                .iter()
                .all(|v| cone_polar(field, u.coords(), v.coords()).is_zero())
    })
}

/// Witt index of `x_1^2 + ... + x_{d-2}^2 - x_{d-1} x_d`.
pub fn predicted_max_dim(field: &FieldSpec, d: usize) -> usize {
    let n = d - 2;
    let minus_one_square = field.eta(field.neg(FieldElement::ONE)) == 1;
    let squares_part = if n % 2 == 1 {
        (n - 1) / 2
    } else if minus_one_square || (n / 2) % 2 == 0 {
        n / 2
    } else {
        n / 2 - 1
    };
    1 + squares_part
}

/// Number of `k`-dimensional subspaces of `F_q^d`.
pub fn gaussian_binomial(q: u64, d: usize, k: usize) -> Option<u64> {
    if k > d {
        return Some(0);
    }
    let (mut num, mut den) = (1u128, 1u128);
    for i in 0..k {
        num = num.checked_mul((q as u128).checked_pow((d - i) as u32)? - 1)?;
        den = den.checked_mul((q as u128).checked_pow((i + 1) as u32)? - 1)?;
    }
    u64::try_from(num / den).ok()
}

/// Visits every `k`-dimensional subspace once, as its reduced row echelon basis.
pub fn for_each_rref_subspace(
    field: &FieldSpec,
    d: usize,
    k: usize,
    mut visit: impl FnMut(&[PointVector]) -> ControlFlow<()>,
) {
    if k == 0 || k > d {
        return;
    }
    let q = field.q();
    let mut pivots: Vec<usize> = (0..k).collect();
    loop {
        let free: Vec<(usize, usize)> = (0..k)
            .flat_map(|r| {
                let pivots = &pivots;
                (pivots[r] + 1..d)
                    .filter(move |c| !pivots.contains(c))
                    .map(move |c| (r, c))
            })
            .collect();
        let mut values = vec![0u32; free.len()];
        loop {
            let mut rows = vec![vec![FieldElement::ZERO; d]; k];
            for (r, &c) in pivots.iter().enumerate() {
                rows[r][c] = FieldElement::ONE;
            }
            for (&(r, c), &v) in free.iter().zip(&values) {
                rows[r][c] = FieldElement::new(v);
            }
            let basis: Vec<PointVector> = rows
                .into_iter()
                .map(|r| PointVector::new(r).expect("d >= 2"))
                .collect();
            if visit(&basis).is_break() {
                return;
            }
            if !odometer(&mut values, q) {
                break;
            }
        }
        // next combination of pivot columns
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if pivots[i] < d - k + i {
                break;
            }
            if i == 0 {
                return;
            }
        }
        pivots[i] += 1;
        for j in i + 1..k {
            pivots[j] = pivots[j - 1] + 1;
        }
    }
}

/// `(number of k-subspaces, number of them inside the cone)`.
pub fn count_isotropic_subspaces(field: &FieldSpec, d: usize, k: usize) -> (u64, u64) {
    let (mut total, mut inside) = (0u64, 0u64);
    for_each_rref_subspace(field, d, k, |basis| {
        total += 1;
        if is_totally_isotropic(field, basis) {
            inside += 1;
        }
        ControlFlow::Continue(())
    });
    (total, inside)
}

fn find_isotropic_subspace(field: &FieldSpec, d: usize, k: usize) -> Option<Vec<PointVector>> {
    let mut found = None;
    for_each_rref_subspace(field, d, k, |basis| {
        if is_totally_isotropic(field, basis) {
            found = Some(basis.to_vec());
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    found
}

fn unit(d: usize, i: usize, v: FieldElement) -> Vec<FieldElement> {
    let mut c = vec![FieldElement::ZERO; d];
    c[i] = v;
    c
}

/// A sum of two squares equal to `-1`.
fn two_squares_minus_one(field: &FieldSpec) -> (FieldElement, FieldElement) {
    let m1 = field.neg(FieldElement::ONE);
    field
        .elements()
        .find_map(|a| field.sqrt(field.sub(m1, field.square(a))).map(|b| (a, b)))
        .expect("every element of F_q is a sum of two squares")
}

/// Totally isotropic basis of dimension equal to the Witt index.
pub fn structured_isotropic_basis(field: &FieldSpec, d: usize) -> Vec<PointVector> {
    let mut basis = vec![unit(d, d - 2, FieldElement::ONE)];
    let n = d - 2;
    let m1 = field.neg(FieldElement::ONE);
    if let Some(i) = field.sqrt(m1) {
        for k in 0..n / 2 {
            let mut v = unit(d, 2 * k, FieldElement::ONE);
            v[2 * k + 1] = i;
            basis.push(v);
        }
    } else {
        let (a, b) = two_squares_minus_one(field);
        let mut start = 0;
        while start + 4 <= n {
            let mut v1 = vec![FieldElement::ZERO; d];
            v1[start] = a;
            v1[start + 1] = b;
            v1[start + 2] = FieldElement::ONE;
            let mut v2 = vec![FieldElement::ZERO; d];
            v2[start] = b;
            v2[start + 1] = field.neg(a);
            v2[start + 3] = FieldElement::ONE;
            basis.push(v1);
            basis.push(v2);
            start += 4;
        }
        if n - start == 3 {
            let mut v = vec![FieldElement::ZERO; d];
            v[start] = a;
            v[start + 1] = b;
            v[start + 2] = FieldElement::ONE;
            basis.push(v);
        }
    }
    basis
        .into_iter()
        .map(|c| PointVector::new(c).expect("d >= 3"))
        .collect()
}

/// Randomized greedy extension by isotropic, polar-orthogonal cone vectors.
pub fn greedy_isotropic(
    field: &FieldSpec,
    d: usize,
    seed: u64,
    restarts: usize,
    patience: usize,
) -> Vec<PointVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = field.q();
    let mut best: Vec<PointVector> = Vec::new();
    for _ in 0..restarts {
        let mut basis: Vec<PointVector> = Vec::new();
        let mut misses = 0;
        while misses < patience {
            let coords: Vec<FieldElement> = (0..d)
                .map(|_| FieldElement::new(rng.gen_range(0..q)))
                .collect();
            let ok = cone_form_coords(field, &coords).is_zero()
                && basis
                    .iter()
                    .all(|b| cone_polar(field, b.coords(), &coords).is_zero());
            let v = PointVector::new(coords).expect("d >= 3");
            if ok && !v.is_zero() {
                let mut extended = basis.clone();
                extended.push(v);
                if rank(field, &extended) == extended.len() {
                    basis = extended;
                    misses = 0;
                    continue;
                }
            }
            misses += 1;
        }
        if basis.len() > best.len() {
            best = basis;
        }
    }
    best
}

/// Largest subspace of the cone that the search can find and verify.
///
/// The structured construction reaches the Witt index; when the number of
/// subspaces one dimension larger is within `budget`, all of them are
/// enumerated, otherwise a seeded greedy search is run instead.
pub fn max_subspace_in_cone(space: &Arc<Space>, budget: u64) -> Result<SubspaceSearch> {
    let field = space.field();
    let d = space.d();
    if d < 3 {
        return Err(Error::DimensionTooSmall { d, min: 3 });
    }
    let predicted = predicted_max_dim(field, d);
    let mut basis = structured_isotropic_basis(field, d);
    let mut exhaustive = false;
    let mut budget_exceeded = false;
    loop {
        let k = basis.len() + 1;
        match gaussian_binomial(field.q() as u64, d, k) {
            Some(n) if n <= budget => match find_isotropic_subspace(field, d, k) {
                Some(b) => basis = b,
                None => {
                    exhaustive = true;
                    break;
                }
            },
            _ => {
                budget_exceeded = true;
                let patience = (budget.min(1 << 14) as usize).max(64);
                let g = greedy_isotropic(field, d, 0x5eed, 4, patience);
                if g.len() > basis.len() {
                    basis = g;
                }
                break;
            }
        }
    }
    let subspace = Subspace::span(space, basis)?;
    if !subspace.lies_in_cone(space) {
        return Err(Error::BadParams("subspace search produced a non-isotropic span".into()));
    }
    Ok(SubspaceSearch {
        subspace,
        predicted_max_dim: predicted,
        exhaustive,
        budget_exceeded,
    })
}
