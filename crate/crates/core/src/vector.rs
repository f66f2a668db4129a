//! Points of F_q^d and their dense integer encoding.

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};

/// Default cap on `q^d` for dense arrays.
pub const DEFAULT_POINT_LIMIT: usize = 1 << 25;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointVector {
    coords: Vec<FieldElement>,
}

impl PointVector {
    pub fn new(coords: Vec<FieldElement>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::DimensionTooSmall {
                d: coords.len(),
                min: 2,
            });
        }
        Ok(PointVector { coords })
    }

    pub fn from_indices(indices: &[u32]) -> Result<Self> {
        Self::new(indices.iter().map(|&i| FieldElement::new(i)).collect())
    }

    pub fn zero(d: usize) -> Self {
        PointVector {
            coords: vec![FieldElement::ZERO; d],
        }
    }

    pub fn d(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[FieldElement] {
        &self.coords
    }

    pub fn get(&self, i: usize) -> FieldElement {
        self.coords[i]
    }

    pub fn set(&mut self, i: usize, v: FieldElement) {
        self.coords[i] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, field: &FieldSpec, other: &PointVector) -> PointVector {
        PointVector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| field.add(a, b))
                .collect(),
        }
    }

    pub fn neg(&self, field: &FieldSpec) -> PointVector {
        PointVector {
            coords: self.coords.iter().map(|&a| field.neg(a)).collect(),
        }
    }

    pub fn sub(&self, field: &FieldSpec, other: &PointVector) -> PointVector {
        self.add(field, &other.neg(field))
    }

    pub fn scale(&self, field: &FieldSpec, s: FieldElement) -> PointVector {
        PointVector {
            coords: self.coords.iter().map(|&a| field.mul(s, a)).collect(),
        }
    }

    pub fn dot(&self, field: &FieldSpec, other: &PointVector) -> FieldElement {
        self.coords
            .iter()
            .zip(&other.coords)
            .fold(FieldElement::ZERO, |acc, (&a, &b)| {
                field.add(acc, field.mul(a, b))
            })
    }
}

/// Little-endian base-q encoding `index = x_1 + x_2 q + ... + x_d q^{d-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexCodec {
    q: usize,
    d: usize,
    len: usize,
}

impl IndexCodec {
    pub fn new(q: u32, d: usize) -> Result<Self> {
        Self::with_limit(q, d, DEFAULT_POINT_LIMIT)
    }

    pub fn with_limit(q: u32, d: usize, limit: usize) -> Result<Self> {
        let overflow = Error::Overflow {
            q: q as u64,
            d,
            limit,
        };
        let mut len = 1usize;
        for _ in 0..d {
            len = len.checked_mul(q as usize).ok_or(overflow.clone())?;
        }
        if len > limit {
            return Err(overflow);
        }
        Ok(IndexCodec {
            q: q as usize,
            d,
            len,
        })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of points, `q^d`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn encode(&self, x: &PointVector) -> Result<usize> {
        if x.d() != self.d {
            return Err(Error::LengthMismatch {
                expected: self.d,
                found: x.d(),
            });
        }
        let mut index = 0usize;
        for c in x.coords().iter().rev() {
            if c.index() as usize >= self.q {
                return Err(Error::BadParams(format!(
                    "coordinate {} out of range for q = {}",
                    c.index(),
                    self.q
                )));
            }
            index = index * self.q + c.index() as usize;
        }
        Ok(index)
    }

    pub fn decode(&self, index: usize) -> PointVector {
        let mut coords = Vec::with_capacity(self.d);
        self.decode_into(index, &mut coords);
        PointVector { coords }
    }

    pub fn decode_into(&self, mut index: usize, out: &mut Vec<FieldElement>) {
        out.clear();
        for _ in 0..self.d {
            out.push(FieldElement::new((index % self.q) as u32));
            index /= self.q;
        }
    }

    pub fn encode_coords(&self, coords: &[FieldElement]) -> usize {
        coords
            .iter()
            .rev()
            .fold(0, |acc, c| acc * self.q + c.index() as usize)
    }
}
