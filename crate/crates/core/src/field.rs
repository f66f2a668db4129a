//! Arithmetic in F_q for odd prime powers q = p^e.
//!
//! Elements are dense indices in `[0, q)`: the index of a residue
//! `c_0 + c_1 x + ... + c_{e-1} x^{e-1}` is `c_0 + c_1 p + ... + c_{e-1} p^{e-1}`.
//! Index 0 is zero and index 1 is one. Multiplication goes through
//! discrete-log tables built from a primitive element, so every table is
//! `O(q)` in size.

use std::fmt;

use crate::error::{Error, Result};

/// Largest field order for which tables are built.
pub const MAX_FIELD_ORDER: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub const fn new(index: u32) -> Self {
        FieldElement(index)
    }

    pub const fn index(self) -> u32 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A concrete finite field of odd order with precomputed lookup tables.
#[derive(Clone)]
pub struct FieldSpec {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    inv: Vec<u32>,
    neg: Vec<u32>,
    trace: Vec<u32>,
    eta: Vec<i8>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u64;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// Splits `q` into `(p, e)` with `q = p^e`, `p` prime.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let (mut rest, mut e) = (q, 0u32);
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

impl FieldSpec {
    /// Builds F_{p^e} using the lexicographically smallest monic irreducible
    /// modulus, with coefficients compared from the constant term upwards.
    pub fn new(p: u64, e: u32) -> Result<Self> {
        if e < 1 {
            return Err(Error::DegreeZero);
        }
        if p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        let q = p
            .checked_pow(e)
            .filter(|&q| q <= MAX_FIELD_ORDER)
            .ok_or(Error::FieldTooLarge {
                q: p.saturating_pow(e),
                limit: MAX_FIELD_ORDER,
            })?;
        let (p, q) = (p as u32, q as u32);
        let modulus = smallest_irreducible(p, e as usize);
        let ring = PolyRing {
            p,
            e: e as usize,
            modulus: &modulus,
        };

        let (exp, log) = discrete_log_tables(&ring, q);
        let order = q - 1;
        let mut inv = vec![0u32; q as usize];
        let mut eta = vec![0i8; q as usize];
        for a in 1..q as usize {
            let l = log[a];
            inv[a] = exp[((order - l) % order) as usize];
            eta[a] = if l % 2 == 0 { 1 } else { -1 };
        }
        let neg = (0..q).map(|a| ring.neg(a)).collect();

        let mut spec = FieldSpec {
            p,
            e,
            q,
            modulus,
            exp,
            log,
            inv,
            neg,
            trace: Vec::new(),
            eta,
        };
        spec.trace = (0..q)
            .map(|a| {
                let a = FieldElement(a);
                let mut acc = FieldElement::ZERO;
                let mut frob = a;
                for _ in 0..e {
                    acc = spec.add(acc, frob);
                    frob = spec.pow(frob, p as u64);
                }
                debug_assert!(acc.0 < p, "trace left the prime field");
                acc.0
            })
            .collect();
        Ok(spec)
    }

    /// Builds the field of order `q`, factoring it as a prime power.
    pub fn from_order(q: u64) -> Result<Self> {
        let (p, e) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        Self::new(p, e)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Modulus coefficients, constant term first; the last entry is the
    /// leading 1.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn element(&self, index: u32) -> Result<FieldElement> {
        if index < self.q {
            Ok(FieldElement(index))
        } else {
            Err(Error::BadParams(format!(
                "index {index} is not an element of F_{}",
                self.q
            )))
        }
    }

    /// The element with the given small integer value (reduced mod p).
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    /// Coefficients of the residue polynomial, constant term first.
    pub fn digits(&self, a: FieldElement) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.e as usize);
        let mut rest = a.0;
        for _ in 0..self.e {
            out.push(rest % self.p);
            rest /= self.p;
        }
        out
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.e == 1 {
            let s = a.0 + b.0;
            return FieldElement(if s >= self.p { s - self.p } else { s });
        }
        let (mut x, mut y, mut out, mut scale) = (a.0, b.0, 0u32, 1u32);
        for _ in 0..self.e {
            let s = x % self.p + y % self.p;
            out += if s >= self.p { s - self.p } else { s } * scale;
            x /= self.p;
            y /= self.p;
            scale *= self.p;
        }
        FieldElement(out)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.neg[a.0 as usize])
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let s = self.log[a.0 as usize] + self.log[b.0 as usize];
        let order = self.q - 1;
        FieldElement(self.exp[(if s >= order { s - order } else { s }) as usize])
    }

    pub fn square(&self, a: FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            Err(Error::DivisionByZero)
        } else {
            Ok(FieldElement(self.inv[a.0 as usize]))
        }
    }

    pub fn pow(&self, a: FieldElement, n: u64) -> FieldElement {
        if n == 0 {
            return FieldElement::ONE;
        }
        if a.0 == 0 {
            return FieldElement::ZERO;
        }
        let order = (self.q - 1) as u64;
        let l = (self.log[a.0 as usize] as u64 * (n % order)) % order;
        FieldElement(self.exp[l as usize])
    }

    /// Absolute trace to F_p, returned as an integer in `[0, p)`.
    pub fn trace(&self, a: FieldElement) -> u32 {
        self.trace[a.0 as usize]
    }

    /// Quadratic character, extended by `eta(0) = 0`.
    pub fn eta(&self, a: FieldElement) -> i8 {
        self.eta[a.0 as usize]
    }

    /// A square root of `a`, if one exists.
    pub fn sqrt(&self, a: FieldElement) -> Option<FieldElement> {
        if a.0 == 0 {
            return Some(FieldElement::ZERO);
        }
        let l = self.log[a.0 as usize];
        (l % 2 == 0).then(|| FieldElement(self.exp[(l / 2) as usize]))
    }
}

/// F_p[x] modulo a monic degree-e polynomial, on base-p encoded indices.
struct PolyRing<'a> {
    p: u32,
    e: usize,
    modulus: &'a [u32],
}

impl PolyRing<'_> {
    fn decode(&self, mut a: u32) -> Vec<u32> {
        let mut out = vec![0; self.e];
        for c in out.iter_mut() {
            *c = a % self.p;
            a /= self.p;
        }
        out
    }

    fn encode(&self, coeffs: &[u32]) -> u32 {
        coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn neg(&self, a: u32) -> u32 {
        let c: Vec<u32> = self
            .decode(a)
            .into_iter()
            .map(|c| (self.p - c) % self.p)
            .collect();
        self.encode(&c)
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        let (a, b) = (self.decode(a), self.decode(b));
        let mut prod = vec![0u64; 2 * self.e];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        for k in (self.e..prod.len()).rev() {
            let lead = prod[k];
            if lead == 0 {
                continue;
            }
            // x^k = x^{k-e} * x^e and x^e = -(m_0 + ... + m_{e-1} x^{e-1})
            for (i, &m) in self.modulus[..self.e].iter().enumerate() {
                let t = k - self.e + i;
                prod[t] = (prod[t] + (p - lead) * m as u64) % p;
            }
            prod[k] = 0;
        }
        let out: Vec<u32> = prod[..self.e].iter().map(|&c| c as u32).collect();
        self.encode(&out)
    }
}

fn discrete_log_tables(ring: &PolyRing<'_>, q: u32) -> (Vec<u32>, Vec<u32>) {
    let order = q - 1;
    if order == 1 {
        return (vec![1], vec![0, 0]);
    }
    for g in 2..q {
        let mut exp = Vec::with_capacity(order as usize);
        let mut x = 1u32;
        loop {
            exp.push(x);
            x = ring.mul(x, g);
            if x == 1 || exp.len() > order as usize {
                break;
            }
        }
        if exp.len() == order as usize {
            let mut log = vec![0u32; q as usize];
            for (k, &v) in exp.iter().enumerate() {
                log[v as usize] = k as u32;
            }
            return (exp, log);
        }
    }
    unreachable!("the multiplicative group of a finite field is cyclic")
}

/// Remainder of `num` modulo monic `den`, coefficients constant-first.
fn poly_rem(num: &[u32], den: &[u32], p: u32) -> Vec<u32> {
    let p = p as u64;
    let mut r: Vec<u64> = num.iter().map(|&c| c as u64).collect();
    let dd = den.len() - 1;
    while r.len() > dd {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dd;
        if lead != 0 {
            for (i, &c) in den.iter().enumerate() {
                r[shift + i] = (r[shift + i] + (p - lead) * c as u64 % p) % p;
            }
        }
        r.pop();
    }
    r.into_iter().map(|c| c as u32).collect()
}

fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let degree = poly.len() - 1;
    for k in 1..=degree / 2 {
        let count = (p as u64).pow(k as u32);
        for n in 0..count {
            let mut divisor = Vec::with_capacity(k + 1);
            let mut rest = n;
            for _ in 0..k {
                divisor.push((rest % p as u64) as u32);
                rest /= p as u64;
            }
            divisor.push(1);
            if poly_rem(poly, &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, e: usize) -> Vec<u32> {
    let count = (p as u64).pow(e as u32);
    for n in 0..count {
        // the constant term is the most significant digit of the ordering
        let mut coeffs = vec![0u32; e + 1];
        let mut rest = n;
        for i in (0..e).rev() {
            coeffs[i] = (rest % p as u64) as u32;
            rest /= p as u64;
        }
        coeffs[e] = 1;
        if is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_modulus_is_x() {
        let f = FieldSpec::new(3, 1).unwrap();
        assert_eq!(f.q(), 3);
        assert_eq!(f.modulus(), &[0, 1]);
    }

    #[test]
    fn f9_modulus_is_x2_plus_1() {
        let f = FieldSpec::new(3, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1]);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(FieldSpec::new(2, 3), Err(Error::EvenCharacteristic));
        assert_eq!(FieldSpec::new(9, 1), Err(Error::NonPrime(9)));
        assert_eq!(FieldSpec::new(3, 0), Err(Error::DegreeZero));
        assert!(matches!(
            FieldSpec::new(3, 20),
            Err(Error::FieldTooLarge { .. })
        ));
        assert_eq!(FieldSpec::from_order(12), Err(Error::NotPrimePower(12)));
    }

    #[test]
    fn f3_arithmetic() {
        let f = FieldSpec::new(3, 1).unwrap();
        let two = FieldElement::new(2);
        assert_eq!(f.add(two, two), FieldElement::ONE);
        assert_eq!(f.eta(FieldElement::ONE), 1);
        assert_eq!(f.eta(two), -1);
        assert_eq!(f.eta(FieldElement::ZERO), 0);
        assert_eq!(f.inv(FieldElement::ZERO), Err(Error::DivisionByZero));
    }

    #[test]
    fn prime_power_splits() {
        assert_eq!(prime_power(81), Some((3, 4)));
        assert_eq!(prime_power(13), Some((13, 1)));
        assert_eq!(prime_power(45), None);
    }

    #[test]
    fn sqrt_of_minus_one_follows_q_mod_4() {
        for q in [3u64, 5, 7, 9, 11, 13, 25, 27] {
            let f = FieldSpec::from_order(q).unwrap();
            let m1 = f.neg(FieldElement::ONE);
            assert_eq!(f.sqrt(m1).is_some(), q % 4 == 1, "q = {q}");
            if let Some(r) = f.sqrt(m1) {
                assert_eq!(f.square(r), m1);
            }
        }
    }
}
