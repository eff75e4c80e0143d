//! Finite fields GF(q) for prime powers q ≤ 16, stored as lookup tables.
//!
//! An element is its index in `0..q`. For q = p^k the index is read as the
//! base-p digit vector of a polynomial in x modulo a fixed irreducible.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of some `GaloisField`, identified by its table index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fq(pub u8);

impl Fq {
    pub const ZERO: Fq = Fq(0);
    pub const ONE: Fq = Fq(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Fixed moduli for the non-prime fields, lowest coefficient first (monic).
fn modulus_for(p: u32, k: u32) -> Option<&'static [u32]> {
    match (p, k) {
        (2, 2) => Some(&[1, 1, 1]),
        (2, 3) => Some(&[1, 1, 0, 1]),
        (2, 4) => Some(&[1, 1, 0, 0, 1]),
        (3, 2) => Some(&[2, 2, 1]),
        _ => None,
    }
}

/// Split q into (p, k) with q = p^k, or fail.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let mut r = q;
    let mut k = 0;
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p as u32, k))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisField {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
    trace: Vec<u8>,
}

impl GaloisField {
    pub fn new(q: u64) -> Result<Self> {
        let (p, k) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        if q > 16 {
            return Err(Error::UnsupportedField(q));
        }
        let modulus: Vec<u32> = if k == 1 {
            vec![0, 1]
        } else {
            modulus_for(p, k).ok_or(Error::UnsupportedField(q))?.to_vec()
        };
        let q = q as u32;
        let digits = |x: u32| -> Vec<u32> { (0..k).map(|i| (x / p.pow(i)) % p).collect() };
        let undigits = |d: &[u32]| -> u32 { d.iter().rev().fold(0, |acc, &c| acc * p + c) };
        let n = q as usize;
        let mut add = vec![0u8; n * n];
        let mut mul = vec![0u8; n * n];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = undigits(&s) as u8;
                // schoolbook product, then reduce by the monic modulus
                let mut prod = vec![0u32; 2 * k as usize];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                for deg in (k as usize..prod.len()).rev() {
                    let c = prod[deg];
                    if c != 0 {
                        prod[deg] = 0;
                        for (i, m) in modulus.iter().take(k as usize).enumerate() {
                            let idx = deg - k as usize + i;
                            prod[idx] = (prod[idx] + (p - c) * m) % p;
                        }
                    }
                }
                mul[(a * q + b) as usize] = undigits(&prod[..k as usize]) as u8;
            }
        }
        let mut neg = vec![0u8; n];
        let mut inv = vec![0u8; n];
        for a in 0..q {
            for b in 0..q {
                if add[(a * q + b) as usize] == 0 {
                    neg[a as usize] = b as u8;
                }
                if mul[(a * q + b) as usize] == 1 {
                    inv[a as usize] = b as u8;
                }
            }
        }
        let mut field = GaloisField { p, k, q, modulus, add, mul, neg, inv, trace: vec![0; n] };
        for a in 0..q {
            let mut x = Fq(a as u8);
            let mut t = Fq::ZERO;
            for _ in 0..k {
                t = field.add(t, x);
                x = field.frobenius(x);
            }
            debug_assert!((t.0 as u32) < p);
            field.trace[a as usize] = t.0;
        }
        Ok(field)
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn k(&self) -> u32 {
        self.k
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Modulus coefficients, lowest degree first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = Fq> + Clone {
        (0..self.q as u8).map(Fq)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Fq> + Clone {
        (1..self.q as u8).map(Fq)
    }

    /// The image of an integer under Z → GF(p) ⊂ GF(q).
    pub fn from_int(&self, n: i64) -> Fq {
        Fq(n.rem_euclid(self.p as i64) as u8)
    }

    #[inline]
    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        Fq(self.add[a.index() * self.q as usize + b.index()])
    }

    #[inline]
    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        Fq(self.mul[a.index() * self.q as usize + b.index()])
    }

    #[inline]
    pub fn neg(&self, a: Fq) -> Fq {
        Fq(self.neg[a.index()])
    }

    pub fn inv(&self, a: Fq) -> Result<Fq> {
        if a.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(Fq(self.inv[a.index()]))
        }
    }

    pub fn div(&self, a: Fq, b: Fq) -> Result<Fq> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fq, mut e: u64) -> Fq {
        let mut base = a;
        let mut acc = Fq::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn frobenius(&self, a: Fq) -> Fq {
        self.pow(a, self.p as u64)
    }

    /// Absolute trace to the prime field, returned as an integer in `0..p`.
    #[inline]
    pub fn trace(&self, a: Fq) -> u32 {
        self.trace[a.index()] as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_power_split() {
        assert_eq!(prime_power(16), Some((2, 4)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(13), Some((13, 1)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn rejects_bad_q() {
        assert_eq!(GaloisField::new(6), Err(Error::NotPrimePower(6)));
        assert_eq!(GaloisField::new(17), Err(Error::UnsupportedField(17)));
        assert_eq!(GaloisField::new(1), Err(Error::NotPrimePower(1)));
    }

    #[test]
    fn field_axioms_all_sizes() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
            let f = GaloisField::new(q).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), Fq::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), Fq::ONE);
                }
                for b in f.elements() {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in f.elements() {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                        assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                    }
                }
            }
        }
    }

    #[test]
    fn gf4_omega() {
        let f = GaloisField::new(4).unwrap();
        let w = Fq(2);
        // w^2 = w + 1
        assert_eq!(f.mul(w, w), Fq(3));
        assert_eq!(f.pow(w, 3), Fq::ONE);
        assert_eq!(f.trace(Fq::ONE), 0);
        assert_eq!(f.trace(w), 1);
    }

    #[test]
    fn trace_is_additive_and_onto() {
        for q in [4u64, 8, 9, 16] {
            let f = GaloisField::new(q).unwrap();
            let mut hits = vec![0; f.p() as usize];
            for a in f.elements() {
                hits[f.trace(a) as usize] += 1;
                for b in f.elements() {
                    assert_eq!(f.trace(f.add(a, b)), (f.trace(a) + f.trace(b)) % f.p());
                }
            }
            assert!(hits.iter().all(|&h| h == q / f.p() as u64));
        }
    }

    #[test]
    fn division_by_zero() {
        let f = GaloisField::new(5).unwrap();
        assert_eq!(f.inv(Fq::ZERO), Err(Error::DivisionByZero));
    }
}
