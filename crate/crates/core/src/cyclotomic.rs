//! Exact arithmetic in the cyclotomic field Q(ζ_p).
//!
//! `Cyclotomic<I>` stores an integer numerator vector in the power basis
//! 1, ζ, …, ζ^{p-2} and a positive integer denominator. Rational elements are
//! kept in a p-free form (`p == 0`), so that values built from different
//! places compare structurally and `Zero`/`One` need no field parameter.
//!
//! `ZetaVec` is a cheap, unnormalised element of Z[ζ_p] used by bulk
//! character transforms where only ring operations and zero tests are needed.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A signed p-th root of unity `±ζ_p^exp`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Root {
    pub p: u32,
    pub exp: u32,
    pub neg: bool,
}

impl Root {
    pub fn one(p: u32) -> Root {
        Root { p, exp: 0, neg: false }
    }

    pub fn zeta_pow(p: u32, exp: u32) -> Root {
        Root { p, exp: exp % p, neg: false }
    }

    pub fn mul(self, o: Root) -> Root {
        debug_assert_eq!(self.p, o.p);
        Root { p: self.p, exp: (self.exp + o.exp) % self.p, neg: self.neg ^ o.neg }
    }

    /// Unique representation of the value: for p = 2, ζ = −1 is folded
    /// into the sign.
    pub fn normalized(self) -> Root {
        if self.p == 2 && self.exp == 1 {
            Root { p: 2, exp: 0, neg: !self.neg }
        } else {
            self
        }
    }

    pub fn conj(self) -> Root {
        Root { p: self.p, exp: (self.p - self.exp) % self.p, neg: self.neg }
    }
}

/// Integer types usable as numerators and denominators.
pub trait CycInt:
    Integer + Signed + Clone + fmt::Debug + fmt::Display + FromPrimitive + ToPrimitive + Send + Sync
{
}

impl<T> CycInt for T where
    T: Integer + Signed + Clone + fmt::Debug + fmt::Display + FromPrimitive + ToPrimitive + Send + Sync
{
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyclotomic<I> {
    p: u32,
    num: Vec<I>,
    den: I,
}

/// Reduce a redundant coefficient vector (length p, powers 0..p-1) to the
/// power basis of length p-1.
fn reduce_redundant<I: CycInt>(mut r: Vec<I>) -> Vec<I> {
    let top = r.pop().expect("nonempty");
    if !top.is_zero() {
        for c in r.iter_mut() {
            *c = c.clone() - top.clone();
        }
    }
    r
}

impl<I: CycInt> Cyclotomic<I> {
    fn canonical(p: u32, mut num: Vec<I>, mut den: I) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if den.is_negative() {
            den = -den;
            for c in num.iter_mut() {
                *c = -c.clone();
            }
        }
        let rational = p < 3 || num.iter().skip(1).all(Zero::is_zero);
        if rational {
            num.truncate(1);
            if num.is_empty() {
                num.push(I::zero());
            }
        }
        let mut g = den.clone();
        for c in &num {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        if !g.is_one() && !g.is_zero() {
            for c in num.iter_mut() {
                *c = c.clone() / g.clone();
            }
            den = den / g;
        }
        if num.iter().all(Zero::is_zero) {
            den = I::one();
        }
        Cyclotomic { p: if rational { 0 } else { p }, num, den }
    }

    /// Build from numerator coefficients in the power basis (length p-1).
    pub fn from_parts(p: u32, num: Vec<I>, den: I) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let len = if p < 2 { 1 } else { (p - 1) as usize };
        if num.len() != len {
            return Err(Error::InvalidShape(format!("numerator length {} for p = {}", num.len(), p)));
        }
        if p == 2 {
            return Ok(Self::canonical(0, num, den));
        }
        Ok(Self::canonical(p, num, den))
    }

    pub fn from_int(n: i64) -> Self {
        Cyclotomic { p: 0, num: vec![I::from_i64(n).expect("fits")], den: I::one() }
    }

    pub fn from_ratio(n: I, d: I) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::canonical(0, vec![n], d))
    }

    /// `±ζ_p^e` as a field element.
    pub fn from_root(r: Root) -> Self {
        let sign = if r.neg { -I::one() } else { I::one() };
        let e = r.exp % r.p.max(1);
        if e == 0 {
            return Cyclotomic { p: 0, num: vec![sign], den: I::one() };
        }
        if r.p == 2 {
            return Cyclotomic { p: 0, num: vec![-sign], den: I::one() };
        }
        let mut red = vec![I::zero(); r.p as usize];
        red[e as usize] = sign;
        Self::canonical(r.p, reduce_redundant(red), I::one())
    }

    pub fn zeta(p: u32) -> Self {
        Self::from_root(Root::zeta_pow(p, 1))
    }

    /// The characteristic-zero prime this element is tied to, or 0 if rational.
    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn is_rational(&self) -> bool {
        self.p == 0
    }

    pub fn numerator(&self) -> &[I] {
        &self.num
    }

    pub fn denominator(&self) -> &I {
        &self.den
    }

    /// Numerator padded to the power basis of Q(ζ_p).
    pub fn numerator_padded(&self, p: u32) -> Vec<I> {
        let len = if p < 2 { 1 } else { (p - 1) as usize };
        let mut v = self.num.clone();
        v.resize(len.max(v.len()), I::zero());
        v
    }

    fn join_prime(a: u32, b: u32) -> u32 {
        match (a, b) {
            (0, x) | (x, 0) => x,
            (x, y) => {
                assert_eq!(x, y, "mixing cyclotomic fields Q(ζ_{x}) and Q(ζ_{y})");
                x
            }
        }
    }

    /// Redundant length-p view (powers 0..p-1) of the numerator.
    fn redundant(&self, p: u32) -> Vec<I> {
        let mut r = vec![I::zero(); p as usize];
        for (i, c) in self.num.iter().enumerate() {
            r[i] = c.clone();
        }
        r
    }

    /// Galois automorphism ζ ↦ ζ^k.
    pub fn galois(&self, k: u32) -> Self {
        if self.p == 0 {
            return self.clone();
        }
        let p = self.p;
        assert!(k % p != 0, "not an automorphism");
        let r = self.redundant(p);
        let mut out = vec![I::zero(); p as usize];
        for (i, c) in r.into_iter().enumerate() {
            let j = (i as u64 * k as u64 % p as u64) as usize;
            out[j] = out[j].clone() + c;
        }
        Self::canonical(p, reduce_redundant(out), self.den.clone())
    }

    /// Field norm down to Q.
    pub fn norm(&self) -> Self {
        if self.p == 0 {
            return self.clone();
        }
        let mut acc = self.clone();
        for k in 2..self.p {
            acc = acc * self.galois(k);
        }
        debug_assert!(acc.is_rational());
        acc
    }

    pub fn checked_inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.p == 0 {
            return Ok(Self::canonical(0, vec![self.den.clone()], self.num[0].clone()));
        }
        let mut others = Self::one();
        for k in 2..self.p {
            others = others * self.galois(k);
        }
        let n = self.clone() * others.clone();
        debug_assert!(n.is_rational());
        // 1/x = (product of the other conjugates) / norm
        Ok(others * Self::canonical(0, vec![n.den.clone()], n.num[0].clone()))
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self> {
        Ok(self.clone() * o.checked_inv()?)
    }

    /// Sum of bit lengths of numerator and denominator, a pivoting heuristic.
    pub fn height(&self) -> u64 {
        let bits = |x: &I| -> u64 {
            match x.to_f64() {
                Some(f) if f != 0.0 => f.abs().log2() as u64 + 1,
                Some(_) => 0,
                None => 1024,
            }
        };
        self.num.iter().map(bits).sum::<u64>() + bits(&self.den)
    }

    /// True iff the reduced denominator is a power of `p`; equivalently its
    /// rational norm is a p-power.
    pub fn denominator_is_power_of(&self, p: u32) -> bool {
        let mut d = self.den.clone();
        let pp = I::from_u32(p).unwrap();
        while (d.clone() % pp.clone()).is_zero() {
            d = d / pp.clone();
        }
        d.is_one()
    }
}

impl<I: CycInt> Zero for Cyclotomic<I> {
    fn zero() -> Self {
        Cyclotomic { p: 0, num: vec![I::zero()], den: I::one() }
    }

    fn is_zero(&self) -> bool {
        self.p == 0 && self.num[0].is_zero()
    }
}

impl<I: CycInt> One for Cyclotomic<I> {
    fn one() -> Self {
        Cyclotomic { p: 0, num: vec![I::one()], den: I::one() }
    }
}

impl<I: CycInt> Add for Cyclotomic<I> {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        let p = Self::join_prime(self.p, o.p);
        let g = self.den.gcd(&o.den);
        let fa = o.den.clone() / g.clone();
        let fb = self.den.clone() / g;
        let len = if p == 0 { 1 } else { (p - 1) as usize };
        let mut num = vec![I::zero(); len];
        for (i, c) in self.num.iter().enumerate() {
            num[i] = c.clone() * fa.clone();
        }
        for (i, c) in o.num.iter().enumerate() {
            num[i] = num[i].clone() + c.clone() * fb.clone();
        }
        Self::canonical(p, num, self.den * fa)
    }
}

impl<I: CycInt> Neg for Cyclotomic<I> {
    type Output = Self;

    fn neg(self) -> Self {
        Cyclotomic { p: self.p, num: self.num.into_iter().map(|c| -c).collect(), den: self.den }
    }
}

impl<I: CycInt> Sub for Cyclotomic<I> {
    type Output = Self;

    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<I: CycInt> Mul for Cyclotomic<I> {
    type Output = Self;

    fn mul(self, o: Self) -> Self {
        let p = Self::join_prime(self.p, o.p);
        if self.p == 0 || o.p == 0 {
            let (s, v) = if self.p == 0 { (self, o) } else { (o, self) };
            let c = s.num[0].clone();
            let num = v.num.into_iter().map(|x| x * c.clone()).collect();
            return Self::canonical(p, num, s.den * v.den);
        }
        let a = self.redundant(p);
        let b = o.redundant(p);
        let mut out = vec![I::zero(); p as usize];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let k = (i + j) % p as usize;
                out[k] = out[k].clone() + x.clone() * y.clone();
            }
        }
        Self::canonical(p, reduce_redundant(out), self.den * o.den)
    }
}

impl<I: CycInt> Div for Cyclotomic<I> {
    type Output = Self;

    fn div(self, o: Self) -> Self {
        self.checked_div(&o).expect("cyclotomic division by zero")
    }
}

impl<I: CycInt> fmt::Debug for Cyclotomic<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<I: CycInt> fmt::Display for Cyclotomic<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            terms.push(match i {
                0 => format!("{c}"),
                1 => format!("{c}ζ"),
                _ => format!("{c}ζ^{i}"),
            });
        }
        let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        if self.den.is_one() {
            if terms.len() > 1 {
                write!(f, "({body})")
            } else {
                write!(f, "{body}")
            }
        } else {
            write!(f, "({body})/{}", self.den)
        }
    }
}

impl Cyclotomic<BigInt> {
    /// Convert a small-integer element to the arbitrary-precision form.
    pub fn from_small<J: CycInt>(x: &Cyclotomic<J>) -> Self {
        let conv = |v: &J| BigInt::from_i128(v.to_i128().expect("fits i128")).unwrap();
        Cyclotomic { p: x.p, num: x.num.iter().map(conv).collect(), den: conv(&x.den) }
    }
}

/// Unnormalised element of Z[ζ_p]: coefficients of 1, ζ, …, ζ^{p-1}.
/// It is zero iff all coefficients agree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZetaVec {
    c: Vec<i64>,
}

impl ZetaVec {
    pub fn zero(p: u32) -> Self {
        ZetaVec { c: vec![0; p as usize] }
    }

    /// From redundant coefficients of 1, ζ, …, ζ^{p-1}.
    pub fn from_coeffs(c: Vec<i64>) -> Self {
        assert!(!c.is_empty(), "at least one coefficient");
        ZetaVec { c }
    }

    pub fn from_root(r: Root) -> Self {
        let mut z = ZetaVec::zero(r.p);
        z.c[r.exp as usize] = if r.neg { -1 } else { 1 };
        z
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == self.c[0])
    }

    pub fn add_assign(&mut self, o: &ZetaVec) {
        for (a, b) in self.c.iter_mut().zip(&o.c) {
            *a += b;
        }
    }

    pub fn add_root(&mut self, r: Root) {
        self.c[r.exp as usize] += if r.neg { -1 } else { 1 };
    }

    pub fn mul_root(&self, r: Root) -> ZetaVec {
        let p = self.c.len();
        let mut out = vec![0; p];
        for (i, &x) in self.c.iter().enumerate() {
            out[(i + r.exp as usize) % p] = if r.neg { -x } else { x };
        }
        ZetaVec { c: out }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.c
    }

    pub fn to_cyclotomic<I: CycInt>(&self) -> Cyclotomic<I> {
        let p = self.c.len() as u32;
        let red: Vec<I> = self.c.iter().map(|&x| I::from_i64(x).unwrap()).collect();
        if p == 2 {
            return Cyclotomic::canonical(0, vec![red[0].clone() - red[1].clone()], I::one());
        }
        Cyclotomic::canonical(p, reduce_redundant(red), I::one())
    }
}

/// Ring elements that a character transform can run over.
pub trait RootRing: Clone + Send + Sync {
    fn zero_for(p: u32) -> Self;
    fn is_zero_elem(&self) -> bool;
    fn add_assign_elem(&mut self, o: &Self);
    fn mul_root(&self, r: Root) -> Self;
}

impl RootRing for ZetaVec {
    fn zero_for(p: u32) -> Self {
        ZetaVec::zero(p)
    }

    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }

    fn add_assign_elem(&mut self, o: &Self) {
        self.add_assign(o)
    }

    fn mul_root(&self, r: Root) -> Self {
        ZetaVec::mul_root(self, r)
    }
}

impl<I: CycInt> RootRing for Cyclotomic<I> {
    fn zero_for(_p: u32) -> Self {
        Self::zero()
    }

    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }

    fn add_assign_elem(&mut self, o: &Self) {
        *self = self.clone() + o.clone();
    }

    fn mul_root(&self, r: Root) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.clone() * Self::from_root(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Cyclotomic<BigInt>;

    fn int(n: i64) -> C {
        C::from_int(n)
    }

    #[test]
    fn zeta_powers_sum_to_zero() {
        for p in [2u32, 3, 5, 7, 11, 13] {
            let mut s = C::zero();
            for e in 0..p {
                s = s + C::from_root(Root::zeta_pow(p, e));
            }
            assert!(s.is_zero(), "p = {p}");
            let z = C::zeta(p);
            let mut acc = C::one();
            for _ in 0..p {
                acc = acc * z.clone();
            }
            assert_eq!(acc, C::one());
        }
    }

    #[test]
    fn p2_is_rational() {
        let z = C::zeta(2);
        assert!(z.is_rational());
        assert_eq!(z, int(-1));
    }

    #[test]
    fn inverse_and_division_by_zero() {
        let z = C::zeta(5);
        let x = int(1) + z.clone() * int(2) + z.clone() * z.clone() * int(-3);
        let y = x.checked_inv().unwrap();
        assert_eq!(x * y, C::one());
        assert_eq!(C::zero().checked_inv(), Err(Error::DivisionByZero));
        assert_eq!(int(3).checked_div(&C::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn from_parts_canonicalizes() {
        let a = C::from_parts(3, vec![2.into(), 4.into()], 6.into()).unwrap();
        assert_eq!(a.numerator(), &[BigInt::from(1), BigInt::from(2)]);
        assert_eq!(a.denominator(), &BigInt::from(3));
        let r = C::from_parts(3, vec![2.into(), 0.into()], (-4).into()).unwrap();
        assert!(r.is_rational());
        assert_eq!(r, C::from_ratio((-1).into(), 2.into()).unwrap());
        assert!(C::from_parts(3, vec![1.into()], 1.into()).is_err());
        assert_eq!(C::from_parts(3, vec![1.into(), 1.into()], 0.into()), Err(Error::DivisionByZero));
    }

    #[test]
    fn norm_of_one_minus_zeta_is_p() {
        for p in [3u32, 5, 7, 11, 13] {
            let x = C::one() - C::zeta(p);
            assert_eq!(x.norm(), int(p as i64));
        }
    }

    #[test]
    fn zetavec_matches_cyclotomic() {
        let p = 5;
        let mut z = ZetaVec::zero(p);
        let mut c = C::zero();
        for (e, neg) in [(1, false), (3, true), (4, false), (0, true), (1, false)] {
            let r = Root { p, exp: e, neg };
            z.add_root(r);
            c = c + C::from_root(r);
        }
        assert_eq!(z.to_cyclotomic::<BigInt>(), c);
        let r = Root { p, exp: 2, neg: true };
        assert_eq!(z.mul_root(r).to_cyclotomic::<BigInt>(), c * C::from_root(r));
    }

    #[test]
    fn p_power_denominators() {
        let a = C::from_ratio(5.into(), 27.into()).unwrap();
        assert!(a.denominator_is_power_of(3));
        assert!(!a.denominator_is_power_of(2));
        assert!(int(7).denominator_is_power_of(2));
    }
}
