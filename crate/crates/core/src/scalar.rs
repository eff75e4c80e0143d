//! The exact scalar fields the linear algebra runs over.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::cyclotomic::{CycInt, Cyclotomic};

/// An exact field. Floating point types are deliberately not admitted:
/// every zero test in the elimination code must be exact.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    /// Size estimate used to prefer small pivots.
    fn height(&self) -> u64 {
        0
    }
}

impl Scalar for BigRational {
    fn height(&self) -> u64 {
        self.numer().bits() + self.denom().bits()
    }
}

impl<I: CycInt> Scalar for Cyclotomic<I> {
    fn height(&self) -> u64 {
        Cyclotomic::height(self)
    }
}

/// Integers modulo the Mersenne prime 2^61 - 1, used for rank certificates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ModP(u64);

impl ModP {
    pub const MODULUS: u64 = (1 << 61) - 1;

    pub fn new(x: i64) -> ModP {
        ModP(x.rem_euclid(Self::MODULUS as i64) as u64)
    }

    pub fn from_bigint(x: &BigInt) -> ModP {
        let m = BigInt::from(Self::MODULUS);
        let r = ((x % &m) + &m) % &m;
        ModP(r.try_into().expect("reduced"))
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn reduce(x: u128) -> u64 {
        let m = Self::MODULUS as u128;
        let r = (x & m) + (x >> 61);
        let r = (r & m) + (r >> 61);
        (if r >= m { r - m } else { r }) as u64
    }

    pub fn pow(self, mut e: u64) -> ModP {
        let mut b = self;
        let mut acc = ModP(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b;
            }
            b = b * b;
            e >>= 1;
        }
        acc
    }

    pub fn inv(self) -> Option<ModP> {
        (self.0 != 0).then(|| self.pow(Self::MODULUS - 2))
    }
}

impl Zero for ModP {
    fn zero() -> Self {
        ModP(0)
    }

    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl One for ModP {
    fn one() -> Self {
        ModP(1)
    }
}

impl Add for ModP {
    type Output = ModP;

    fn add(self, o: ModP) -> ModP {
        let s = self.0 + o.0;
        ModP(if s >= Self::MODULUS { s - Self::MODULUS } else { s })
    }
}

impl Sub for ModP {
    type Output = ModP;

    fn sub(self, o: ModP) -> ModP {
        self + (-o)
    }
}

impl Neg for ModP {
    type Output = ModP;

    fn neg(self) -> ModP {
        ModP(if self.0 == 0 { 0 } else { Self::MODULUS - self.0 })
    }
}

impl Mul for ModP {
    type Output = ModP;

    fn mul(self, o: ModP) -> ModP {
        ModP(Self::reduce(self.0 as u128 * o.0 as u128))
    }
}

impl Div for ModP {
    type Output = ModP;

    fn div(self, o: ModP) -> ModP {
        self * o.inv().expect("division by zero mod p")
    }
}

impl Scalar for ModP {}
