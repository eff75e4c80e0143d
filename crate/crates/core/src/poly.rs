//! Gaussian binomials and integer polynomials recovered by interpolation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `[k]_q = 1 + q + … + q^{k-1}`.
pub fn q_integer(k: u32, q: u64) -> u128 {
    (0..k).map(|i| (q as u128).pow(i)).sum()
}

/// The Gaussian binomial `[n choose m]_q`: the number of m-dimensional
/// subspaces of GF(q)^n. Zero when m > n.
pub fn gaussian_binomial(n: u32, m: u32, q: u64) -> u128 {
    if m > n {
        return 0;
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..m {
        num *= q_integer(n - i, q);
        den *= q_integer(m - i, q);
        let g = gcd(num, den);
        num /= g;
        den /= g;
    }
    debug_assert_eq!(den, 1);
    num / den
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Dimension `[n m]_q − [n m−1]_q` of the Specht module for (n−m, m).
pub fn specht_dimension(n: u32, m: u32, q: u64) -> u128 {
    let lower = if m == 0 { 0 } else { gaussian_binomial(n, m - 1, q) };
    gaussian_binomial(n, m, q) - lower
}

/// Polynomial with integer coefficients, lowest degree first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntPoly {
    pub coeffs: Vec<i128>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<i128>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: vec![] }
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, t: i128) -> i128 {
        self.coeffs.iter().rev().fold(0, |acc, &c| acc * t + c)
    }

    /// Coefficients in powers of (t − 1).
    pub fn taylor_at_one(&self) -> Vec<i128> {
        // repeated synthetic division by (t − 1)
        let mut c = self.coeffs.clone();
        let mut out = Vec::with_capacity(c.len());
        while !c.is_empty() {
            let mut rem = 0;
            let mut quot = vec![0; c.len() - 1];
            for i in (0..c.len()).rev() {
                let v = c[i] + rem;
                if i == 0 {
                    out.push(v);
                } else {
                    quot[i - 1] = v;
                    rem = v;
                }
            }
            c = quot;
        }
        while out.last() == Some(&0) {
            out.pop();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Lagrange interpolation through `points`, required to land in Z[t].
pub fn interpolate(points: &[(i128, i128)]) -> Result<IntPoly> {
    let n = points.len();
    let mut acc = vec![BigRational::zero(); n];
    for (i, &(xi, yi)) in points.iter().enumerate() {
        // basis polynomial ∏_{j≠i} (t − x_j)/(x_i − x_j)
        let mut basis = vec![BigRational::one()];
        let mut denom = BigRational::one();
        for (j, &(xj, _)) in points.iter().enumerate() {
            if j == i {
                continue;
            }
            if xj == xi {
                return Err(Error::Interpolation(format!("repeated abscissa {xi}")));
            }
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (k, b) in basis.iter().enumerate() {
                next[k + 1] += b.clone();
                next[k] -= b.clone() * BigRational::from_integer(BigInt::from(xj));
            }
            basis = next;
            denom *= BigRational::from_integer(BigInt::from(xi - xj));
        }
        let w = BigRational::from_integer(BigInt::from(yi)) / denom;
        for (k, b) in basis.into_iter().enumerate() {
            acc[k] += b * w.clone();
        }
    }
    let mut coeffs = Vec::with_capacity(n);
    for c in acc {
        if !c.is_integer() {
            return Err(Error::Interpolation(format!("non-integer coefficient {c}")));
        }
        let v = c.to_integer();
        coeffs.push(v.to_i128().ok_or_else(|| Error::Interpolation("coefficient overflow".into()))?);
    }
    Ok(IntPoly::new(coeffs))
}

/// Whether all coefficients are non-negative.
pub fn non_negative(c: &[i128]) -> bool {
    c.iter().all(|x| !x.is_negative())
}
