//! Census of the orbit modules in the restriction of S^λ to U: how many
//! eligible orbits of each dimension q^c there are, as a function of q.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::GaloisField;
use crate::flag::FlagSpace;
use crate::orbit::OrbitCensus;
use crate::poly::{interpolate, non_negative, specht_dimension, IntPoly};

/// Eligible orbit counts by dimension exponent at one q.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusCounts {
    pub n: usize,
    pub m: usize,
    pub q: u64,
    pub by_exponent: BTreeMap<usize, u64>,
}

impl CensusCounts {
    pub fn count(&self, c: usize) -> u64 {
        self.by_exponent.get(&c).copied().unwrap_or(0)
    }

    /// Σ_c count_c · q^c.
    pub fn total_dimension(&self) -> u128 {
        self.by_exponent.iter().map(|(&c, &k)| k as u128 * (self.q as u128).pow(c as u32)).sum()
    }

    pub fn matches_specht_dimension(&self) -> bool {
        self.total_dimension() == specht_dimension(self.n as u32, self.m as u32, self.q)
    }
}

pub fn census_from_orbits(fs: &FlagSpace, orbits: &OrbitCensus) -> CensusCounts {
    let mut by_exponent = BTreeMap::new();
    for r in orbits.orbits.iter().filter(|r| r.eligible) {
        *by_exponent.entry(r.exponent).or_insert(0) += 1;
    }
    CensusCounts { n: fs.n, m: fs.m, q: fs.q(), by_exponent }
}

pub fn census_counts(n: usize, m: usize, q: u64, budget: u64) -> Result<CensusCounts> {
    let fs = FlagSpace::new(n, m, Arc::new(GaloisField::new(q)?), budget)?;
    Ok(census_from_orbits(&fs, &OrbitCensus::new(&fs)))
}

/// The interpolated count f_c(t) of orbit modules of dimension t^c.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusPolynomial {
    pub c: usize,
    pub poly: IntPoly,
    pub coeffs_t_minus_1: Vec<i128>,
    pub fitted_q: Vec<u64>,
    pub validated_q: u64,
    pub predicted: i128,
    pub observed: u64,
}

impl CensusPolynomial {
    pub fn validated(&self) -> bool {
        self.predicted == self.observed as i128
    }

    /// Observation only: whether the (t−1)-expansion has no negative term.
    pub fn non_negative(&self) -> bool {
        non_negative(&self.coeffs_t_minus_1)
    }
}

/// Degree bound for f_c: an orbit with s pattern positions comes in
/// (q−1)^s filled versions, and s ≤ m.
pub fn census_degree_bound(m: usize) -> usize {
    m
}

/// Fit f_c through all but the last entry of `counts` and check the last.
pub fn census_polynomial(counts: &[CensusCounts], c: usize) -> Result<CensusPolynomial> {
    let Some((check, fit)) = counts.split_last() else {
        return Err(Error::Interpolation("empty q-list".into()));
    };
    let m = check.m;
    if fit.len() < census_degree_bound(m) + 1 {
        return Err(Error::Interpolation(format!(
            "{} fitting points cannot pin down a polynomial of degree {}",
            fit.len(),
            census_degree_bound(m)
        )));
    }
    let poly = interpolate(&fit.iter().map(|k| (k.q as i128, k.count(c) as i128)).collect::<Vec<_>>())?;
    let predicted = poly.eval(check.q as i128);
    Ok(CensusPolynomial {
        c,
        coeffs_t_minus_1: poly.taylor_at_one(),
        poly,
        fitted_q: fit.iter().map(|k| k.q).collect(),
        validated_q: check.q,
        predicted,
        observed: check.count(c),
    })
}

/// Counts at each q (in the given order) and f_c for c = 0..=m(n−m).
pub fn census_polynomials(n: usize, m: usize, qs: &[u64], budget: u64) -> Result<(Vec<CensusCounts>, Vec<CensusPolynomial>)> {
    let mut seen = Vec::new();
    for &q in qs {
        if seen.contains(&q) {
            return Err(Error::Interpolation(format!("q = {q} listed twice")));
        }
        seen.push(q);
    }
    let counts = qs.iter().map(|&q| census_counts(n, m, q, budget)).collect::<Result<Vec<_>>>()?;
    let polys = (0..=m * (n - m)).map(|c| census_polynomial(&counts, c)).collect::<Result<Vec<_>>>()?;
    Ok((counts, polys))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_shape_has_one_fixed_line() {
        let (counts, polys) = census_polynomials(4, 0, &[2, 3], u64::MAX).unwrap();
        assert!(counts.iter().all(|k| k.by_exponent == BTreeMap::from([(0, 1)])));
        assert_eq!(polys.len(), 1);
        assert_eq!(polys[0].poly, IntPoly::new(vec![1]));
        assert!(polys[0].validated());
    }

    #[test]
    fn counts_add_up_to_the_specht_dimension() {
        for (n, m) in [(2, 1), (3, 1), (4, 1), (4, 2), (5, 2)] {
            for q in [2, 3, 4] {
                let k = census_counts(n, m, q, u64::MAX).unwrap();
                assert!(k.matches_specht_dimension(), "({n},{m},{q})");
            }
        }
    }

    #[test]
    fn polynomials_predict_q5() {
        for (n, m) in [(2, 1), (3, 1), (4, 1), (4, 2), (5, 2)] {
            let (_, polys) = census_polynomials(n, m, &[2, 3, 4, 5], u64::MAX).unwrap();
            for p in &polys {
                assert!(p.validated(), "({n},{m}) c={} predicted {} observed {}", p.c, p.predicted, p.observed);
                assert!(p.poly.degree().map_or(true, |d| d <= m));
            }
        }
    }

    #[test]
    fn exponents_beyond_the_box_count_give_zero() {
        let (counts, _) = census_polynomials(4, 2, &[2, 3, 4, 5], u64::MAX).unwrap();
        let p = census_polynomial(&counts, 5).unwrap();
        assert!(p.poly.is_zero() && p.validated());
    }

    #[test]
    fn too_few_points_is_an_error() {
        let c = vec![census_counts(4, 2, 2, u64::MAX).unwrap(), census_counts(4, 2, 3, u64::MAX).unwrap()];
        assert!(census_polynomial(&c, 0).is_err());
    }
}
