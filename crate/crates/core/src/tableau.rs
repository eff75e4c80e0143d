//! Two-row row-standard tableaux, identified by their second row.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::Pattern;

/// A row-standard tableau with entries 1..=n, first row of length n−m and
/// second row `row2` (strictly increasing, length m).
///
/// Ordering is by (n, m, row2) with row2 compared lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TwoRowTableau {
    pub n: usize,
    pub m: usize,
    pub row2: Vec<usize>,
}

impl TwoRowTableau {
    pub fn new(n: usize, row2: Vec<usize>) -> Result<Self> {
        if row2.windows(2).any(|w| w[0] >= w[1]) || row2.iter().any(|&b| b == 0 || b > n) {
            return Err(Error::InvalidShape(format!("second row {row2:?} is not an increasing subset of 1..={n}")));
        }
        Ok(TwoRowTableau { n, m: row2.len(), row2 })
    }

    /// The tableau whose second row is n−m+1, …, n.
    pub fn initial(n: usize, m: usize) -> Self {
        TwoRowTableau { n, m, row2: (n - m + 1..=n).collect() }
    }

    pub fn row1(&self) -> Vec<usize> {
        (1..=self.n).filter(|x| self.row2.binary_search(x).is_err()).collect()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.row2.binary_search(&x).is_ok()
    }

    /// Standard iff every second-row entry exceeds the first-row entry above it.
    pub fn is_standard(&self) -> bool {
        is_standard_rows(&self.row1(), &self.row2)
    }

    /// Number of free positions of the matching batch: Σ (b_i − i).
    pub fn free_count(&self) -> usize {
        self.row2.iter().enumerate().map(|(i, &b)| b - (i + 1)).sum()
    }

    /// Dominance order: `self ⊴ other`.
    pub fn dominated_by(&self, other: &TwoRowTableau) -> bool {
        assert_eq!((self.n, self.m), (other.n, other.m));
        (1..=self.n).all(|k| {
            let a = self.row2.iter().filter(|&&b| b <= k).count();
            let b = other.row2.iter().filter(|&&b| b <= k).count();
            b <= a
        })
    }
}

impl fmt::Display for TwoRowTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        write!(f, "{} / {}", join(&self.row1()), join(&self.row2))
    }
}

fn is_standard_rows(row1: &[usize], row2: &[usize]) -> bool {
    row2.len() <= row1.len() && row2.iter().zip(row1).all(|(b, a)| b > a)
}

/// All increasing m-subsets of 1..=n, in lexicographic order.
pub fn subsets(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(m);
    fn rec(start: usize, n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for x in start..=n {
            if n - x + 1 < m - cur.len() {
                break;
            }
            cur.push(x);
            rec(x + 1, n, m, cur, out);
            cur.pop();
        }
    }
    rec(1, n, m, &mut cur, &mut out);
    out
}

/// RStd(λ) for λ = (n−m, m) in lexicographic order of second rows.
pub fn enumerate_row_standard(n: usize, m: usize) -> Result<Vec<TwoRowTableau>> {
    if 2 * m > n {
        return Err(Error::InvalidShape(format!("(n−m, m) = ({}, {m}) is not a partition", n as i64 - m as i64)));
    }
    Ok(subsets(n, m).into_iter().map(|row2| TwoRowTableau { n, m, row2 }).collect())
}

/// A tableau over a punctured alphabet, as produced by pattern removal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ShiftedTableau {
    pub alphabet: Vec<usize>,
    pub row2: Vec<usize>,
}

impl ShiftedTableau {
    pub fn row1(&self) -> Vec<usize> {
        self.alphabet.iter().copied().filter(|x| self.row2.binary_search(x).is_err()).collect()
    }

    pub fn is_standard(&self) -> bool {
        is_standard_rows(&self.row1(), &self.row2)
    }

    /// The ordinary tableau obtained by renumbering the alphabet as 1..=N.
    pub fn similar(&self) -> TwoRowTableau {
        let row2 = self.row2.iter().map(|x| self.alphabet.binary_search(x).expect("in alphabet") + 1).collect();
        TwoRowTableau { n: self.alphabet.len(), m: self.row2.len(), row2 }
    }
}

fn punctured_alphabet(n: usize, p: &Pattern) -> Vec<usize> {
    let gone: Vec<usize> = p.rows().into_iter().chain(p.cols()).collect();
    (1..=n).filter(|x| !gone.contains(x)).collect()
}

/// Delete the rows and columns of `p` from `t`.
pub fn remove_and_shift(t: &TwoRowTableau, p: &Pattern) -> Result<ShiftedTableau> {
    if !p.fits(t) {
        return Err(Error::PatternMismatch);
    }
    let rows = p.rows();
    let row2 = t.row2.iter().copied().filter(|b| !rows.contains(b)).collect();
    Ok(ShiftedTableau { alphabet: punctured_alphabet(t.n, p), row2 })
}

/// The non-standard shifted tableaux of shape (n−m−s, m−s) over the
/// alphabet left after removing `p`.
pub fn enumerate_t_lambda_p(n: usize, m: usize, p: &Pattern) -> Result<Vec<ShiftedTableau>> {
    let s = p.len();
    if s > m || 2 * m > n {
        return Err(Error::InvalidShape(format!("pattern of size {s} for (n, m) = ({n}, {m})")));
    }
    let alphabet = punctured_alphabet(n, p);
    Ok(subsets(alphabet.len(), m - s)
        .into_iter()
        .map(|idx| ShiftedTableau { row2: idx.iter().map(|&i| alphabet[i - 1]).collect(), alphabet: alphabet.clone() })
        .filter(|st| !st.is_standard())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn binom(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn rstd_42() {
        let ts = enumerate_row_standard(4, 2).unwrap();
        assert_eq!(ts.len(), 6);
        assert_eq!(ts[0].row2, vec![1, 2]);
        let std: Vec<_> = ts.iter().filter(|t| t.is_standard()).map(|t| t.row2.clone()).collect();
        assert_eq!(std, vec![vec![2, 4], vec![3, 4]]);
        assert!(enumerate_row_standard(3, 2).is_err());
        assert_eq!(enumerate_row_standard(5, 0).unwrap().len(), 1);
    }

    #[test]
    fn standardness_examples() {
        assert!(TwoRowTableau::new(4, vec![2, 4]).unwrap().is_standard());
        assert!(!TwoRowTableau::new(4, vec![2, 3]).unwrap().is_standard());
        assert!(!TwoRowTableau::new(4, vec![1, 4]).unwrap().is_standard());
        assert!(TwoRowTableau::new(3, vec![4]).is_err());
    }

    #[test]
    fn removal_example_n8() {
        let t = TwoRowTableau::new(8, vec![3, 5, 7, 8]).unwrap();
        let p = Pattern::new(vec![(5, 2), (8, 6)]).unwrap();
        let st = remove_and_shift(&t, &p).unwrap();
        assert_eq!(st.row1(), vec![1, 4]);
        assert_eq!(st.row2, vec![3, 7]);
        assert_eq!(st.similar().row2, vec![2, 4]);
    }

    #[test]
    fn t_lambda_p_example() {
        let p = Pattern::new(vec![(6, 4)]).unwrap();
        let ts = enumerate_t_lambda_p(6, 3, &p).unwrap();
        let rows: Vec<_> = ts.iter().map(|t| t.row2.clone()).collect();
        assert_eq!(rows, vec![vec![1, 2], vec![1, 3], vec![1, 5], vec![2, 3]]);
        assert_eq!(ts[0].row1(), vec![3, 5]);
        assert_eq!(ts[3].row1(), vec![1, 5]);
    }

    #[test]
    fn removal_requires_fit() {
        let t = TwoRowTableau::new(4, vec![3, 4]).unwrap();
        let p = Pattern::new(vec![(2, 1)]).unwrap();
        assert_eq!(remove_and_shift(&t, &p), Err(Error::PatternMismatch));
    }

    proptest! {
        #[test]
        fn t_lambda_p_size(n in 2usize..9, m in 1usize..5, s in 0usize..3) {
            prop_assume!(2 * m <= n && s <= m && 2 * s <= n);
            // a pattern of size s on the top of the range
            let positions: Vec<(usize, usize)> = (0..s).map(|i| (n - i, n - s - i)).collect();
            prop_assume!(positions.iter().all(|&(b, a)| a >= 1 && a < b));
            let p = Pattern::new(positions).unwrap();
            let ts = enumerate_t_lambda_p(n, m, &p).unwrap();
            let want = if m > s { binom(n - 2 * s, m - s - 1) } else { 0 };
            prop_assert_eq!(ts.len(), want);
        }

        #[test]
        fn lex_refines_dominance(n in 2usize..9, m in 0usize..5) {
            prop_assume!(2 * m <= n);
            let ts = enumerate_row_standard(n, m).unwrap();
            for a in &ts {
                for b in &ts {
                    if a.dominated_by(b) {
                        prop_assert!(a <= b);
                    }
                }
            }
        }
    }
}
