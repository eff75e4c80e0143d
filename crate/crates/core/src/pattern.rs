//! Patterns: sets of positions with distinct rows and columns, each strictly
//! below the diagonal, whose columns avoid the pattern rows.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Fq;
use crate::tableau::TwoRowTableau;

/// Positions `(row, col)`, 1-based, sorted by row.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Pattern {
    positions: Vec<(usize, usize)>,
}

impl Pattern {
    pub fn new(mut positions: Vec<(usize, usize)>) -> Result<Self> {
        positions.sort_unstable();
        for (i, &(b, a)) in positions.iter().enumerate() {
            if a == 0 || a >= b {
                return Err(Error::InvalidPattern(format!("({b},{a}) is not strictly below the diagonal")));
            }
            for &(b2, a2) in &positions[i + 1..] {
                if b2 == b || a2 == a {
                    return Err(Error::InvalidPattern(format!("({b},{a}) and ({b2},{a2}) share a row or column")));
                }
            }
            if positions.iter().any(|&(r, _)| r == a) {
                return Err(Error::InvalidPattern(format!("column {a} is also a pattern row")));
            }
        }
        Ok(Pattern { positions })
    }

    pub fn empty() -> Self {
        Pattern::default()
    }

    pub fn positions(&self) -> &[(usize, usize)] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Pattern rows p_I.
    pub fn rows(&self) -> Vec<usize> {
        self.positions.iter().map(|&(b, _)| b).collect()
    }

    /// Pattern columns p_J.
    pub fn cols(&self) -> Vec<usize> {
        self.positions.iter().map(|&(_, a)| a).collect()
    }

    /// p_I lies in the second row of t and p_J avoids it.
    pub fn fits(&self, t: &TwoRowTableau) -> bool {
        self.positions.iter().all(|&(b, a)| t.contains(b) && !t.contains(a))
    }

    /// Every pattern that fits t, ordered by size then positions.
    pub fn all_fitting(t: &TwoRowTableau) -> Vec<Pattern> {
        let rows = t.row2.clone();
        let cols = t.row1();
        let mut out = Vec::new();
        let mut cur: Vec<(usize, usize)> = Vec::new();
        fn rec(i: usize, rows: &[usize], cols: &[usize], cur: &mut Vec<(usize, usize)>, out: &mut Vec<Pattern>) {
            if i == rows.len() {
                out.push(Pattern::new(cur.clone()).expect("valid by construction"));
                return;
            }
            rec(i + 1, rows, cols, cur, out);
            let b = rows[i];
            for &a in cols.iter().filter(|&&a| a < b) {
                if cur.iter().any(|&(_, c)| c == a) {
                    continue;
                }
                cur.push((b, a));
                rec(i + 1, rows, cols, cur, out);
                cur.pop();
            }
        }
        rec(0, &rows, &cols, &mut cur, &mut out);
        out.sort_by(|x, y| (x.len(), &x.positions).cmp(&(y.len(), &y.positions)));
        out
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.positions.iter().map(|(b, a)| format!("({b},{a})")).collect();
        write!(f, "{}", parts.join(";"))
    }
}

/// A pattern together with its nonzero entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct FilledPattern {
    pub entries: Vec<((usize, usize), Fq)>,
}

impl FilledPattern {
    pub fn pattern(&self) -> Pattern {
        Pattern::new(self.entries.iter().map(|&(pos, _)| pos).collect()).expect("filled pattern holds a valid pattern")
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn filling_string(&self) -> String {
        self.entries.iter().map(|(_, v)| v.to_string()).collect::<Vec<_>>().join(";")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Pattern::new(vec![(3, 1), (4, 2)]).is_ok());
        assert!(Pattern::new(vec![(3, 1), (4, 1)]).is_err());
        assert!(Pattern::new(vec![(3, 1), (3, 2)]).is_err());
        assert!(Pattern::new(vec![(2, 2)]).is_err());
        assert!(Pattern::new(vec![(4, 3), (3, 1)]).is_err());
    }

    #[test]
    fn fitting_patterns_34() {
        let t = TwoRowTableau::new(4, vec![3, 4]).unwrap();
        let ps = Pattern::all_fitting(&t);
        // empty, four singletons, two full
        assert_eq!(ps.len(), 7);
        assert!(ps.iter().all(|p| p.fits(&t)));
    }

    #[test]
    fn fit_rules() {
        let t = TwoRowTableau::new(8, vec![3, 5, 7, 8]).unwrap();
        assert!(Pattern::new(vec![(5, 2), (8, 6)]).unwrap().fits(&t));
        assert!(!Pattern::new(vec![(5, 3)]).unwrap().fits(&t));
        assert!(!Pattern::new(vec![(6, 2)]).unwrap().fits(&t));
    }
}
