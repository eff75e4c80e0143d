//! Sparse exact linear algebra over any `Scalar` field.
//!
//! Everything is built on an incremental echelon form whose rows remember
//! how they were obtained from the inserted vectors, which gives kernels,
//! ranks, membership tests and solutions from one mechanism.

use std::collections::BTreeMap;

use crate::scalar::Scalar;

pub type SparseVec<S> = BTreeMap<usize, S>;

/// `acc += c * v`, dropping cancelled entries.
pub fn axpy<S: Scalar>(acc: &mut SparseVec<S>, c: &S, v: &SparseVec<S>) {
    for (&k, x) in v {
        let term = c.clone() * x.clone();
        match acc.get_mut(&k) {
            Some(y) => {
                let s = y.clone() + term;
                if s.is_zero() {
                    acc.remove(&k);
                } else {
                    *y = s;
                }
            }
            None => {
                if !term.is_zero() {
                    acc.insert(k, term);
                }
            }
        }
    }
}

pub fn scale<S: Scalar>(v: &SparseVec<S>, c: &S) -> SparseVec<S> {
    if c.is_zero() {
        return SparseVec::new();
    }
    v.iter().map(|(&k, x)| (k, c.clone() * x.clone())).collect()
}

/// Outcome of offering a vector to an `Echelon`.
#[derive(Debug, Clone, PartialEq)]
pub enum Insert<S> {
    /// The vector was independent; its echelon row has this pivot column.
    Independent(usize),
    /// The vector was dependent: `coeffs` expresses it through earlier
    /// inserted vectors (keys are insertion ids).
    Dependent(SparseVec<S>),
}

#[derive(Debug, Clone)]
pub struct Echelon<S> {
    rows: Vec<SparseVec<S>>,
    tracks: Vec<SparseVec<S>>,
    pivot_row: BTreeMap<usize, usize>,
    inserted: usize,
}

impl<S: Scalar> Default for Echelon<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> Echelon<S> {
    pub fn new() -> Self {
        Echelon { rows: Vec::new(), tracks: Vec::new(), pivot_row: BTreeMap::new(), inserted: 0 }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivot_row.keys().copied()
    }

    /// Reduce `v` in place; returns the combination of inserted vectors that
    /// was subtracted.
    pub fn reduce(&self, v: &mut SparseVec<S>) -> SparseVec<S> {
        let mut used = SparseVec::new();
        let mut cursor = 0usize;
        loop {
            let hit = v
                .range(cursor..)
                .find(|(c, _)| self.pivot_row.contains_key(c))
                .map(|(&c, x)| (c, x.clone()));
            let Some((col, coef)) = hit else { break };
            let r = self.pivot_row[&col];
            axpy(v, &(-coef.clone()), &self.rows[r]);
            axpy(&mut used, &coef, &self.tracks[r]);
            cursor = col + 1;
        }
        used
    }

    pub fn contains(&self, v: &SparseVec<S>) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w);
        w.is_empty()
    }

    /// Express `v` through inserted vectors, if it lies in their span.
    pub fn solve(&self, v: &SparseVec<S>) -> Option<SparseVec<S>> {
        let mut w = v.clone();
        let used = self.reduce(&mut w);
        w.is_empty().then_some(used)
    }

    pub fn insert(&mut self, v: SparseVec<S>) -> Insert<S> {
        let id = self.inserted;
        self.inserted += 1;
        let mut w = v;
        let used = self.reduce(&mut w);
        if w.is_empty() {
            return Insert::Dependent(used);
        }
        let (&piv, lead) = w.iter().next().expect("nonempty");
        let inv = S::one() / lead.clone();
        let mut track = scale(&used, &(-S::one()));
        track.insert(id, S::one());
        let row = scale(&w, &inv);
        let track = scale(&track, &inv);
        self.pivot_row.insert(piv, self.rows.len());
        self.rows.push(row);
        self.tracks.push(track);
        Insert::Independent(piv)
    }
}

/// Rank of a list of vectors.
pub fn rank<S: Scalar>(vectors: impl IntoIterator<Item = SparseVec<S>>) -> usize {
    let mut e = Echelon::new();
    for v in vectors {
        e.insert(v);
    }
    e.rank()
}

/// Kernel of the map whose i-th column is `columns[i]`; each kernel vector is
/// indexed by column ids.
pub fn kernel<S: Scalar>(columns: impl IntoIterator<Item = SparseVec<S>>) -> Vec<SparseVec<S>> {
    let mut e = Echelon::new();
    let mut out = Vec::new();
    for (j, col) in columns.into_iter().enumerate() {
        if let Insert::Dependent(used) = e.insert(col) {
            let mut k = scale(&used, &(-S::one()));
            k.insert(j, S::one());
            out.push(k);
        }
    }
    out
}

/// Apply a sparse column map to a sparse vector.
pub fn apply<S: Scalar>(columns: &[SparseVec<S>], v: &SparseVec<S>) -> SparseVec<S> {
    let mut out = SparseVec::new();
    for (&j, c) in v {
        axpy(&mut out, c, &columns[j]);
    }
    out
}

/// Rank of a dense row-major matrix by plain Gaussian elimination. Meant
/// for `ModP`, where entries stay word-sized.
pub fn dense_rank<S: Scalar>(mut rows: Vec<Vec<S>>) -> usize {
    let Some(width) = rows.first().map(Vec::len) else { return 0 };
    let mut rank = 0;
    for col in 0..width {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else { continue };
        rows.swap(rank, p);
        let inv = S::one() / rows[rank][col].clone();
        let pivot: Vec<S> = rows[rank][col..].iter().map(|x| x.clone() * inv.clone()).collect();
        for r in rank + 1..rows.len() {
            let f = rows[r][col].clone();
            if f.is_zero() {
                continue;
            }
            for (x, y) in rows[r][col..].iter_mut().zip(&pivot) {
                *x = x.clone() - f.clone() * y.clone();
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}
