//! The canonical matrices Ξ_{m,n}: one row-reduced representative per
//! m-dimensional subspace of GF(q)^n, grouped into batches by tableau.
//!
//! A representative has a "last 1" at column b_i in the row labelled b_i,
//! zeros to the right of it, and zeros elsewhere in every label column. The
//! remaining entries (b_i, j) with j < b_i and j not a label are free; they
//! are stored as a radix-q key so that batch members are numbered
//! `0..q^{|J_t|}` in lexicographic order of their free entries.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fq, GaloisField};
use crate::poly::gaussian_binomial;
use crate::tableau::{subsets, TwoRowTableau};

/// Position of a matrix inside a `FlagSpace`: batch index (lexicographic in
/// the second row) and member key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Label {
    pub batch: u32,
    pub key: u64,
}

#[derive(Debug, Clone)]
pub struct Batch {
    pub tableau: TwoRowTableau,
    /// Free positions J_t as (row label, column), sorted.
    pub positions: Vec<(usize, usize)>,
    slot: Vec<Option<u8>>,
    n: usize,
    q: u64,
    pub size: u64,
}

impl Batch {
    fn new(tableau: TwoRowTableau, q: u64) -> Self {
        let n = tableau.n;
        let mut positions = Vec::new();
        for &b in &tableau.row2 {
            for j in 1..b {
                if !tableau.contains(j) {
                    positions.push((b, j));
                }
            }
        }
        let mut slot = vec![None; n * n];
        for (i, &(b, j)) in positions.iter().enumerate() {
            slot[(b - 1) * n + (j - 1)] = Some(i as u8);
        }
        let size = q.pow(positions.len() as u32);
        Batch { tableau, positions, slot, n, q, size }
    }

    /// |J_t|.
    pub fn dim(&self) -> usize {
        self.positions.len()
    }

    /// Index of (row, col) inside J_t.
    #[inline]
    pub fn slot(&self, row: usize, col: usize) -> Option<usize> {
        if row == 0 || col == 0 || row > self.n || col > self.n {
            return None;
        }
        self.slot[(row - 1) * self.n + (col - 1)].map(|s| s as usize)
    }

    pub fn digits(&self, key: u64) -> Vec<Fq> {
        let d = self.dim();
        let mut out = vec![Fq::ZERO; d];
        let mut k = key;
        for i in (0..d).rev() {
            out[i] = Fq((k % self.q) as u8);
            k /= self.q;
        }
        out
    }

    pub fn key(&self, digits: &[Fq]) -> u64 {
        digits.iter().fold(0, |acc, d| acc * self.q + d.0 as u64)
    }

    pub fn keys(&self) -> std::ops::Range<u64> {
        0..self.size
    }
}

/// A canonical representative: row labels b_1 < … < b_m and a dense m×n body.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalMatrix {
    pub n: usize,
    pub row_labels: Vec<usize>,
    pub rows: Vec<Vec<Fq>>,
}

impl NormalMatrix {
    pub fn m(&self) -> usize {
        self.row_labels.len()
    }

    /// Entry in the row labelled `b`, column `j` (both 1-based).
    pub fn entry(&self, b: usize, j: usize) -> Fq {
        let r = self.row_labels.binary_search(&b).expect("row label");
        self.rows[r][j - 1]
    }

    pub fn tableau(&self) -> TwoRowTableau {
        TwoRowTableau { n: self.n, m: self.m(), row2: self.row_labels.clone() }
    }

    /// Check the defining conditions of the canonical form.
    pub fn is_normal(&self) -> bool {
        if self.rows.len() != self.row_labels.len() || self.row_labels.windows(2).any(|w| w[0] >= w[1]) {
            return false;
        }
        for (r, &b) in self.row_labels.iter().enumerate() {
            if self.rows[r].len() != self.n || self.rows[r][b - 1] != Fq::ONE {
                return false;
            }
            if self.rows[r][b..].iter().any(|x| !x.is_zero()) {
                return false;
            }
            for (r2, &b2) in self.row_labels.iter().enumerate() {
                if r2 != r && !self.rows[r][b2 - 1].is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Display for NormalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (b, row) in self.row_labels.iter().zip(&self.rows) {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "{b}: [{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Row-reduce an m×n matrix of full row rank to its canonical representative.
pub fn normal_form(field: &GaloisField, n: usize, rows: &[Vec<Fq>]) -> Result<NormalMatrix> {
    let m = rows.len();
    let mut a: Vec<Vec<Fq>> = rows.to_vec();
    let mut labels = Vec::with_capacity(m);
    let mut r = 0;
    for col in (0..n).rev() {
        if r == m {
            break;
        }
        let Some(piv) = (r..m).find(|&i| !a[i][col].is_zero()) else { continue };
        a.swap(r, piv);
        let inv = field.inv(a[r][col])?;
        for x in a[r].iter_mut() {
            *x = field.mul(*x, inv);
        }
        for i in 0..m {
            if i != r && !a[i][col].is_zero() {
                let c = a[i][col];
                for k in 0..n {
                    let t = field.mul(c, a[r][k]);
                    a[i][k] = field.sub(a[i][k], t);
                }
            }
        }
        labels.push(col + 1);
        r += 1;
    }
    if r < m {
        return Err(Error::RankDeficient);
    }
    a.reverse();
    labels.reverse();
    Ok(NormalMatrix { n, row_labels: labels, rows: a })
}

/// An element of GL_n(q), stored densely; the unitriangular group U consists
/// of lower unitriangular matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupElement {
    pub entries: Vec<Vec<Fq>>,
}

impl GroupElement {
    pub fn identity(n: usize) -> Self {
        let mut entries = vec![vec![Fq::ZERO; n]; n];
        for (i, row) in entries.iter_mut().enumerate() {
            row[i] = Fq::ONE;
        }
        GroupElement { entries }
    }

    /// The root element x_{ij}(α) = E + α ε_{ij}, with i > j (1-based).
    pub fn root(n: usize, i: usize, j: usize, alpha: Fq) -> Self {
        assert!(i > j && i <= n && j >= 1, "positive root needs i > j");
        let mut g = Self::identity(n);
        g.entries[i - 1][j - 1] = alpha;
        g
    }

    pub fn mul(&self, field: &GaloisField, o: &GroupElement) -> GroupElement {
        let n = self.entries.len();
        let mut out = vec![vec![Fq::ZERO; n]; n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[i][j] = field.add(out[i][j], field.mul(a, o.entries[k][j]));
                }
            }
        }
        GroupElement { entries: out }
    }
}

/// The right action L ∘ g = normal form of L·g.
pub fn circle_action(field: &GaloisField, l: &NormalMatrix, g: &GroupElement) -> NormalMatrix {
    let n = l.n;
    let rows: Vec<Vec<Fq>> = l
        .rows
        .iter()
        .map(|row| {
            let mut out = vec![Fq::ZERO; n];
            for (k, &x) in row.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (j, o) in out.iter_mut().enumerate() {
                    *o = field.add(*o, field.mul(x, g.entries[k][j]));
                }
            }
            out
        })
        .collect();
    normal_form(field, n, &rows).expect("invertible action preserves rank")
}

/// Ξ_{m,n} over GF(q) with its batch structure.
#[derive(Debug, Clone)]
pub struct FlagSpace {
    pub n: usize,
    pub m: usize,
    field: Arc<GaloisField>,
    batches: Vec<Batch>,
    offsets: Vec<u64>,
    total: u64,
}

impl FlagSpace {
    /// Build the batch index; fails if [n m]_q exceeds `budget`.
    pub fn new(n: usize, m: usize, field: Arc<GaloisField>, budget: u64) -> Result<Self> {
        if m > n {
            return Err(Error::InvalidShape(format!("m = {m} exceeds n = {n}")));
        }
        let q = field.q() as u64;
        let needed = gaussian_binomial(n as u32, m as u32, q);
        if needed > budget as u128 {
            return Err(Error::BudgetExceeded { needed, budget });
        }
        let batches: Vec<Batch> =
            subsets(n, m).into_iter().map(|row2| Batch::new(TwoRowTableau { n, m, row2 }, q)).collect();
        let mut offsets = Vec::with_capacity(batches.len());
        let mut total = 0;
        for b in &batches {
            offsets.push(total);
            total += b.size;
        }
        debug_assert_eq!(total as u128, needed);
        Ok(FlagSpace { n, m, field, batches, offsets, total })
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn field_arc(&self) -> Arc<GaloisField> {
        self.field.clone()
    }

    pub fn q(&self) -> u64 {
        self.field.q() as u64
    }

    /// |Ξ_{m,n}|.
    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn batches(&self) -> &[Batch] {
        &self.batches
    }

    pub fn batch(&self, i: u32) -> &Batch {
        &self.batches[i as usize]
    }

    pub fn batch_index(&self, row2: &[usize]) -> Option<u32> {
        self.batches.binary_search_by(|b| b.tableau.row2.as_slice().cmp(row2)).ok().map(|i| i as u32)
    }

    pub fn global(&self, l: Label) -> usize {
        (self.offsets[l.batch as usize] + l.key) as usize
    }

    pub fn label_at(&self, idx: usize) -> Label {
        let idx = idx as u64;
        let b = self.offsets.partition_point(|&o| o <= idx) - 1;
        Label { batch: b as u32, key: idx - self.offsets[b] }
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        self.batches
            .iter()
            .enumerate()
            .flat_map(|(i, b)| b.keys().map(move |key| Label { batch: i as u32, key }))
    }

    pub fn batch_labels(&self, batch: u32) -> impl Iterator<Item = Label> + '_ {
        self.batches[batch as usize].keys().map(move |key| Label { batch, key })
    }

    pub fn matrix(&self, l: Label) -> NormalMatrix {
        let b = &self.batches[l.batch as usize];
        let digits = b.digits(l.key);
        let labels = b.tableau.row2.clone();
        let mut rows = vec![vec![Fq::ZERO; self.n]; self.m];
        for (r, &bl) in labels.iter().enumerate() {
            rows[r][bl - 1] = Fq::ONE;
        }
        for (&(row, col), &d) in b.positions.iter().zip(&digits) {
            let r = labels.binary_search(&row).expect("label");
            rows[r][col - 1] = d;
        }
        NormalMatrix { n: self.n, row_labels: labels, rows }
    }

    pub fn encode(&self, l: &NormalMatrix) -> Result<Label> {
        if l.n != self.n || l.m() != self.m || !l.is_normal() {
            return Err(Error::InvalidShape("matrix is not a canonical representative of this space".into()));
        }
        let batch = self.batch_index(&l.row_labels).ok_or(Error::BatchMismatch)?;
        let b = &self.batches[batch as usize];
        let digits: Vec<Fq> = b.positions.iter().map(|&(row, col)| l.entry(row, col)).collect();
        Ok(Label { batch, key: b.key(&digits) })
    }

    /// Every canonical representative, batch by batch.
    pub fn enumerate(&self) -> impl Iterator<Item = NormalMatrix> + '_ {
        self.labels().map(|l| self.matrix(l))
    }

    /// Label of L ∘ g.
    pub fn act(&self, l: Label, g: &GroupElement) -> Label {
        let out = circle_action(&self.field, &self.matrix(l), g);
        self.encode(&out).expect("action stays in the space")
    }

    /// Permutation of batch `batch` induced by g: `perm[key] = key of L∘g`.
    pub fn batch_permutation(&self, batch: u32, g: &GroupElement) -> Vec<u64> {
        self.batch_labels(batch)
            .map(|l| {
                let out = self.act(l, g);
                debug_assert_eq!(out.batch, batch, "U preserves batches");
                out.key
            })
            .collect()
    }

    /// Diamond-group product: entrywise sum of free entries.
    pub fn diamond_add(&self, a: Label, b: Label) -> Result<Label> {
        if a.batch != b.batch {
            return Err(Error::BatchMismatch);
        }
        let batch = &self.batches[a.batch as usize];
        let da = batch.digits(a.key);
        let db = batch.digits(b.key);
        let sum: Vec<Fq> = da.iter().zip(&db).map(|(&x, &y)| self.field.add(x, y)).collect();
        Ok(Label { batch: a.batch, key: batch.key(&sum) })
    }

    /// Breadth-first closure of `start` under the root elements of U.
    pub fn u_closure(&self, start: Label) -> Vec<Label> {
        let mut seen = vec![false; self.batches[start.batch as usize].size as usize];
        let mut queue = VecDeque::from([start]);
        seen[start.key as usize] = true;
        let mut gens = Vec::new();
        for i in 1..=self.n {
            for j in 1..i {
                for a in self.field.nonzero() {
                    gens.push(GroupElement::root(self.n, i, j, a));
                }
            }
        }
        let mut out = Vec::new();
        while let Some(l) = queue.pop_front() {
            out.push(l);
            for g in &gens {
                let k = self.act(l, g);
                if k.batch == start.batch && !seen[k.key as usize] {
                    seen[k.key as usize] = true;
                    queue.push_back(k);
                }
            }
        }
        out.sort();
        out
    }
}
