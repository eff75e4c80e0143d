//! Orbits of U^w∩U on the idempotent basis of a batch.
//!
//! For a batch with tableau t the positive roots (i, j), i > j, fall into
//! three families: Υ1 (i in t, j not in t) acting by scalars, Υ2 (neither in
//! t) acting by truncated column operations on labels, and Υ3 (both in t)
//! acting by truncated row operations. The remaining (mixed) roots do not act
//! monomially. Orbits are classified by the unique pattern matrix they
//! contain.

use std::collections::{BTreeMap, VecDeque};

use rand::Rng;
use rayon::prelude::*;

use crate::character::Characters;
use crate::cyclotomic::Root;
use crate::error::{Error, Result};
use crate::field::{Fq, GaloisField};
use crate::flag::{Batch, FlagSpace, GroupElement, Label};
use crate::module_vector::{Basis, ModuleVector};
use crate::pattern::{FilledPattern, Pattern};
use crate::tableau::{remove_and_shift, TwoRowTableau};
use crate::Cyc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RootKind {
    /// Υ1: acts on e_L by the scalar θ(l_{ij} α).
    Scalar,
    /// Υ2: truncated column operation.
    Column,
    /// Υ3: truncated row operation.
    Row,
    /// Outside U^w∩U.
    Mixed,
}

pub fn root_kind(t: &TwoRowTableau, i: usize, j: usize) -> RootKind {
    assert!(i > j, "positive roots have i > j");
    match (t.contains(i), t.contains(j)) {
        (true, false) => RootKind::Scalar,
        (false, false) => RootKind::Column,
        (true, true) => RootKind::Row,
        (false, true) => RootKind::Mixed,
    }
}

/// The root sets Υ1, Υ2, Υ3 of a tableau.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Upsilon {
    pub scalar: Vec<(usize, usize)>,
    pub column: Vec<(usize, usize)>,
    pub row: Vec<(usize, usize)>,
}

impl Upsilon {
    pub fn of(t: &TwoRowTableau) -> Self {
        let mut u = Upsilon::default();
        for i in 1..=t.n {
            for j in 1..i {
                match root_kind(t, i, j) {
                    RootKind::Scalar => u.scalar.push((i, j)),
                    RootKind::Column => u.column.push((i, j)),
                    RootKind::Row => u.row.push((i, j)),
                    RootKind::Mixed => {}
                }
            }
        }
        u
    }

    pub fn len(&self) -> usize {
        self.scalar.len() + self.column.len() + self.row.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Column operation of x_{ij}(α), i, j not in t: for every row b > i,
/// l_{bi} ← l_{bi} − α l_{bj}.
pub fn column_op(field: &GaloisField, batch: &Batch, d: &mut [Fq], i: usize, j: usize, alpha: Fq) {
    for &b in batch.tableau.row2.iter().filter(|&&b| b > i) {
        let (si, sj) = (batch.slot(b, i).expect("(b,i) free"), batch.slot(b, j).expect("(b,j) free"));
        d[si] = field.sub(d[si], field.mul(alpha, d[sj]));
    }
}

/// Row operation of x_{ij}(α), i, j in t: row j gains α times row i on the
/// free columns left of j.
pub fn row_op(field: &GaloisField, batch: &Batch, d: &mut [Fq], i: usize, j: usize, alpha: Fq) {
    for v in 1..j {
        if let Some(sj) = batch.slot(j, v) {
            let si = batch.slot(i, v).expect("(i,v) free");
            d[sj] = field.add(d[sj], field.mul(alpha, d[si]));
        }
    }
}

/// e_L ∘ x_{ij}(α) = c · e_K in closed form; returns (digits of K, c).
pub fn monomial_action(
    chars: &Characters,
    batch: &Batch,
    digits: &[Fq],
    i: usize,
    j: usize,
    alpha: Fq,
) -> Result<(Vec<Fq>, Root)> {
    let field = chars.field();
    let mut d = digits.to_vec();
    let c = match root_kind(&batch.tableau, i, j) {
        RootKind::Scalar => {
            let s = batch.slot(i, j).expect("Υ1 roots are free positions");
            chars.theta(field.mul(d[s], alpha))
        }
        RootKind::Column => {
            column_op(field, batch, &mut d, i, j, alpha);
            Root::one(chars.p())
        }
        RootKind::Row => {
            row_op(field, batch, &mut d, i, j, alpha);
            Root::one(chars.p())
        }
        RootKind::Mixed => return Err(Error::RootOutsideUpsilon(i, j)),
    };
    Ok((d, c))
}

/// Bring a label to the pattern matrix of its orbit: repeatedly take the
/// leftmost nonzero column, keep its lowest nonzero entry and clear the rest
/// of its hook with truncated operations.
pub fn canonical_pattern(field: &GaloisField, batch: &Batch, digits: &[Fq]) -> (Vec<Fq>, FilledPattern) {
    let t = &batch.tableau;
    let mut d = digits.to_vec();
    let mut corners = Vec::new();
    for j in 1..=t.n {
        if t.contains(j) {
            continue;
        }
        let Some(&b) = t.row2.iter().rev().find(|&&b| b > j && !d[batch.slot(b, j).unwrap()].is_zero()) else {
            continue;
        };
        let pivot = d[batch.slot(b, j).unwrap()];
        let inv = field.inv(pivot).expect("nonzero pivot");
        for &u in t.row2.iter().filter(|&&u| u > j && u < b) {
            let x = d[batch.slot(u, j).unwrap()];
            if !x.is_zero() {
                row_op(field, batch, &mut d, b, u, field.neg(field.mul(x, inv)));
            }
        }
        for v in j + 1..b {
            if let Some(s) = batch.slot(b, v) {
                let x = d[s];
                if !x.is_zero() {
                    column_op(field, batch, &mut d, v, j, field.mul(x, inv));
                }
            }
        }
        corners.push(((b, j), pivot));
    }
    corners.sort();
    (d, FilledPattern { entries: corners })
}

/// Whether a label has at most one nonzero free entry per row and column.
pub fn is_pattern_matrix(batch: &Batch, digits: &[Fq]) -> bool {
    let mut rows = Vec::new();
    let mut cols = Vec::new();
    for (&(b, j), d) in batch.positions.iter().zip(digits) {
        if !d.is_zero() {
            if rows.contains(&b) || cols.contains(&j) {
                return false;
            }
            rows.push(b);
            cols.push(j);
        }
    }
    true
}

/// The filled pattern read off a pattern matrix.
pub fn pattern_of_matrix(batch: &Batch, digits: &[Fq]) -> Result<FilledPattern> {
    if !is_pattern_matrix(batch, digits) {
        return Err(Error::InvalidPattern("label is not a pattern matrix".into()));
    }
    let entries = batch.positions.iter().zip(digits).filter(|(_, d)| !d.is_zero()).map(|(&pos, &d)| (pos, d)).collect();
    Ok(FilledPattern { entries })
}

/// The label of the pattern matrix with the given filled pattern.
pub fn pattern_key(batch: &Batch, fp: &FilledPattern) -> Result<u64> {
    let mut d = vec![Fq::ZERO; batch.dim()];
    for &((b, j), v) in &fp.entries {
        let s = batch.slot(b, j).ok_or(Error::PatternMismatch)?;
        d[s] = v;
    }
    Ok(batch.key(&d))
}

/// Orbit of a label under Υ2 ∪ Υ3 by breadth-first search over the closed
/// forms; returns sorted member keys.
pub fn orbit_bfs(field: &GaloisField, batch: &Batch, start: u64) -> Vec<u64> {
    let u = Upsilon::of(&batch.tableau);
    let ops: Vec<(bool, usize, usize, Fq)> = u
        .column
        .iter()
        .map(|&(i, j)| (true, i, j))
        .chain(u.row.iter().map(|&(i, j)| (false, i, j)))
        .flat_map(|(c, i, j)| field.nonzero().map(move |a| (c, i, j, a)))
        .collect();
    let mut seen = std::collections::HashSet::new();
    let mut queue = VecDeque::from([start]);
    seen.insert(start);
    while let Some(k) = queue.pop_front() {
        let d = batch.digits(k);
        for &(is_col, i, j, a) in &ops {
            let mut e = d.clone();
            if is_col {
                column_op(field, batch, &mut e, i, j, a);
            } else {
                row_op(field, batch, &mut e, i, j, a);
            }
            let k2 = batch.key(&e);
            if seen.insert(k2) {
                queue.push_back(k2);
            }
        }
    }
    let mut out: Vec<u64> = seen.into_iter().collect();
    out.sort_unstable();
    out
}

/// Orbit size exponent from the pattern alone: k − s with
/// k = Σ_i ((b_i − v_i) − |Z_i|), Z_i = {j : b_j > b_i > v_j > v_i}.
pub fn orbit_dimension_exponent(p: &Pattern) -> usize {
    let pos = p.positions();
    let k: usize = pos
        .iter()
        .map(|&(b, v)| {
            let z = pos.iter().filter(|&&(bj, vj)| bj > b && b > vj && vj > v).count();
            (b - v) - z
        })
        .sum();
    k - pos.len()
}

/// Hook of a free position: cells above it in its column and right of it in
/// its row, both restricted to J_t.
pub fn hook(t: &TwoRowTableau, b: usize, j: usize) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
    let leg = t.row2.iter().filter(|&&u| u > j && u < b).map(|&u| (u, j)).collect();
    let arm = (j + 1..b).filter(|v| !t.contains(*v)).map(|v| (b, v)).collect();
    (leg, arm)
}

/// Stabilizer bookkeeping for the pattern idempotent of a batch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerReport {
    /// Υ1, acting by scalars.
    pub scalar: Vec<(usize, usize)>,
    /// Column roots fixing e_L.
    pub column_stab: Vec<(usize, usize)>,
    /// Row roots fixing e_L.
    pub row_stab: Vec<(usize, usize)>,
    /// Column roots whose effect a row root undoes: ((i, j), (s, b)).
    pub paired: Vec<((usize, usize), (usize, usize))>,
    /// Coset representatives from column roots.
    pub gamma1: Vec<(usize, usize)>,
    /// Coset representatives from row roots.
    pub gamma2: Vec<(usize, usize)>,
}

impl StabilizerReport {
    pub fn orbit_exponent(&self) -> usize {
        self.gamma1.len() + self.gamma2.len()
    }
}

pub fn stabilizer_generators(t: &TwoRowTableau, p: &Pattern) -> Result<StabilizerReport> {
    if !p.fits(t) {
        return Err(Error::PatternMismatch);
    }
    let u = Upsilon::of(t);
    let pos = p.positions();
    let corner_of_col = |j: usize| pos.iter().find(|&&(_, a)| a == j).map(|&(b, _)| b);
    let corner_of_row = |i: usize| pos.iter().find(|&&(b, _)| b == i).map(|&(_, a)| a);
    let mut rep = StabilizerReport {
        scalar: u.scalar.clone(),
        column_stab: vec![],
        row_stab: vec![],
        paired: vec![],
        gamma1: vec![],
        gamma2: vec![],
    };
    for &(i, j) in &u.column {
        match corner_of_col(j) {
            Some(b) if b > i => match corner_of_row_col(pos, i) {
                // only a positive row root (s, b) can compensate
                Some(s) if s > b => rep.paired.push(((i, j), (s, b))),
                _ => rep.gamma1.push((i, j)),
            },
            _ => rep.column_stab.push((i, j)),
        }
    }
    for &(i, j) in &u.row {
        match corner_of_row(i) {
            Some(v) if v < j => rep.gamma2.push((i, j)),
            _ => rep.row_stab.push((i, j)),
        }
    }
    Ok(rep)
}

/// Row of the corner in column i, if i is a pattern column.
fn corner_of_row_col(pos: &[(usize, usize)], i: usize) -> Option<usize> {
    pos.iter().find(|&&(_, a)| a == i).map(|&(b, _)| b)
}

/// Whether a batch member can lead a Specht vector: the tableau left after
/// deleting the pattern rows and columns is standard.
pub fn eligible(t: &TwoRowTableau, p: &Pattern) -> Result<bool> {
    Ok(remove_and_shift(t, p)?.is_standard())
}

/// One orbit of a batch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitRecord {
    pub batch: u32,
    pub pattern: FilledPattern,
    pub pattern_key: u64,
    pub exponent: usize,
    pub size: u64,
    pub eligible: bool,
}

/// Orbit decomposition of a whole flag space.
#[derive(Debug, Clone)]
pub struct OrbitCensus {
    /// Per batch: member key → index into `orbits`.
    member_orbit: Vec<Vec<u32>>,
    pub orbits: Vec<OrbitRecord>,
}

impl OrbitCensus {
    pub fn new(fs: &FlagSpace) -> Self {
        let per_batch: Vec<(Vec<u64>, Vec<OrbitRecord>)> =
            (0..fs.batches().len() as u32).into_par_iter().map(|b| batch_orbit_census(fs, b)).collect();
        let mut member_orbit = Vec::with_capacity(per_batch.len());
        let mut orbits = Vec::new();
        for (pkeys, records) in per_batch {
            let base = orbits.len() as u32;
            let index: BTreeMap<u64, u32> = records.iter().enumerate().map(|(i, r)| (r.pattern_key, base + i as u32)).collect();
            member_orbit.push(pkeys.iter().map(|k| index[k]).collect());
            orbits.extend(records);
        }
        OrbitCensus { member_orbit, orbits }
    }

    pub fn orbit_of(&self, l: Label) -> &OrbitRecord {
        &self.orbits[self.member_orbit[l.batch as usize][l.key as usize] as usize]
    }

    pub fn orbit_index(&self, l: Label) -> usize {
        self.member_orbit[l.batch as usize][l.key as usize] as usize
    }

    /// Members of an orbit, sorted.
    pub fn members(&self, orbit: usize) -> Vec<Label> {
        let batch = self.orbits[orbit].batch;
        self.member_orbit[batch as usize]
            .iter()
            .enumerate()
            .filter(|(_, &o)| o as usize == orbit)
            .map(|(k, _)| Label { batch, key: k as u64 })
            .collect()
    }
}

/// Classify every member of a batch by the pattern matrix of its orbit.
/// Returns the pattern key of each member and one record per orbit, ordered
/// by pattern key.
pub fn batch_orbit_census(fs: &FlagSpace, batch: u32) -> (Vec<u64>, Vec<OrbitRecord>) {
    let b = fs.batch(batch);
    let field = fs.field();
    let mut keys = Vec::with_capacity(b.size as usize);
    let mut groups: BTreeMap<u64, (FilledPattern, u64)> = BTreeMap::new();
    for key in b.keys() {
        let (d, fp) = canonical_pattern(field, b, &b.digits(key));
        let pk = b.key(&d);
        keys.push(pk);
        groups.entry(pk).or_insert_with(|| (fp, 0)).1 += 1;
    }
    let records = groups
        .into_iter()
        .map(|(pk, (fp, size))| {
            let p = fp.pattern();
            OrbitRecord {
                batch,
                exponent: orbit_dimension_exponent(&p),
                eligible: eligible(&b.tableau, &p).expect("canonical pattern fits"),
                pattern: fp,
                pattern_key: pk,
                size,
            }
        })
        .collect();
    (keys, records)
}

/// Permutations of a batch under every root element x_{ij}(α), α ≠ 0.
pub fn batch_root_permutations(fs: &FlagSpace, batch: u32) -> Vec<((usize, usize, Fq), Vec<u64>)> {
    let n = fs.n;
    let mut out = Vec::new();
    for i in 1..=n {
        for j in 1..i {
            for a in fs.field().nonzero() {
                let g = GroupElement::root(n, i, j, a);
                out.push(((i, j, a), fs.batch_permutation(batch, &g)));
            }
        }
    }
    out
}

/// Check that the span of an orbit's idempotents is stable under every root
/// element of U, by expanding e_K ∘ g in the matrix basis and transforming
/// back. `perms` comes from `batch_root_permutations`.
pub fn check_u_invariance(
    fs: &FlagSpace,
    chars: &Characters,
    members: &[Label],
    perms: &[((usize, usize, Fq), Vec<u64>)],
) -> std::result::Result<(), String> {
    let Some(first) = members.first() else { return Ok(()) };
    let b = fs.batch(first.batch);
    let size = b.size as usize;
    let mut inside = vec![false; size];
    for l in members {
        inside[l.key as usize] = true;
    }
    let p = chars.p() as usize;
    let all_digits: Vec<Vec<Fq>> = b.keys().map(|k| b.digits(k)).collect();
    let mut buf = vec![0i64; size * p];
    for l in members {
        let ld = &all_digits[l.key as usize];
        let chi: Vec<Root> = all_digits.iter().map(|md| chars.chi_neg(ld, md)).collect();
        for ((i, j, a), perm) in perms {
            buf.iter_mut().for_each(|x| *x = 0);
            for (m, r) in chi.iter().enumerate() {
                buf[perm[m] as usize * p + r.exp as usize] += if r.neg { -1 } else { 1 };
            }
            chars.transform_flat(b.dim(), &mut buf, false);
            for (k, c) in buf.chunks(p).enumerate() {
                if !inside[k] && c.iter().any(|&x| x != c[0]) {
                    return Err(format!(
                        "e_{:?} ∘ x_{i}{j}({}) leaves the orbit at key {k} in batch {:?}",
                        ld, a, b.tableau.row2
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Compare the closed-form action of every Υ root element with the direct
/// computation e_L ∘ g = q^{-|J|} Σ_M χ_L(−M) [M ∘ g] on all labels of a
/// batch. Returns the number of cases checked, or the first mismatch.
pub fn monomial_oracle_check(
    fs: &FlagSpace,
    chars: &Characters,
    batch: u32,
    perms: &[((usize, usize, Fq), Vec<u64>)],
) -> std::result::Result<usize, String> {
    let b = fs.batch(batch);
    let all_digits: Vec<Vec<Fq>> = b.keys().map(|k| b.digits(k)).collect();
    let mut cases = 0;
    let mut image = vec![Root::one(chars.p()); b.size as usize];
    for ld in &all_digits {
        for ((i, j, a), perm) in perms {
            if root_kind(&b.tableau, *i, *j) == RootKind::Mixed {
                continue;
            }
            let (kd, c) = monomial_action(chars, b, ld, *i, *j, *a).map_err(|e| e.to_string())?;
            for (m, md) in all_digits.iter().enumerate() {
                image[perm[m] as usize] = chars.chi_neg(ld, md);
            }
            for (m, md) in all_digits.iter().enumerate() {
                let want = c.mul(chars.chi_neg(&kd, md));
                if want.normalized() != image[m].normalized() {
                    return Err(format!(
                        "batch {:?}: e_{:?} ∘ x_{i}{j}({a}) differs from the closed form {:?}·e_{:?} at [M] = {:?}",
                        b.tableau.row2, ld, c, kd, md
                    ));
                }
            }
            cases += 1;
        }
    }
    Ok(cases)
}

/// Leg and arm cells (without corners) of all hooks of a pattern.
pub fn averaging_set(t: &TwoRowTableau, p: &Pattern) -> Vec<(usize, usize)> {
    let mut omega: Vec<(usize, usize)> = Vec::new();
    for &(b, j) in p.positions() {
        let (leg, arm) = hook(t, b, j);
        omega.extend(leg);
        omega.extend(arm);
    }
    omega.sort_unstable();
    omega.dedup();
    omega
}

/// Apply the averaging element ∏_{(b,v)∈Ω} Σ_α x_{bv}(α) to a random vector
/// of the orbit module with e_L-coefficient 1 and compare with q^{|Ω|} e_L.
/// The action is computed in the matrix basis through the circle action.
pub fn check_cyclic_generation<R: Rng>(
    fs: &FlagSpace,
    chars: &Characters,
    orbit: &OrbitRecord,
    members: &[Label],
    rng: &mut R,
) -> std::result::Result<(), String> {
    let b = fs.batch(orbit.batch);
    let pattern = orbit.pattern.pattern();
    let omega = averaging_set(&b.tableau, &pattern);
    let lead = Label { batch: orbit.batch, key: orbit.pattern_key };
    let mut x = ModuleVector::zero(Basis::Idempotent);
    x.add_term(lead, Cyc::from_int(1));
    for &l in members {
        if l != lead {
            x.add_term(l, Cyc::from_int(rng.gen_range(1..=5)));
        }
    }
    let mut v = chars.to_matrix(fs, &x);
    for &(bb, vv) in &omega {
        let mut acc = ModuleVector::zero(Basis::Matrix);
        for a in fs.field().elements() {
            if a.is_zero() {
                acc.axpy(&Cyc::from_int(1), &v);
                continue;
            }
            let g = GroupElement::root(fs.n, bb, vv, a);
            for (&l, c) in &v.terms {
                acc.add_term(fs.act(l, &g), c.clone());
            }
        }
        v = acc;
    }
    let q_pow = Cyc::from_int((fs.q() as i64).pow(omega.len() as u32));
    let want = chars.idempotent(fs, lead).scaled(&q_pow);
    if v == want {
        Ok(())
    } else {
        Err(format!("averaging over {omega:?} does not isolate the pattern idempotent of {:?}", b.tableau.row2))
    }
}

impl Characters {
    /// Fast transform on a flat buffer of redundant Z[ζ_p] coefficients,
    /// `data[key * p + e]` being the coefficient of ζ^e at `key`.
    pub fn transform_flat(&self, dim: usize, data: &mut [i64], negate: bool) {
        let q = self.q() as usize;
        let p = self.p() as usize;
        let field = self.field();
        let kernel: Vec<Vec<Root>> = (0..q)
            .map(|k| {
                (0..q)
                    .map(|m| {
                        let x = field.mul(Fq(k as u8), Fq(m as u8));
                        self.theta(if negate { field.neg(x) } else { x })
                    })
                    .collect()
            })
            .collect();
        let mut buf = vec![0i64; q * p];
        for axis in 0..dim {
            let stride = q.pow((dim - 1 - axis) as u32);
            let block = stride * q;
            let len = data.len() / p;
            for base in (0..len).step_by(block) {
                for off in 0..stride {
                    buf.iter_mut().for_each(|x| *x = 0);
                    for (k, row) in kernel.iter().enumerate() {
                        for (mi, r) in row.iter().enumerate() {
                            let src = (base + off + mi * stride) * p;
                            let sign = if r.neg { -1 } else { 1 };
                            for e in 0..p {
                                let c = data[src + e];
                                if c != 0 {
                                    buf[k * p + (e + r.exp as usize) % p] += sign * c;
                                }
                            }
                        }
                    }
                    for k in 0..q {
                        let dst = (base + off + k * stride) * p;
                        data[dst..dst + p].copy_from_slice(&buf[k * p..(k + 1) * p]);
                    }
                }
            }
        }
    }
}
