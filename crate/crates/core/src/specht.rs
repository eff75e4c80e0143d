//! The homomorphisms φ_{1,i} and Φ_m = φ_{1,m-1}, the kernel S^(n−m,m) of
//! Φ_m, and its standard basis.
//!
//! Φ_m sends [M] to Σ_d Σ_{N ∈ R_d(M)} [N], where R_d(M) adds multiples of
//! row b_d to the rows below it and then deletes row b_d. The standard basis
//! is built one filled-pattern component at a time in the idempotent bases:
//! for an eligible label L, Φ_m(e_L) is written through the images of the
//! ineligible labels of the same component, which form a basis of the
//! matching component of M^(n−m+1,m−1).

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::character::{inv_q_pow, Characters};
use crate::cyclotomic::ZetaVec;
use crate::error::{Error, Result};
use crate::field::{Fq, GaloisField};
use crate::flag::{normal_form, FlagSpace, Label, NormalMatrix};
use crate::linalg::{self, dense_rank, Echelon, Insert, SparseVec};
use crate::module_vector::{Basis, ModuleVector};
use crate::orbit::{eligible, OrbitCensus};
use crate::pattern::{FilledPattern, Pattern};
use crate::poly::q_integer;
use crate::scalar::{ModP, Scalar};
use crate::tableau::TwoRowTableau;
use crate::{Cyc, Rational};

/// A sparse integer matrix between two permutation modules, stored by
/// columns (one column per source basis element).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomMatrix {
    pub rows: usize,
    /// Per column: (row, value), sorted by row, no zero values.
    pub columns: Vec<Vec<(usize, i64)>>,
}

impl HomMatrix {
    /// Columns given as multisets of row indices.
    pub fn from_multisets(rows: usize, columns: Vec<Vec<usize>>) -> Self {
        let columns = columns
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                let mut out: Vec<(usize, i64)> = Vec::with_capacity(c.len());
                for r in c {
                    match out.last_mut() {
                        Some((last, v)) if *last == r => *v += 1,
                        _ => out.push((r, 1)),
                    }
                }
                out
            })
            .collect();
        HomMatrix { rows, columns }
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    /// Sum of the entries of a column.
    pub fn column_weight(&self, j: usize) -> i64 {
        self.columns[j].iter().map(|&(_, v)| v).sum()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &HomMatrix) -> HomMatrix {
        assert_eq!(inner.rows, self.cols(), "dimension mismatch");
        let columns = inner
            .columns
            .iter()
            .map(|col| {
                let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
                for &(k, a) in col {
                    for &(r, b) in &self.columns[k] {
                        *acc.entry(r).or_insert(0) += a * b;
                    }
                }
                acc.into_iter().filter(|&(_, v)| v != 0).collect()
            })
            .collect();
        HomMatrix { rows: self.rows, columns }
    }

    pub fn scaled(&self, c: i64) -> HomMatrix {
        if c == 0 {
            return HomMatrix { rows: self.rows, columns: vec![Vec::new(); self.cols()] };
        }
        let columns = self.columns.iter().map(|col| col.iter().map(|&(r, v)| (r, v * c)).collect()).collect();
        HomMatrix { rows: self.rows, columns }
    }

    /// Row, column, value triplets in column-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.columns.iter().enumerate().flat_map(|(j, col)| col.iter().map(move |&(i, v)| (i, j, v)))
    }

    pub fn sparse_columns<S: Scalar>(&self, conv: impl Fn(i64) -> S) -> Vec<SparseVec<S>> {
        self.columns.iter().map(|col| col.iter().map(|&(r, v)| (r, conv(v))).collect()).collect()
    }

    pub fn apply<S: Scalar>(&self, v: &SparseVec<S>, conv: impl Fn(i64) -> S) -> SparseVec<S> {
        let mut out = SparseVec::new();
        for (&j, c) in v {
            let col: SparseVec<S> = self.columns[j].iter().map(|&(r, x)| (r, conv(x))).collect();
            linalg::axpy(&mut out, c, &col);
        }
        out
    }

    /// Rank modulo the prime 2^61 − 1. This is a lower bound for the rank
    /// over Q, and equal to it whenever it reaches min(rows, cols).
    pub fn rank_mod_prime(&self) -> usize {
        let mut dense = vec![vec![ModP::zero(); self.cols()]; self.rows];
        for (i, j, v) in self.triplets() {
            dense[i][j] = ModP::new(v);
        }
        dense_rank(dense)
    }

    /// Stack `others` below `self` (same columns).
    pub fn stacked(&self, others: &[&HomMatrix]) -> HomMatrix {
        let mut columns = self.columns.clone();
        let mut offset = self.rows;
        for o in others {
            assert_eq!(o.cols(), self.cols(), "column mismatch");
            for (c, oc) in columns.iter_mut().zip(&o.columns) {
                c.extend(oc.iter().map(|&(r, v)| (r + offset, v)));
            }
            offset += o.rows;
        }
        HomMatrix { rows: offset, columns }
    }
}

/// φ_{1,i} on M^(n−m,m): each m-subspace goes to the sum of its
/// i-dimensional subspaces, found by enumerating canonical i×m coefficient
/// matrices. Returns the target space and the matrix.
pub fn phi_1_i(src: &FlagSpace, i: usize, budget: u64) -> Result<(FlagSpace, HomMatrix)> {
    if i > src.m {
        return Err(Error::InvalidShape(format!("i = {i} exceeds m = {}", src.m)));
    }
    let field = src.field_arc();
    let n = src.n;
    let tgt = FlagSpace::new(n, i, field.clone(), budget)?;
    let coeff = FlagSpace::new(src.m, i, field.clone(), budget)?;
    let coeffs: Vec<NormalMatrix> = coeff.enumerate().collect();
    let columns: Result<Vec<Vec<usize>>> = src
        .labels()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&l| {
            let mat = src.matrix(l);
            coeffs
                .iter()
                .map(|c| {
                    let rows: Vec<Vec<Fq>> = c
                        .rows
                        .iter()
                        .map(|cr| {
                            let mut out = vec![Fq::ZERO; n];
                            for (k, &a) in cr.iter().enumerate() {
                                if !a.is_zero() {
                                    for (o, &x) in out.iter_mut().zip(&mat.rows[k]) {
                                        *o = field.add(*o, field.mul(a, x));
                                    }
                                }
                            }
                            out
                        })
                        .collect();
                    let nf = normal_form(&field, n, &rows)?;
                    Ok(tgt.global(tgt.encode(&nf)?))
                })
                .collect()
        })
        .collect();
    let h = HomMatrix::from_multisets(tgt.len() as usize, columns?);
    Ok((tgt, h))
}

/// Source and target spaces of Φ_m together with the characters.
#[derive(Debug)]
pub struct SpechtSetting {
    pub n: usize,
    pub m: usize,
    pub src: FlagSpace,
    pub tgt: FlagSpace,
    pub chars: Characters,
}

impl SpechtSetting {
    pub fn new(n: usize, m: usize, field: Arc<GaloisField>, budget: u64) -> Result<Self> {
        Self::with_characters(n, m, Characters::new(field), budget)
    }

    pub fn with_characters(n: usize, m: usize, chars: Characters, budget: u64) -> Result<Self> {
        if m == 0 || 2 * m > n {
            return Err(Error::InvalidShape(format!("Φ_m needs 1 ≤ m ≤ n/2, got (n, m) = ({n}, {m})")));
        }
        let field = Arc::new(chars.field().clone());
        let src = FlagSpace::new(n, m, field.clone(), budget)?;
        let tgt = FlagSpace::new(n, m - 1, field, budget)?;
        Ok(SpechtSetting { n, m, src, tgt, chars })
    }

    pub fn field(&self) -> &GaloisField {
        self.src.field()
    }

    /// R_d(M) as target labels, d = 1..=m.
    pub fn r_d(&self, l: Label, d: usize) -> Vec<Label> {
        assert!((1..=self.m).contains(&d), "d out of range");
        let field = self.field();
        let mat = self.src.matrix(l);
        let pivot = mat.rows[d - 1].clone();
        let below = self.m - d;
        let q = self.src.q();
        let mut out = Vec::with_capacity(q.pow(below as u32) as usize);
        for code in 0..q.pow(below as u32) {
            let mut c = code;
            let mut rows = Vec::with_capacity(self.m - 1);
            let mut labels = Vec::with_capacity(self.m - 1);
            for (r, row) in mat.rows.iter().enumerate() {
                if r + 1 == d {
                    continue;
                }
                let mut row = row.clone();
                if r + 1 > d {
                    // digits of `code`, most significant for the row right below b_d
                    let e = q.pow((self.m - r - 1) as u32);
                    let a = Fq(((c / e) % q) as u8);
                    c %= e;
                    if !a.is_zero() {
                        for (x, &y) in row.iter_mut().zip(&pivot) {
                            *x = field.add(*x, field.mul(a, y));
                        }
                    }
                }
                rows.push(row);
                labels.push(mat.row_labels[r]);
            }
            let nm = NormalMatrix { n: self.n, row_labels: labels, rows };
            out.push(self.tgt.encode(&nm).expect("R_d produces canonical matrices"));
        }
        out
    }

    /// Φ_m in the matrix bases, rows and columns indexed by global position.
    pub fn phi_matrix(&self) -> HomMatrix {
        let labels: Vec<Label> = self.src.labels().collect();
        let columns = labels
            .par_iter()
            .map(|&l| (1..=self.m).flat_map(|d| self.r_d(l, d)).map(|k| self.tgt.global(k)).collect())
            .collect();
        HomMatrix::from_multisets(self.tgt.len() as usize, columns)
    }

    /// Φ_m(e_L) in the idempotent basis of the target, by expanding e_L in
    /// the matrix basis, applying R_d and changing basis back. Slow but
    /// independent of the batched path.
    pub fn phi_on_idempotent(&self, l: Label) -> ModuleVector<Cyc> {
        let e = self.chars.idempotent(&self.src, l);
        let image = self.phi_of_matrix_vector(&e);
        self.chars.to_idempotent(&self.tgt, &image)
    }

    /// Φ_m of a matrix-basis vector, in the target matrix basis.
    pub fn phi_of_matrix_vector<S: Scalar>(&self, v: &ModuleVector<S>) -> ModuleVector<S> {
        assert_eq!(v.basis, Basis::Matrix);
        let mut out = ModuleVector::zero(Basis::Matrix);
        for (&l, c) in &v.terms {
            for d in 1..=self.m {
                for k in self.r_d(l, d) {
                    out.add_term(k, c.clone());
                }
            }
        }
        out
    }

    /// Φ_m(e_L) for every L of one source batch, in the target idempotent
    /// basis keyed by target global index. Uses the radix-q transform on a
    /// redundant Z[ζ_p] buffer scaled by q^{|J_t|}.
    pub fn phi_idempotent_batch(&self, batch: u32) -> Vec<SparseVec<Cyc>> {
        let b = self.src.batch(batch);
        let p = self.chars.p() as usize;
        let scale = inv_q_pow(self.src.q(), b.dim());
        let digits: Vec<Vec<Fq>> = b.keys().map(|k| b.digits(k)).collect();
        // per d: target batch and, per source member, the target keys of R_d
        let parts: Vec<(u32, Vec<Vec<u64>>)> = (1..=self.m)
            .map(|d| {
                let table: Vec<Vec<u64>> =
                    b.keys().map(|k| self.r_d(Label { batch, key: k }, d).iter().map(|x| x.key).collect()).collect();
                let mut row2 = b.tableau.row2.clone();
                row2.remove(d - 1);
                (self.tgt.batch_index(&row2).expect("target batch"), table)
            })
            .collect();
        let mut out = Vec::with_capacity(digits.len());
        for ld in &digits {
            let chi: Vec<_> = digits.iter().map(|md| self.chars.chi_neg(ld, md)).collect();
            let mut img = SparseVec::new();
            for (tb, table) in &parts {
                let tbatch = self.tgt.batch(*tb);
                let mut buf = vec![0i64; tbatch.size as usize * p];
                for (mk, targets) in table.iter().enumerate() {
                    let r = chi[mk];
                    let sign = if r.neg { -1 } else { 1 };
                    for &nk in targets {
                        buf[nk as usize * p + r.exp as usize] += sign;
                    }
                }
                self.chars.transform_flat(tbatch.dim(), &mut buf, false);
                for (k, c) in buf.chunks(p).enumerate() {
                    if c.iter().any(|&x| x != c[0]) {
                        let x: Cyc = ZetaVec::from_coeffs(c.to_vec()).to_cyclotomic::<BigInt>() * scale.clone();
                        img.insert(self.tgt.global(Label { batch: *tb, key: k as u64 }), x);
                    }
                }
            }
            out.push(img);
        }
        out
    }

    /// dim ker Φ_m, certified by a modular rank computation when Φ_m is
    /// onto, and by exact rational elimination otherwise.
    pub fn kernel_dimension(&self) -> KernelDimension {
        let phi = self.phi_matrix();
        let modular = phi.rank_mod_prime();
        let (rank, method) = if modular == phi.rows.min(phi.cols()) {
            (modular, RankMethod::ModularCertificate)
        } else {
            let cols = phi.sparse_columns(|v| Rational::from_integer(BigInt::from(v)));
            (linalg::rank(cols), RankMethod::ExactRational)
        };
        KernelDimension { source_dim: phi.cols(), target_dim: phi.rows, rank, dim: phi.cols() - rank, method }
    }

    /// An exact basis of ker Φ_m over Q in the matrix basis.
    pub fn kernel_basis(&self) -> Vec<ModuleVector<Rational>> {
        let phi = self.phi_matrix();
        let cols = phi.sparse_columns(|v| Rational::from_integer(BigInt::from(v)));
        linalg::kernel(cols)
            .into_iter()
            .map(|k| ModuleVector {
                basis: Basis::Matrix,
                terms: k.into_iter().map(|(j, x)| (self.src.label_at(j), x)).collect(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankMethod {
    ModularCertificate,
    ExactRational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelDimension {
    pub source_dim: usize,
    pub target_dim: usize,
    pub rank: usize,
    pub dim: usize,
    pub method: RankMethod,
}

/// Outcome of comparing ∩_{i<m} ker φ_{1,i} with ker Φ_m.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionReport {
    pub kernel_phi_m: usize,
    pub intersection: usize,
    /// φ_{1,m−1} computed by subspace enumeration equals Φ_m from R_d.
    pub phi_m_matches_subspaces: bool,
}

impl IntersectionReport {
    pub fn agrees(&self) -> bool {
        self.phi_m_matches_subspaces && self.kernel_phi_m == self.intersection
    }
}

/// Exact comparison of the kernel intersection with ker Φ_m.
pub fn kernel_intersection_check(setting: &SpechtSetting, budget: u64) -> Result<IntersectionReport> {
    let phi = setting.phi_matrix();
    let maps: Vec<HomMatrix> =
        (0..setting.m).map(|i| phi_1_i(&setting.src, i, budget).map(|(_, h)| h)).collect::<Result<_>>()?;
    let to_q = |v: i64| Rational::from_integer(BigInt::from(v));
    let kernel_phi_m = phi.cols() - linalg::rank(phi.sparse_columns(to_q));
    let refs: Vec<&HomMatrix> = maps.iter().collect();
    let stacked = refs[0].stacked(&refs[1..]);
    let intersection = stacked.cols() - linalg::rank(stacked.sparse_columns(to_q));
    Ok(IntersectionReport { kernel_phi_m, intersection, phi_m_matches_subspaces: maps[setting.m - 1] == phi })
}

/// φ_{1,i} ∘ Φ_m = [m − i] φ_{1,i} for 0 ≤ i ≤ m − 2. Returns the values of
/// i that were checked.
pub fn composition_law_check(setting: &SpechtSetting, budget: u64) -> Result<std::result::Result<Vec<usize>, String>> {
    let phi = setting.phi_matrix();
    let q = setting.src.q();
    let mut checked = Vec::new();
    for i in 0..setting.m.saturating_sub(1) {
        let (_, outer) = phi_1_i(&setting.tgt, i, budget)?;
        let (_, direct) = phi_1_i(&setting.src, i, budget)?;
        let factor = q_integer((setting.m - i) as u32, q) as i64;
        if outer.compose(&phi) != direct.scaled(factor) {
            return Ok(Err(format!("φ_1,{i} ∘ Φ_{} differs from [{}]·φ_1,{i}", setting.m, setting.m - i)));
        }
        checked.push(i);
    }
    Ok(Ok(checked))
}

/// R_p(L): delete the pattern rows and the pattern columns and renumber.
/// `None` when p does not fit tab(L).
pub fn remove_pattern(l: &NormalMatrix, p: &Pattern) -> Option<NormalMatrix> {
    if !p.fits(&l.tableau()) {
        return None;
    }
    let rows_gone = p.rows();
    let mut gone = rows_gone.clone();
    gone.extend(p.cols());
    let keep: Vec<usize> = (1..=l.n).filter(|c| !gone.contains(c)).collect();
    let mut row_labels = Vec::new();
    let mut rows = Vec::new();
    for (r, &b) in l.row_labels.iter().enumerate() {
        if rows_gone.contains(&b) {
            continue;
        }
        row_labels.push(keep.binary_search(&b).expect("kept label") + 1);
        rows.push(keep.iter().map(|&c| l.rows[r][c - 1]).collect());
    }
    Some(NormalMatrix { n: keep.len(), row_labels, rows })
}

/// Whether e_L can lead a Specht vector: the tableau left after deleting the
/// rows and columns of the orbit's pattern is standard.
pub fn leading_term_eligible(fs: &FlagSpace, l: Label) -> bool {
    let b = fs.batch(l.batch);
    let (_, fp) = crate::orbit::canonical_pattern(fs.field(), b, &b.digits(l.key));
    eligible(&b.tableau, &fp.pattern()).expect("canonical pattern fits")
}

/// A vector of ker Φ_m with its leading-term certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct SpechtVector {
    pub leading: Label,
    pub last: TwoRowTableau,
    pub pattern: FilledPattern,
    /// In the idempotent basis of M^(n−m,m).
    pub vector: ModuleVector<Cyc>,
}

impl SpechtVector {
    /// Every coefficient lies in Z[ζ_p][1/p]: its reduced denominator is a
    /// power of p.
    pub fn integral(&self, p: u32) -> bool {
        self.vector.terms.values().all(|c| c.denominator_is_power_of(p))
    }
}

/// Counts for one filled-pattern component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub pattern: FilledPattern,
    pub members: usize,
    pub eligible: usize,
    /// Ineligible members, whose images should form a basis.
    pub candidates: usize,
    /// Size of the same-pattern component of the target module.
    pub target_dim: usize,
    /// Rank of the candidate images.
    pub candidate_rank: usize,
    /// Rank of all member images.
    pub full_rank: usize,
}

impl ComponentReport {
    pub fn surjective(&self) -> bool {
        self.candidate_rank == self.target_dim && self.full_rank == self.target_dim
    }

    pub fn independent(&self) -> bool {
        self.candidate_rank == self.candidates
    }
}

/// Φ_m in idempotent bases together with the orbit decompositions of both
/// modules.
pub struct SpechtEngine {
    pub setting: SpechtSetting,
    pub src_orbits: OrbitCensus,
    pub tgt_orbits: OrbitCensus,
    images: Vec<SparseVec<Cyc>>,
}

impl SpechtEngine {
    pub fn new(setting: SpechtSetting) -> Self {
        let src_orbits = OrbitCensus::new(&setting.src);
        let tgt_orbits = OrbitCensus::new(&setting.tgt);
        let per_batch: Vec<Vec<SparseVec<Cyc>>> = (0..setting.src.batches().len() as u32)
            .into_par_iter()
            .map(|b| setting.phi_idempotent_batch(b))
            .collect();
        let images = per_batch.into_iter().flatten().collect();
        SpechtEngine { setting, src_orbits, tgt_orbits, images }
    }

    /// Φ_m(e_L), keyed by target global index.
    pub fn image(&self, l: Label) -> &SparseVec<Cyc> {
        &self.images[self.setting.src.global(l)]
    }

    pub fn image_vector(&self, l: Label) -> ModuleVector<Cyc> {
        let tgt = &self.setting.tgt;
        ModuleVector {
            basis: Basis::Idempotent,
            terms: self.image(l).iter().map(|(&g, x)| (tgt.label_at(g), x.clone())).collect(),
        }
    }

    /// Whether the orbit of `l` is eligible.
    pub fn eligible(&self, l: Label) -> bool {
        self.src_orbits.orbit_of(l).eligible
    }

    /// Source labels grouped by the filled pattern of their orbit.
    pub fn components(&self) -> BTreeMap<FilledPattern, Vec<Label>> {
        let mut out: BTreeMap<FilledPattern, Vec<Label>> = BTreeMap::new();
        for l in self.setting.src.labels() {
            out.entry(self.src_orbits.orbit_of(l).pattern.clone()).or_default().push(l);
        }
        out
    }

    fn target_component_sizes(&self) -> BTreeMap<FilledPattern, usize> {
        let mut out = BTreeMap::new();
        for o in &self.tgt_orbits.orbits {
            *out.entry(o.pattern.clone()).or_insert(0) += o.size as usize;
        }
        out
    }

    /// Every target idempotent in the support of Φ_m(e_L) lies in an orbit
    /// with the filled pattern of e_L's orbit; Φ_m^d(e_L) = 0 whenever b_d is
    /// a pattern row; Φ_m(e_L) = 0 for full patterns. Returns the number of
    /// support terms inspected.
    pub fn check_pattern_preservation(&self) -> std::result::Result<usize, String> {
        let tgt = &self.setting.tgt;
        let mut inspected = 0;
        for l in self.setting.src.labels() {
            let fp = &self.src_orbits.orbit_of(l).pattern;
            let rows = fp.pattern().rows();
            let img = self.image(l);
            if fp.len() == self.setting.m && !img.is_empty() {
                return Err(format!("full-pattern label {l:?} has a nonzero image"));
            }
            for &g in img.keys() {
                let k = tgt.label_at(g);
                inspected += 1;
                let kp = &self.tgt_orbits.orbit_of(k).pattern;
                if kp != fp {
                    return Err(format!("Φ(e_{l:?}) meets e_{k:?} with filled pattern {kp:?}, expected {fp:?}"));
                }
                let moved: Vec<usize> = self
                    .setting
                    .src
                    .batch(l.batch)
                    .tableau
                    .row2
                    .iter()
                    .copied()
                    .filter(|b| !tgt.batch(k.batch).tableau.row2.contains(b))
                    .collect();
                if moved.iter().any(|b| rows.contains(b)) {
                    return Err(format!("Φ^d(e_{l:?}) is nonzero although b_d = {moved:?} is a pattern row"));
                }
            }
        }
        Ok(inspected)
    }

    /// Exact ranks of each component's images.
    pub fn component_reports(&self) -> Vec<ComponentReport> {
        let target = self.target_component_sizes();
        let comps: Vec<(FilledPattern, Vec<Label>)> = self.components().into_iter().collect();
        comps
            .par_iter()
            .map(|(fp, members)| {
                let mut cand = Echelon::<Cyc>::new();
                let mut all = Echelon::<Cyc>::new();
                let mut eligible = 0;
                for &l in members {
                    if self.eligible(l) {
                        eligible += 1;
                    } else {
                        cand.insert(self.image(l).clone());
                    }
                }
                for &l in members {
                    all.insert(self.image(l).clone());
                }
                ComponentReport {
                    pattern: fp.clone(),
                    members: members.len(),
                    eligible,
                    candidates: members.len() - eligible,
                    target_dim: target.get(fp).copied().unwrap_or(0),
                    candidate_rank: cand.rank(),
                    full_rank: all.rank(),
                }
            })
            .collect()
    }

    /// For every source label, decide whether some kernel vector has
    /// top e_L, i.e. Φ_m(e_L) lies in the span of images of same-component
    /// labels in strictly smaller batches, and compare with eligibility.
    /// Returns the number of realizable labels.
    pub fn check_leading_terms(&self) -> std::result::Result<usize, String> {
        let comps: Vec<Vec<Label>> = self.components().into_values().collect();
        let counts: Vec<std::result::Result<usize, String>> = comps
            .par_iter()
            .map(|members| {
                let mut e = Echelon::<Cyc>::new();
                let mut count = 0;
                let mut i = 0;
                while i < members.len() {
                    let batch = members[i].batch;
                    let end = i + members[i..].iter().take_while(|l| l.batch == batch).count();
                    for &l in &members[i..end] {
                        let realizable = e.contains(self.image(l));
                        if realizable != self.eligible(l) {
                            return Err(format!(
                                "label {l:?} (tableau {:?}) is {} but {}",
                                self.setting.src.batch(l.batch).tableau.row2,
                                if self.eligible(l) { "eligible" } else { "ineligible" },
                                if realizable { "leads a kernel vector" } else { "leads no kernel vector" }
                            ));
                        }
                        count += realizable as usize;
                    }
                    for &l in &members[i..end] {
                        e.insert(self.image(l).clone());
                    }
                    i = end;
                }
                Ok(count)
            })
            .collect();
        counts.into_iter().sum()
    }

    fn solve_component(&self, fp: &FilledPattern, members: &[Label]) -> Result<Vec<SpechtVector>> {
        let src = &self.setting.src;
        let lead = |l: Label, terms: ModuleVector<Cyc>| SpechtVector {
            leading: l,
            last: src.batch(l.batch).tableau.clone(),
            pattern: fp.clone(),
            vector: terms,
        };
        let candidates: Vec<Label> = members.iter().copied().filter(|&l| !self.eligible(l)).collect();
        let mut e = Echelon::<Cyc>::new();
        for &r in &candidates {
            if let Insert::Dependent(_) = e.insert(self.image(r).clone()) {
                return Err(Error::Inconsistent(format!("candidate images of component {fp:?} are dependent")));
            }
        }
        let mut out = Vec::new();
        for &l in members.iter().filter(|&&l| self.eligible(l)) {
            let a = e.solve(self.image(l)).ok_or_else(|| {
                Error::Inconsistent(format!("Φ(e_{l:?}) is not in the span of the candidate images of {fp:?}"))
            })?;
            let mut v = ModuleVector::basis_vector(Basis::Idempotent, l);
            for (idx, c) in a {
                let r = candidates[idx];
                if r.batch >= l.batch {
                    return Err(Error::Inconsistent(format!(
                        "correction term e_{r:?} does not precede the leading term e_{l:?}"
                    )));
                }
                v.add_term(r, -c);
            }
            out.push(lead(l, v));
        }
        Ok(out)
    }

    /// The standard vector led by an eligible label.
    pub fn construct_standard_vector(&self, l: Label) -> Result<SpechtVector> {
        if !self.eligible(l) {
            return Err(Error::NotEligible);
        }
        let fp = self.src_orbits.orbit_of(l).pattern.clone();
        let members: Vec<Label> = self
            .setting
            .src
            .labels()
            .filter(|&k| self.src_orbits.orbit_of(k).pattern == fp && (k == l || !self.eligible(k)))
            .collect();
        self.solve_component(&fp, &members)?
            .into_iter()
            .find(|v| v.leading == l)
            .ok_or_else(|| Error::Inconsistent("leading label lost".into()))
    }

    /// The whole standard basis, sorted by leading label.
    pub fn standard_basis(&self) -> Result<Vec<SpechtVector>> {
        let comps: Vec<(FilledPattern, Vec<Label>)> = self.components().into_iter().collect();
        let parts: Vec<Result<Vec<SpechtVector>>> =
            comps.par_iter().map(|(fp, members)| self.solve_component(fp, members)).collect();
        let mut out = Vec::new();
        for p in parts {
            out.extend(p?);
        }
        out.sort_by_key(|v| v.leading);
        Ok(out)
    }

    /// Φ_m(v) = 0, checked in the matrix bases, independently of the
    /// idempotent images used to build v.
    pub fn in_kernel(&self, v: &ModuleVector<Cyc>) -> bool {
        let s = &self.setting;
        let m = s.chars.to_matrix(&s.src, v);
        s.phi_of_matrix_vector(&m).is_zero()
    }

    /// For dependencies Σ γ_r Φ_m(e_r) = 0 found inside components with
    /// 0 < |p| < m, check Σ δ_r Φ_{m−s}(e_{R_p(L_r)}) = 0 in the smaller
    /// module, where δ_r = γ_r q^{|J̃_r| − |J_r| + c_r} if L_r vanishes on the
    /// c_r free positions in non-pattern rows and pattern columns, and 0
    /// otherwise. At most `per_component` relations are checked per
    /// component. Returns (relations checked, relations with some δ ≠ 0).
    pub fn check_removal_compatibility(&self, per_component: usize, budget: u64) -> std::result::Result<(usize, usize), String> {
        let s = &self.setting;
        let q = s.src.q();
        let mut smaller: BTreeMap<usize, SpechtSetting> = BTreeMap::new();
        let mut checked = 0;
        let mut nontrivial = 0;
        for (fp, members) in self.components() {
            let pat = fp.pattern();
            let k = pat.len();
            if k == 0 || k >= s.m {
                continue;
            }
            if !smaller.contains_key(&k) {
                let st = SpechtSetting::with_characters(s.n - 2 * k, s.m - k, s.chars.clone(), budget)
                    .map_err(|e| e.to_string())?;
                smaller.insert(k, st);
            }
            let small = &smaller[&k];
            let rows = pat.rows();
            let cols = pat.cols();
            let mut e = Echelon::<Cyc>::new();
            let mut found = 0;
            for (idx, &l) in members.iter().enumerate() {
                let Insert::Dependent(used) = e.insert(self.image(l).clone()) else { continue };
                let mut gammas: Vec<(Label, Cyc)> = used.into_iter().map(|(j, c)| (members[j], -c)).collect();
                gammas.push((members[idx], Cyc::one()));
                let mut w = ModuleVector::zero(Basis::Idempotent);
                let mut any = false;
                for (r, gamma) in gammas {
                    let b = s.src.batch(r.batch);
                    let digits = b.digits(r.key);
                    let mut c = 0usize;
                    let mut vanishes = true;
                    for (&(bu, v), d) in b.positions.iter().zip(&digits) {
                        if !rows.contains(&bu) && cols.contains(&v) {
                            c += 1;
                            vanishes &= d.is_zero();
                        }
                    }
                    if !vanishes {
                        continue;
                    }
                    let reduced = remove_pattern(&s.src.matrix(r), &pat).ok_or("pattern does not fit a member")?;
                    let rl = small.src.encode(&reduced).map_err(|e| e.to_string())?;
                    let jt = b.dim() as i64;
                    let jr = small.src.batch(rl.batch).dim() as i64;
                    let exp = jr - jt + c as i64;
                    let factor = if exp >= 0 {
                        Cyc::from_int(q.pow(exp as u32) as i64)
                    } else {
                        inv_q_pow(q, (-exp) as usize)
                    };
                    w.add_term(rl, gamma * factor);
                    any = true;
                }
                nontrivial += any as usize;
                if !w.is_zero() && !small.phi_of_matrix_vector(&small.chars.to_matrix(&small.src, &w)).is_zero() {
                    return Err(format!("removal of {fp:?} breaks the dependency ending at {l:?}"));
                }
                checked += 1;
                found += 1;
                if found >= per_component {
                    break;
                }
            }
        }
        Ok((checked, nontrivial))
    }
}

/// Random integer combinations of a kernel basis; each must have a standard
/// leading tableau. Returns the number of combinations tested.
pub fn check_lyle_random<R: Rng>(
    fs: &FlagSpace,
    kernel: &[ModuleVector<Rational>],
    trials: usize,
    rng: &mut R,
) -> std::result::Result<usize, String> {
    if kernel.is_empty() {
        return Ok(0);
    }
    for _ in 0..trials {
        let mut v = ModuleVector::zero(Basis::Matrix);
        for k in kernel {
            let c: i64 = rng.gen_range(-3..=3);
            if c != 0 {
                v.axpy(&Rational::from_integer(BigInt::from(c)), k);
            }
        }
        if v.is_zero() {
            continue;
        }
        let (t, _) = v.last_and_top(fs).map_err(|e| e.to_string())?;
        if !t.is_standard() {
            return Err(format!("kernel vector with non-standard leading tableau {:?}", t.row2));
        }
    }
    Ok(trials)
}
