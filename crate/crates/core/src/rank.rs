//! Lattice paths of two-row tableaux, good fillings and rank polynomials.
//!
//! The box array of a tableau t with second row b_1 < … < b_m and first row
//! a_1 < … < a_{n−m} has m rows and n−m columns. Box (i, k) stands for the
//! matrix position (b_i, a_k) and lies south of the path exactly when
//! a_k < b_i, so row i holds b_i − i boxes and the boxes below the path are
//! the free positions J_t of the batch.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fq, GaloisField};
use crate::flag::{Batch, FlagSpace};
use crate::poly::{interpolate, IntPoly};
use crate::specht::leading_term_eligible;
use crate::tableau::TwoRowTableau;

/// Field sizes used to supplement a q-list when a polynomial fit needs more
/// points than were requested.
pub const SUPPLEMENT_Q: [u64; 10] = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Step {
    East,
    South,
}

/// A monotone route from (1, 1) to (height+1, width+1) through the grid
/// points of a height × width box array. Grid point (i, j) is the top-left
/// corner of box (i, j).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticePath {
    pub height: usize,
    pub width: usize,
    pub steps: Vec<Step>,
}

impl LatticePath {
    pub fn new(height: usize, width: usize, steps: Vec<Step>) -> Result<Self> {
        let south = steps.iter().filter(|&&s| s == Step::South).count();
        if south != height || steps.len() != height + width {
            return Err(Error::InvalidShape(format!("path with {} steps does not cross a {height}×{width} array", steps.len())));
        }
        Ok(LatticePath { height, width, steps })
    }

    /// Number of boxes south of the path in each row.
    pub fn row_lengths(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.height);
        let mut east = 0;
        for s in &self.steps {
            match s {
                Step::East => east += 1,
                Step::South => out.push(east),
            }
        }
        out
    }

    pub fn box_count(&self) -> usize {
        self.row_lengths().iter().sum()
    }

    /// Grid points visited, in order.
    pub fn points(&self) -> Vec<(usize, usize)> {
        let mut p = (1, 1);
        let mut out = vec![p];
        for s in &self.steps {
            match s {
                Step::East => p.1 += 1,
                Step::South => p.0 += 1,
            }
            out.push(p);
        }
        out
    }

    /// Points where the path changes direction.
    pub fn corners(&self) -> Vec<(usize, usize)> {
        let pts = self.points();
        (1..self.steps.len()).filter(|&k| self.steps[k - 1] != self.steps[k]).map(|k| pts[k]).collect()
    }

    /// Points entered from the north and left to the east; the rank
    /// conditions at these imply all others.
    pub fn essential_corners(&self) -> Vec<(usize, usize)> {
        let pts = self.points();
        (1..self.steps.len())
            .filter(|&k| self.steps[k - 1] == Step::South && self.steps[k] == Step::East)
            .map(|k| pts[k])
            .collect()
    }
}

pub fn path_of(t: &TwoRowTableau) -> LatticePath {
    let mut steps = Vec::with_capacity(t.n);
    let mut prev = 0;
    for (i, &b) in t.row2.iter().enumerate() {
        let c = b - (i + 1);
        steps.extend(std::iter::repeat(Step::East).take(c - prev));
        steps.push(Step::South);
        prev = c;
    }
    steps.extend(std::iter::repeat(Step::East).take(t.n - t.m - prev));
    LatticePath { height: t.m, width: t.n - t.m, steps }
}

pub fn tableau_of_path(path: &LatticePath) -> TwoRowTableau {
    let row2 = path.row_lengths().iter().enumerate().map(|(i, &c)| c + i + 1).collect();
    TwoRowTableau { n: path.height + path.width, m: path.height, row2 }
}

/// Rank over GF(q) of a small dense matrix.
pub fn gf_rank(field: &GaloisField, mut rows: Vec<Vec<Fq>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(rank, p);
        let inv = field.inv(rows[rank][c]).expect("nonzero pivot");
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let f = field.mul(rows[r][c], inv);
                for k in c..cols {
                    let v = field.mul(f, rows[rank][k]);
                    rows[r][k] = field.sub(rows[r][k], v);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Entries in the boxes south of a path; `rows[i]` has the length of row i+1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Filling {
    pub rows: Vec<Vec<Fq>>,
}

impl Filling {
    /// The filling carried by a batch member: box (i, k) holds l_{b_i, a_k}.
    pub fn of_member(batch: &Batch, digits: &[Fq]) -> Self {
        let t = &batch.tableau;
        let row1 = t.row1();
        let rows = t
            .row2
            .iter()
            .map(|&b| row1.iter().take_while(|&&a| a < b).map(|&a| digits[batch.slot(b, a).expect("free position")]).collect())
            .collect();
        Filling { rows }
    }

    /// Rank of the block with rows i..=height and columns 1..j (1-based).
    fn corner_rank(&self, field: &GaloisField, i: usize, j: usize) -> usize {
        let block = self.rows[i - 1..].iter().map(|r| r[..j - 1].to_vec()).collect();
        gf_rank(field, block)
    }
}

fn corner_ok(field: &GaloisField, f: &Filling, (i, j): (usize, usize)) -> bool {
    if i > j {
        return false;
    }
    i > f.rows.len() || j == 1 || f.corner_rank(field, i, j) <= j - i
}

/// Goodness checked at the essential corners only.
pub fn is_good(field: &GaloisField, path: &LatticePath, f: &Filling) -> bool {
    path.essential_corners().into_iter().all(|c| corner_ok(field, f, c))
}

/// Goodness checked at every grid point on the path.
pub fn is_good_all_points(field: &GaloisField, path: &LatticePath, f: &Filling) -> bool {
    path.points().into_iter().all(|c| corner_ok(field, f, c))
}

/// Row lengths of the path of `t` and, per row r (0-based), the columns j of
/// the essential corners (r+1, j) that constrain it. `None` when a corner
/// has i > j, so that nothing is good.
fn row_constraints(t: &TwoRowTableau) -> Option<(Vec<usize>, Vec<Vec<usize>>)> {
    let path = path_of(t);
    let lens = path.row_lengths();
    let corners = path.essential_corners();
    if corners.iter().any(|&(i, j)| i > j) {
        return None;
    }
    let mut by_row = vec![Vec::new(); lens.len()];
    for &(i, j) in &corners {
        if i <= lens.len() && j > 1 {
            by_row[i - 1].push(j);
        }
    }
    Some((lens, by_row))
}

/// Boxes in the rows above every essential corner. Their entries are
/// unconstrained, so q^F divides r_t(q) for this F.
pub fn unconstrained_boxes(t: &TwoRowTableau) -> usize {
    match row_constraints(t) {
        Some((lens, by_row)) => {
            let top = by_row.iter().position(|r| !r.is_empty()).unwrap_or(lens.len());
            lens[..top].iter().sum()
        }
        None => 0,
    }
}

/// Number of good fillings of the path of `t` over `field`.
///
/// Rows are filled bottom-up and each essential corner is checked as soon as
/// all rows it involves are fixed; rows above the highest corner are free.
/// `budget` caps the number of partial fillings visited.
pub fn rank_polynomial(t: &TwoRowTableau, field: &GaloisField, budget: u64) -> Result<u64> {
    let Some((lens, by_row)) = row_constraints(t) else { return Ok(0) };
    let m = lens.len();
    let q = field.q() as u64;
    let mut visited = 0u64;
    let mut filling = Filling { rows: lens.iter().map(|&c| vec![Fq::ZERO; c]).collect() };

    struct Ctx<'a> {
        field: &'a GaloisField,
        lens: &'a [usize],
        by_row: &'a [Vec<usize>],
        q: u64,
        budget: u64,
    }
    fn rec(ctx: &Ctx, row: usize, f: &mut Filling, visited: &mut u64) -> Result<u64> {
        // no corner constrains this row or anything above it
        if ctx.by_row[..=row].iter().all(|r| r.is_empty()) {
            *visited += 1;
            let free: usize = ctx.lens[..=row].iter().sum();
            return Ok(ctx.q.pow(free as u32));
        }
        let c = ctx.lens[row];
        let total = ctx.q.pow(c as u32);
        let mut count = 0;
        for code in 0..total {
            *visited += 1;
            if *visited > ctx.budget {
                return Err(Error::BudgetExceeded { needed: *visited as u128, budget: ctx.budget });
            }
            let mut k = code;
            for x in f.rows[row].iter_mut().rev() {
                *x = Fq((k % ctx.q) as u8);
                k /= ctx.q;
            }
            if !ctx.by_row[row].iter().all(|&j| f.corner_rank(ctx.field, row + 1, j) <= j - (row + 1)) {
                continue;
            }
            count += if row == 0 { 1 } else { rec(ctx, row - 1, f, visited)? };
        }
        Ok(count)
    }

    if m == 0 {
        return Ok(1);
    }
    let ctx = Ctx { field, lens: &lens, by_row: &by_row, q, budget };
    rec(&ctx, m - 1, &mut filling, &mut visited)
}

/// Keys of batch members whose filling is good.
pub fn good_members(fs: &FlagSpace, batch: u32) -> Vec<u64> {
    let b = fs.batch(batch);
    let path = path_of(&b.tableau);
    b.keys().filter(|&k| is_good(fs.field(), &path, &Filling::of_member(b, &b.digits(k)))).collect()
}

/// Members of a batch sorted into good fillings and eligible leading terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub batch: u32,
    pub good: Vec<u64>,
    pub eligible: Vec<u64>,
}

impl EquivalenceReport {
    pub fn agrees(&self) -> bool {
        self.good == self.eligible
    }
}

pub fn eligibility_equivalence(fs: &FlagSpace, batch: u32) -> EquivalenceReport {
    let eligible = fs.batch_labels(batch).filter(|&l| leading_term_eligible(fs, l)).map(|l| l.key).collect();
    EquivalenceReport { batch, good: good_members(fs, batch), eligible }
}

/// Whether good fillings and eligible labels coincide in every batch.
pub fn eligibility_equivalence_check(fs: &FlagSpace) -> std::result::Result<usize, String> {
    for b in 0..fs.batches().len() as u32 {
        let r = eligibility_equivalence(fs, b);
        if !r.agrees() {
            return Err(format!(
                "batch {} ({}): {} good fillings vs {} eligible members",
                b,
                fs.batch(b).tableau,
                r.good.len(),
                r.eligible.len()
            ));
        }
    }
    Ok(fs.batches().len())
}

/// `rank_polynomial` interpolated to a polynomial in t.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankPolynomialFit {
    pub tableau: TwoRowTableau,
    pub poly: IntPoly,
    /// (q, r_t(q)) used for the fit.
    pub fitted: Vec<(u64, u64)>,
    pub validated_q: u64,
    pub validated_value: u64,
}

impl RankPolynomialFit {
    pub fn value_at_one(&self) -> i128 {
        self.poly.eval(1)
    }
}

/// Distinct q values: the requested ones first, then `SUPPLEMENT_Q`, until
/// there are `needed`.
pub fn supplemented_q(requested: &[u64], needed: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    for &q in requested.iter().chain(SUPPLEMENT_Q.iter()) {
        if out.len() == needed {
            break;
        }
        if !out.contains(&q) {
            out.push(q);
        }
    }
    out
}

/// Fit r_t and check it at one more field size. With F = unconstrained
/// boxes, r_t(q) = q^F s_t(q) where s_t counts fillings of the remaining
/// |J_t| − F boxes, so s_t has degree at most |J_t| − F and is fitted
/// through |J_t| − F + 1 field sizes.
pub fn fit_rank_polynomial(t: &TwoRowTableau, requested: &[u64], budget: u64) -> Result<RankPolynomialFit> {
    let free = unconstrained_boxes(t);
    let degree = t.free_count() - free;
    let qs = supplemented_q(requested, degree + 2);
    if qs.len() < degree + 2 {
        return Err(Error::Interpolation(format!("not enough field sizes to fit degree {degree}")));
    }
    let mut values = Vec::with_capacity(qs.len());
    for &q in &qs {
        let field = GaloisField::new(q)?;
        values.push((q, rank_polynomial(t, &field, budget)?));
    }
    let reduced = |&(q, v): &(u64, u64)| -> Result<(i128, i128)> {
        let scale = q.pow(free as u32);
        if v % scale != 0 {
            return Err(Error::Inconsistent(format!("r_t({q}) = {v} is not divisible by q^{free} for {t}")));
        }
        Ok((q as i128, (v / scale) as i128))
    };
    let (check, fit) = values.split_last().expect("at least two points");
    let s = interpolate(&fit.iter().map(reduced).collect::<Result<Vec<_>>>()?)?;
    let mut coeffs = vec![0; free];
    coeffs.extend_from_slice(&s.coeffs);
    let poly = IntPoly::new(coeffs);
    if poly.eval(check.0 as i128) != check.1 as i128 {
        return Err(Error::Interpolation(format!("r_t for {t} predicts {} at q = {} but the count is {}", poly.eval(check.0 as i128), check.0, check.1)));
    }
    Ok(RankPolynomialFit { tableau: t.clone(), poly, fitted: fit.to_vec(), validated_q: check.0, validated_value: check.1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::{column_op, row_op, Upsilon};
    use crate::poly::specht_dimension;
    use crate::tableau::enumerate_row_standard;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn t(n: usize, row2: &[usize]) -> TwoRowTableau {
        TwoRowTableau::new(n, row2.to_vec()).unwrap()
    }

    #[test]
    fn extreme_paths() {
        let top = path_of(&TwoRowTableau::initial(6, 3));
        assert_eq!(top.box_count(), 9);
        assert_eq!(top.row_lengths(), vec![3, 3, 3]);
        let bottom = path_of(&t(6, &[1, 2, 3]));
        assert_eq!(bottom.box_count(), 0);
        assert_eq!(bottom.steps[..3], [Step::South; 3]);
    }

    #[test]
    fn paths_round_trip_and_count_free_positions() {
        for n in 0..=9 {
            for m in 0..=n / 2 {
                for tab in enumerate_row_standard(n, m).unwrap() {
                    let p = path_of(&tab);
                    assert_eq!(p.steps.len(), n);
                    assert_eq!(p.box_count(), tab.free_count());
                    assert_eq!(tableau_of_path(&p), tab);
                    let corners_ok = p.corners().iter().all(|&(i, j)| i <= j);
                    assert_eq!(corners_ok, tab.is_standard(), "{tab}");
                }
            }
        }
    }

    #[test]
    fn small_rank_polynomials() {
        for q in [2u64, 3, 4, 5] {
            let f = GaloisField::new(q).unwrap();
            assert_eq!(rank_polynomial(&t(4, &[2, 4]), &f, u64::MAX).unwrap(), q * q);
            assert_eq!(rank_polynomial(&t(4, &[3, 4]), &f, u64::MAX).unwrap(), q.pow(4));
            assert_eq!(rank_polynomial(&t(4, &[1, 4]), &f, u64::MAX).unwrap(), 0);
        }
    }

    #[test]
    fn rank_polynomials_sum_to_specht_dimension() {
        for (n, m) in [(2, 1), (3, 1), (4, 1), (4, 2), (5, 2), (6, 2), (6, 3)] {
            for q in [2u64, 3] {
                let f = GaloisField::new(q).unwrap();
                let total: u64 = enumerate_row_standard(n, m)
                    .unwrap()
                    .iter()
                    .filter(|t| t.is_standard())
                    .map(|t| rank_polynomial(t, &f, u64::MAX).unwrap())
                    .sum();
                assert_eq!(total as u128, specht_dimension(n as u32, m as u32, q), "({n},{m},{q})");
            }
        }
    }

    #[test]
    fn non_standard_tableaux_have_no_good_fillings() {
        let f = GaloisField::new(3).unwrap();
        for tab in enumerate_row_standard(6, 3).unwrap().into_iter().filter(|t| !t.is_standard()) {
            assert_eq!(rank_polynomial(&tab, &f, u64::MAX).unwrap(), 0, "{tab}");
        }
    }

    #[test]
    fn fitted_rank_polynomials_take_value_one_at_one() {
        for tab in enumerate_row_standard(5, 2).unwrap().into_iter().filter(|t| t.is_standard()) {
            let fit = fit_rank_polynomial(&tab, &[2, 3, 4, 5], 10_000_000).unwrap();
            assert_eq!(fit.value_at_one(), 1, "{tab}");
        }
        let fit = fit_rank_polynomial(&t(4, &[2, 4]), &[3, 2], u64::MAX).unwrap();
        assert_eq!(fit.poly, IntPoly::new(vec![0, 0, 1]));
        assert_eq!(fit.fitted.iter().map(|x| x.0).collect::<Vec<_>>(), vec![3, 2, 4]);
        assert_eq!(fit.validated_q, 5);
        // no corner at all: r_t = t^{|J_t|}
        let top = TwoRowTableau::initial(6, 3);
        assert_eq!(unconstrained_boxes(&top), 9);
        let fit = fit_rank_polynomial(&top, &[2], u64::MAX).unwrap();
        assert_eq!(fit.poly, IntPoly::new([vec![0; 9], vec![1]].concat()));
    }

    #[test]
    fn essential_corners_suffice() {
        let f = GaloisField::new(2).unwrap();
        for tab in enumerate_row_standard(6, 3).unwrap() {
            let fs_batch = FlagSpace::new(6, 3, Arc::new(f.clone()), u64::MAX).unwrap();
            let b = fs_batch.batch(fs_batch.batch_index(&tab.row2).unwrap());
            let path = path_of(&tab);
            for k in b.keys() {
                let fill = Filling::of_member(b, &b.digits(k));
                assert_eq!(is_good(&f, &path, &fill), is_good_all_points(&f, &path, &fill));
            }
        }
    }

    #[test]
    fn good_fillings_are_the_eligible_members() {
        for (n, m, q) in [(3, 1, 3), (4, 2, 2), (4, 2, 3), (5, 2, 2), (6, 3, 2)] {
            let fs = FlagSpace::new(n, m, Arc::new(GaloisField::new(q).unwrap()), u64::MAX).unwrap();
            assert_eq!(eligibility_equivalence_check(&fs), Ok(fs.batches().len()), "({n},{m},{q})");
            for b in 0..fs.batches().len() as u32 {
                let tab = &fs.batch(b).tableau;
                assert_eq!(good_members(&fs, b).len() as u64, rank_polynomial(tab, fs.field(), u64::MAX).unwrap());
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let f = GaloisField::new(4).unwrap();
        assert!(matches!(rank_polynomial(&t(6, &[3, 5, 6]), &f, 100), Err(Error::BudgetExceeded { .. })));
        assert_eq!(rank_polynomial(&TwoRowTableau::initial(6, 3), &f, 1).unwrap(), 4u64.pow(9));
    }

    proptest! {
        #[test]
        fn goodness_survives_truncated_operations(
            shape in prop::sample::select(vec![(4usize, 2usize), (5, 2), (6, 2), (6, 3)]),
            q in prop::sample::select(vec![2u64, 3, 4]),
            seed in any::<u64>(),
            moves in prop::collection::vec((any::<usize>(), any::<u8>()), 1..6),
        ) {
            let (n, m) = shape;
            let field = GaloisField::new(q).unwrap();
            let tabs = enumerate_row_standard(n, m).unwrap();
            let tab = &tabs[(seed % tabs.len() as u64) as usize];
            let fs = FlagSpace::new(n, m, Arc::new(field.clone()), u64::MAX).unwrap();
            let b = fs.batch(fs.batch_index(&tab.row2).unwrap());
            let key = (seed / 7) % b.size;
            let mut d = b.digits(key);
            let path = path_of(tab);
            let before = is_good(&field, &path, &Filling::of_member(b, &d));
            let ups = Upsilon::of(tab);
            let roots: Vec<(bool, (usize, usize))> =
                ups.column.iter().map(|&r| (true, r)).chain(ups.row.iter().map(|&r| (false, r))).collect();
            prop_assume!(!roots.is_empty());
            for (pick, a) in moves {
                let (col, (i, j)) = roots[pick % roots.len()];
                let alpha = Fq(a % q as u8);
                if col {
                    column_op(&field, b, &mut d, i, j, alpha);
                } else {
                    row_op(&field, b, &mut d, i, j, alpha);
                }
            }
            prop_assert_eq!(is_good(&field, &path, &Filling::of_member(b, &d)), before);
        }
    }
}
