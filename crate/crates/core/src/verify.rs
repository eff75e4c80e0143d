//! Named invariant checks, run over a grid of (n, m, q).

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::census::census_from_orbits;
use crate::character::{Characters, Fault};
use crate::error::{Error, Result};
use crate::field::{Fq, GaloisField};
use crate::flag::FlagSpace;
use crate::orbit::{
    batch_orbit_census, batch_root_permutations, check_cyclic_generation, check_u_invariance, column_op, is_pattern_matrix,
    monomial_oracle_check, orbit_bfs, row_op, stabilizer_generators, OrbitCensus, Upsilon,
};
use crate::pattern::Pattern;
use crate::poly::{gaussian_binomial, specht_dimension};
use crate::rank::{eligibility_equivalence_check, is_good, path_of, rank_polynomial, tableau_of_path, Filling};
use crate::specht::{check_lyle_random, composition_law_check, kernel_intersection_check, SpechtEngine, SpechtSetting};
use crate::tableau::enumerate_row_standard;

/// Batches with more free positions are skipped by the exhaustive monomial
/// oracle, whose cost grows like q^{2|J_t|}.
pub const ORACLE_MAX_FREE: usize = 4;
/// Source size up to which the kernel intersection is compared exactly.
pub const INTERSECTION_MAX_SOURCE: u64 = 2_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub shapes: Vec<(usize, usize)>,
    pub qs: Vec<u64>,
    pub seed: u64,
    pub budget: u64,
    #[serde(skip)]
    pub fault: Fault,
}

impl VerifyConfig {
    /// Every (n, m) with n ≤ `n_max` and 0 ≤ m ≤ n/2.
    pub fn up_to(n_max: usize, qs: Vec<u64>, seed: u64, budget: u64) -> Self {
        let shapes = (1..=n_max).flat_map(|n| (0..=n / 2).map(move |m| (n, m))).collect();
        VerifyConfig { shapes, qs, seed, budget, fault: Fault::None }
    }

    pub fn default_scale() -> Self {
        Self::up_to(5, vec![2, 3], 0, 5_000_000)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub check: String,
    pub statement: String,
    pub n: usize,
    pub m: usize,
    pub q: u64,
    pub seed: u64,
    pub status: Status,
    pub cases: usize,
    pub detail: Option<String>,
    /// The check panicked instead of reporting.
    pub internal: bool,
    /// Wall time; left out of files so that output stays reproducible.
    #[serde(skip)]
    pub millis: u128,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub outcomes: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.outcomes.iter().filter(|o| o.status == Status::Fail)
    }

    pub fn internal_failure(&self) -> bool {
        self.failures().any(|o| o.internal)
    }
}

/// Result of one check: Ok(Some(cases)), Ok(None) for not applicable, or a
/// failure message.
type CheckResult = std::result::Result<Option<usize>, String>;

/// Check names and the statements they test.
pub const CHECKS: &[(&str, &str)] = &[
    ("subspace-count", "|Ξ_{m,n}| equals the Gaussian binomial [n m]_q"),
    ("monomial-action-oracle", "closed-form action of root elements on idempotents matches direct expansion"),
    ("orbit-dimension", "orbit sizes are q^(k−s), agree with BFS and the stabilizer count, one pattern matrix per orbit"),
    ("pattern-multiplicity", "each fitting pattern labels (q−1)^s orbits"),
    ("u-invariance", "orbit modules are closed under U^w∩U"),
    ("cyclic-generation", "the averaging element isolates the pattern idempotent"),
    ("specht-dimension", "dim ker Φ_m = [n m]_q − [n m−1]_q"),
    ("kernel-intersection", "ker Φ_m equals the intersection of ker φ_{1,i}"),
    ("composition-law", "φ_{1,i} ∘ Φ_m = [m−i]_q φ_{1,i}"),
    ("pattern-preservation", "Φ_m maps each filled-pattern component into the same filled pattern"),
    ("component-surjectivity", "ineligible members of a component map onto the target component independently"),
    ("leading-term-realizability", "a label leads a kernel vector iff it is eligible"),
    ("random-kernel-leading-terms", "random kernel vectors lead with standard tableaux"),
    ("standard-basis", "one kernel vector per eligible label, distinct leading terms, count = Specht dimension, per-batch count = rank polynomial"),
    ("integrality", "standard-basis coefficients have p-power denominators"),
    ("removal-compatibility", "pattern removal carries dependencies to the smaller setting"),
    ("path-bijection", "tableaux and lattice paths correspond, box count = |J_t|, standard iff corners satisfy i ≤ j"),
    ("rank-polynomial-sum", "Σ_standard r_t(q) = dim S^λ and non-standard tableaux give 0"),
    ("good-filling-eligibility", "good fillings are exactly the eligible batch members"),
    ("goodness-invariance", "goodness is unchanged by truncated row and column operations"),
    ("census-dimension", "Σ_c (eligible orbits of exponent c)·q^c = dim S^λ"),
];

fn statement(name: &str) -> String {
    CHECKS.iter().find(|(n, _)| *n == name).map(|(_, s)| s.to_string()).unwrap_or_default()
}

struct Runner<'a> {
    cfg: &'a VerifyConfig,
    n: usize,
    m: usize,
    q: u64,
    out: &'a mut Vec<CheckOutcome>,
}

impl Runner<'_> {
    fn run(&mut self, name: &str, f: impl FnOnce() -> CheckResult) {
        let t = Instant::now();
        let (status, cases, detail, internal) = match catch_unwind(AssertUnwindSafe(f)) {
            Ok(Ok(Some(c))) => (Status::Pass, c, None, false),
            Ok(Ok(None)) => (Status::Skip, 0, None, false),
            Ok(Err(e)) => (Status::Fail, 0, Some(e), false),
            Err(p) => {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".into());
                (Status::Fail, 0, Some(msg), true)
            }
        };
        self.out.push(CheckOutcome {
            check: name.to_string(),
            statement: statement(name),
            n: self.n,
            m: self.m,
            q: self.q,
            seed: self.cfg.seed,
            status,
            cases,
            detail,
            internal,
            millis: t.elapsed().as_millis(),
        });
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Run the whole suite. Budget and shape errors abort; invariant failures
/// are recorded in the report.
pub fn run_suite(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let mut outcomes = Vec::new();
    for &(n, m) in &cfg.shapes {
        for &q in &cfg.qs {
            run_setting(cfg, n, m, q, &mut outcomes)?;
        }
    }
    Ok(VerifyReport { outcomes })
}

fn run_setting(cfg: &VerifyConfig, n: usize, m: usize, q: u64, out: &mut Vec<CheckOutcome>) -> Result<()> {
    if 2 * m > n {
        return Err(Error::InvalidShape(format!("(n, m) = ({n}, {m}) needs m ≤ n/2")));
    }
    let field = Arc::new(GaloisField::new(q)?);
    let fs = FlagSpace::new(n, m, field.clone(), cfg.budget)?;
    let chars = Characters::with_fault(field.clone(), cfg.fault);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ ((n as u64) << 32 | (m as u64) << 16 | q));
    let mut r = Runner { cfg, n, m, q, out };

    r.run("subspace-count", || {
        let want = gaussian_binomial(n as u32, m as u32, q);
        ensure(fs.len() as u128 == want && fs.enumerate().count() as u128 == want, || format!("{} matrices, expected {want}", fs.len()))?;
        Ok(Some(1))
    });

    r.run("monomial-action-oracle", || {
        let mut cases = 0;
        for b in 0..fs.batches().len() as u32 {
            if fs.batch(b).dim() > ORACLE_MAX_FREE {
                continue;
            }
            let perms = batch_root_permutations(&fs, b);
            cases += monomial_oracle_check(&fs, &chars, b, &perms)?;
        }
        Ok(Some(cases))
    });

    let census = OrbitCensus::new(&fs);
    r.run("orbit-dimension", || {
        let mut cases = 0;
        for b in 0..fs.batches().len() as u32 {
            let batch = fs.batch(b);
            let (keys, records) = batch_orbit_census(&fs, b);
            ensure(records.iter().map(|r| r.size).sum::<u64>() == batch.size, || format!("orbits of {} do not partition the batch", batch.tableau))?;
            for rec in &records {
                let orbit = orbit_bfs(fs.field(), batch, rec.pattern_key);
                let p = rec.pattern.pattern();
                let st = stabilizer_generators(&batch.tableau, &p).map_err(|e| e.to_string())?;
                ensure(
                    orbit.len() as u64 == rec.size && rec.size == q.pow(rec.exponent as u32) && st.orbit_exponent() == rec.exponent,
                    || format!("{} pattern {:?}: BFS {} vs q^{} (stabilizer exponent {})", batch.tableau, p, orbit.len(), rec.exponent, st.orbit_exponent()),
                )?;
                let pms = orbit.iter().filter(|&&k| is_pattern_matrix(batch, &batch.digits(k))).count();
                ensure(pms == 1 && orbit.iter().all(|&k| keys[k as usize] == rec.pattern_key), || {
                    format!("{} pattern {:?}: {pms} pattern matrices in the orbit", batch.tableau, p)
                })?;
                cases += 1;
            }
        }
        Ok(Some(cases))
    });

    r.run("pattern-multiplicity", || {
        let mut per: BTreeMap<(u32, Pattern), u64> = BTreeMap::new();
        for rec in &census.orbits {
            *per.entry((rec.batch, rec.pattern.pattern())).or_insert(0) += 1;
        }
        let mut cases = 0;
        for b in 0..fs.batches().len() as u32 {
            for p in Pattern::all_fitting(&fs.batch(b).tableau) {
                let got = per.get(&(b, p.clone())).copied().unwrap_or(0);
                ensure(got == (q - 1).pow(p.len() as u32), || format!("{}: pattern {p:?} labels {got} orbits", fs.batch(b).tableau))?;
                cases += 1;
            }
        }
        ensure(cases == per.len(), || "an orbit carries a pattern that does not fit".into())?;
        Ok(Some(cases))
    });

    let heavy_orbits = fs.len() <= 20_000;
    r.run("u-invariance", || {
        if !heavy_orbits {
            return Ok(None);
        }
        for b in 0..fs.batches().len() as u32 {
            let perms = batch_root_permutations(&fs, b);
            for (i, _) in census.orbits.iter().enumerate().filter(|(_, o)| o.batch == b) {
                check_u_invariance(&fs, &chars, &census.members(i), &perms)?;
            }
        }
        Ok(Some(census.orbits.len()))
    });

    let mut cyc_rng = ChaCha8Rng::seed_from_u64(rng.gen());
    r.run("cyclic-generation", || {
        if !heavy_orbits {
            return Ok(None);
        }
        for (i, o) in census.orbits.iter().enumerate() {
            check_cyclic_generation(&fs, &chars, o, &census.members(i), &mut cyc_rng)?;
        }
        Ok(Some(census.orbits.len()))
    });

    r.run("census-dimension", || {
        let k = census_from_orbits(&fs, &census);
        ensure(k.matches_specht_dimension(), || {
            format!("Σ count·q^c = {} but dim S^λ = {}", k.total_dimension(), specht_dimension(n as u32, m as u32, q))
        })?;
        Ok(Some(k.by_exponent.len()))
    });

    run_rank_checks(&mut r, &fs, &mut rng);

    if m == 0 {
        r.run("specht-dimension", || {
            ensure(fs.len() == 1 && specht_dimension(n as u32, 0, q) == 1, || "trivial shape should give a line".into())?;
            Ok(Some(1))
        });
        return Ok(());
    }
    run_specht_checks(&mut r, n, m, chars, cfg.budget, &mut rng)
}

fn run_rank_checks(r: &mut Runner, fs: &FlagSpace, rng: &mut ChaCha8Rng) {
    let (n, m, q) = (r.n, r.m, r.q);
    let field = fs.field();
    r.run("path-bijection", || {
        let tabs = enumerate_row_standard(n, m).map_err(|e| e.to_string())?;
        for t in &tabs {
            let p = path_of(t);
            ensure(tableau_of_path(&p) == *t && p.box_count() == t.free_count(), || format!("{t}: path does not round-trip"))?;
            ensure(p.corners().iter().all(|&(i, j)| i <= j) == t.is_standard(), || format!("{t}: corner test disagrees with standardness"))?;
        }
        Ok(Some(tabs.len()))
    });
    r.run("rank-polynomial-sum", || {
        let mut total = 0u128;
        for b in fs.batches() {
            let r = rank_polynomial(&b.tableau, field, u64::MAX).map_err(|e| e.to_string())?;
            if b.tableau.is_standard() {
                total += r as u128;
            } else {
                ensure(r == 0, || format!("non-standard {} has {r} good fillings", b.tableau))?;
            }
        }
        let want = specht_dimension(n as u32, m as u32, q);
        ensure(total == want, || format!("Σ r_t = {total}, dim S^λ = {want}"))?;
        Ok(Some(fs.batches().len()))
    });
    r.run("good-filling-eligibility", || eligibility_equivalence_check(fs).map(Some));
    let mut inv_rng = ChaCha8Rng::seed_from_u64(rng.gen());
    r.run("goodness-invariance", || {
        let mut cases = 0;
        for b in fs.batches() {
            let ups = Upsilon::of(&b.tableau);
            let roots: Vec<(bool, (usize, usize))> =
                ups.column.iter().map(|&x| (true, x)).chain(ups.row.iter().map(|&x| (false, x))).collect();
            if roots.is_empty() || b.dim() == 0 {
                continue;
            }
            let path = path_of(&b.tableau);
            for _ in 0..20 {
                let mut d = b.digits(inv_rng.gen_range(0..b.size));
                let before = is_good(field, &path, &Filling::of_member(b, &d));
                for _ in 0..4 {
                    let (col, (i, j)) = roots[inv_rng.gen_range(0..roots.len())];
                    let a = Fq(inv_rng.gen_range(0..q) as u8);
                    if col {
                        column_op(field, b, &mut d, i, j, a);
                    } else {
                        row_op(field, b, &mut d, i, j, a);
                    }
                }
                ensure(is_good(field, &path, &Filling::of_member(b, &d)) == before, || {
                    format!("{}: goodness changed under truncated operations", b.tableau)
                })?;
                cases += 1;
            }
        }
        Ok(Some(cases))
    });
}

fn run_specht_checks(r: &mut Runner, n: usize, m: usize, chars: Characters, budget: u64, rng: &mut ChaCha8Rng) -> Result<()> {
    let q = r.q;
    let setting = SpechtSetting::with_characters(n, m, chars, budget)?;
    let want = specht_dimension(n as u32, m as u32, q);
    r.run("specht-dimension", || {
        let k = setting.kernel_dimension();
        ensure(k.dim as u128 == want, || format!("dim ker Φ_m = {} ({:?}), expected {want}", k.dim, k.method))?;
        Ok(Some(1))
    });
    r.run("kernel-intersection", || {
        if setting.src.len() > INTERSECTION_MAX_SOURCE {
            return Ok(None);
        }
        let rep = kernel_intersection_check(&setting, budget).map_err(|e| e.to_string())?;
        ensure(rep.agrees(), || format!("{rep:?}"))?;
        Ok(Some(m))
    });
    r.run("composition-law", || composition_law_check(&setting, budget).map_err(|e| e.to_string())?.map(|v| Some(v.len())));
    let mut lyle_rng = ChaCha8Rng::seed_from_u64(rng.gen());
    r.run("random-kernel-leading-terms", || {
        if setting.src.len() > INTERSECTION_MAX_SOURCE {
            return Ok(None);
        }
        check_lyle_random(&setting.src, &setting.kernel_basis(), 20, &mut lyle_rng).map(Some)
    });

    let engine = SpechtEngine::new(setting);
    r.run("pattern-preservation", || engine.check_pattern_preservation().map(Some));
    r.run("component-surjectivity", || {
        let reports = engine.component_reports();
        for c in &reports {
            ensure(c.surjective() && c.independent(), || format!("{c:?}"))?;
        }
        Ok(Some(reports.len()))
    });
    r.run("leading-term-realizability", || engine.check_leading_terms().map(Some));

    let basis = engine.standard_basis();
    r.run("standard-basis", || {
        let basis = basis.as_ref().map_err(|e| e.to_string())?;
        let s = &engine.setting;
        ensure(basis.len() as u128 == want, || format!("{} basis vectors, expected {want}", basis.len()))?;
        let leads: BTreeSet<_> = basis.iter().map(|v| v.leading).collect();
        ensure(leads.len() == basis.len(), || "repeated leading terms".into())?;
        for v in basis {
            ensure(engine.eligible(v.leading), || format!("{:?} leads but is not eligible", v.leading))?;
            ensure(engine.in_kernel(&v.vector), || format!("vector led by {:?} is not in ker Φ_m", v.leading))?;
            ensure(v.last == s.src.batch(v.leading.batch).tableau, || format!("{:?}: last tableau mismatch", v.leading))?;
        }
        for l in s.src.labels().filter(|&l| !engine.eligible(l)) {
            ensure(engine.construct_standard_vector(l).is_err(), || format!("ineligible {l:?} produced a vector"))?;
        }
        if let Some(v) = basis.first() {
            let again = engine.construct_standard_vector(v.leading).map_err(|e| e.to_string())?;
            ensure(again.leading == v.leading, || "single construction disagrees".into())?;
        }
        let mut per_batch = vec![0u64; s.src.batches().len()];
        for v in basis {
            per_batch[v.leading.batch as usize] += 1;
        }
        for (b, &count) in per_batch.iter().enumerate() {
            let t = &s.src.batch(b as u32).tableau;
            let rt = rank_polynomial(t, s.field(), u64::MAX).map_err(|e| e.to_string())?;
            ensure(rt == count, || format!("batch {t}: {count} basis vectors, r_t(q) = {rt}"))?;
        }
        Ok(Some(basis.len()))
    });
    r.run("integrality", || {
        let basis = basis.as_ref().map_err(|e| e.to_string())?;
        let p = engine.setting.chars.p();
        for v in basis {
            ensure(v.integral(p), || format!("vector led by {:?} has a denominator prime to {p}", v.leading))?;
        }
        Ok(Some(basis.len()))
    });
    r.run("removal-compatibility", || {
        let (checked, _) = engine.check_removal_compatibility(3, budget)?;
        Ok(Some(checked))
    });
    Ok(())
}
