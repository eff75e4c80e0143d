//! `specht`: enumerate Ξ_{m,n}, classify orbits, count census and rank
//! polynomials, build standard bases and run the invariant suite.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use specht_core::census::census_polynomials;
use specht_core::character::Fault;
use specht_core::export::{self, Provenance};
use specht_core::field::GaloisField;
use specht_core::flag::FlagSpace;
use specht_core::orbit::OrbitCensus;
use specht_core::rank::{fit_rank_polynomial, rank_polynomial};
use specht_core::specht::{SpechtEngine, SpechtSetting};
use specht_core::tableau::enumerate_row_standard;
use specht_core::verify::{run_suite, Status, VerifyConfig};
use specht_core::Error;

const DEFAULT_BUDGET: u64 = 5_000_000;

#[derive(Parser, Debug)]
#[command(name = "specht", version, about = "Exact unipotent Specht modules of GL_n(q) for two-part partitions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write Ξ_{m,n} as JSON lines and the Gaussian-binomial report.
    Enumerate(Common),
    /// Write the orbit decomposition of every batch.
    Orbits(Common),
    /// Count eligible orbits by dimension and interpolate in q.
    Census {
        #[command(flatten)]
        common: Common,
        /// Restrict to these dimension exponents.
        #[arg(long)]
        c: Vec<usize>,
    },
    /// Count good fillings per tableau and interpolate r_t.
    Rankpoly(Common),
    /// Build the standard basis of S^λ and write Φ_m.
    Basis(Common),
    /// Run the invariant suite; exit 4 if any check fails.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Corrupt θ to make sure the suite notices.
        #[arg(long, value_enum, default_value_t = FaultArg::None, hide = true)]
        fault: FaultArg,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Field size; repeat for several.
    #[arg(long)]
    q: Vec<u64>,
    /// Largest number of matrices (or fillings) enumerated in one step.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; output does not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum FaultArg {
    None,
    NegatedTheta,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn invariant(message: impl Into<String>) -> Self {
        Failure { code: 4, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. } => 3,
            Error::NotPrimePower(_) | Error::UnsupportedField(_) | Error::InvalidShape(_) | Error::InvalidPattern(_) => 2,
            Error::Interpolation(_) => 4,
            _ => 5,
        };
        Failure { code, message: e.to_string() }
    }
}

type Outcome = Result<Vec<(String, String)>, Failure>;

/// Files to write, plus an optional failure to report after writing them.
struct Output {
    files: Vec<(String, String)>,
    failure: Option<Failure>,
}

impl From<Vec<(String, String)>> for Output {
    fn from(files: Vec<(String, String)>) -> Self {
        Output { files, failure: None }
    }
}

impl Common {
    fn shape(&self) -> Result<(usize, usize), Failure> {
        let (Some(n), Some(m)) = (self.n, self.m) else {
            return Err(Failure::usage("--n and --m are required"));
        };
        if 2 * m > n {
            return Err(Failure::usage(format!("(n−m, m) = ({}, {m}) is not a partition: need m ≤ n/2", n as i64 - m as i64)));
        }
        Ok((n, m))
    }

    fn qs(&self, default: &[u64]) -> Result<Vec<u64>, Failure> {
        let qs = if self.q.is_empty() { default.to_vec() } else { self.q.clone() };
        let mut seen = Vec::new();
        for &q in &qs {
            GaloisField::new(q).map_err(Failure::from)?;
            if seen.contains(&q) {
                return Err(Failure::usage(format!("q = {q} given twice")));
            }
            seen.push(q);
        }
        Ok(qs)
    }

    fn provenance(&self, command: &str, qs: &[u64], fields: &[&GaloisField]) -> Provenance {
        let mut config = BTreeMap::new();
        config.insert("n".into(), self.n.map_or(Value::Null, Value::from));
        config.insert("m".into(), self.m.map_or(Value::Null, Value::from));
        config.insert("q".into(), Value::from(qs.to_vec()));
        config.insert("budget".into(), Value::from(self.budget));
        config.insert("seed".into(), Value::from(self.seed));
        config.insert("format".into(), Value::from(format!("{:?}", self.format).to_lowercase()));
        Provenance::new(command, config, fields)
    }

    fn ext(&self) -> &'static str {
        match self.format {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

fn field(q: u64) -> Result<Arc<GaloisField>, Failure> {
    Ok(Arc::new(GaloisField::new(q)?))
}

fn stem(cmd: &str, n: usize, m: usize, q: u64) -> String {
    format!("{cmd}_n{n}_m{m}_q{q}")
}

fn cmd_enumerate(c: &Common) -> Outcome {
    let (n, m) = c.shape()?;
    let mut files = Vec::new();
    for q in c.qs(&[2])? {
        let f = field(q)?;
        let fs = FlagSpace::new(n, m, f.clone(), c.budget)?;
        let prov = c.provenance("enumerate", &[q], &[&f]);
        files.push((format!("{}.jsonl", stem("xi", n, m, q)), export::batches_jsonl(&fs, &prov)));
        files.push((format!("{}.json", stem("enumerate", n, m, q)), export::enumeration_report(&fs, &prov)));
        println!("n={n} m={m} q={q}: {} matrices in {} batches", fs.len(), fs.batches().len());
    }
    Ok(files)
}

fn cmd_orbits(c: &Common) -> Outcome {
    let (n, m) = c.shape()?;
    let mut files = Vec::new();
    for q in c.qs(&[2])? {
        let f = field(q)?;
        let fs = FlagSpace::new(n, m, f.clone(), c.budget)?;
        let census = OrbitCensus::new(&fs);
        let prov = c.provenance("orbits", &[q], &[&f]);
        let body = match c.format {
            Format::Csv => export::orbits_csv(&fs, &census, &prov),
            Format::Json => export::orbits_json(&fs, &census, &prov),
        };
        files.push((format!("{}.{}", stem("orbits", n, m, q), c.ext()), body));
        let eligible = census.orbits.iter().filter(|o| o.eligible).count();
        println!("n={n} m={m} q={q}: {} orbits, {eligible} eligible", census.orbits.len());
    }
    Ok(files)
}

fn cmd_census(c: &Common, only: &[usize]) -> Result<Output, Failure> {
    let (n, m) = c.shape()?;
    let qs = c.qs(&[2, 3, 4, 5])?;
    let (counts, mut polys) = census_polynomials(n, m, &qs, c.budget)?;
    for &k in only.iter().filter(|&&k| k > m * (n - m)) {
        polys.push(specht_core::census::census_polynomial(&counts, k)?);
    }
    if !only.is_empty() {
        polys.retain(|p| only.contains(&p.c));
    }
    let fields: Vec<Arc<GaloisField>> = qs.iter().map(|&q| field(q)).collect::<Result<_, _>>()?;
    let refs: Vec<&GaloisField> = fields.iter().map(|f| f.as_ref()).collect();
    let prov = c.provenance("census", &qs, &refs);
    let name = format!("census_n{n}_m{m}");
    let mut files = vec![(format!("{name}_polynomials.json"), export::census_json(&counts, &polys, &prov))];
    if c.format == Format::Csv {
        files.push((format!("{name}_counts.csv"), export::census_csv(&counts, &prov)));
    }
    for p in &polys {
        println!(
            "c={}: f(t) coefficients {:?}, (t−1)-expansion {:?}{}, q={} predicted {} observed {}",
            p.c,
            p.poly.coeffs,
            p.coeffs_t_minus_1,
            if p.non_negative() { "" } else { " [negative coefficient]" },
            p.validated_q,
            p.predicted,
            p.observed
        );
    }
    let bad: Vec<usize> = polys.iter().filter(|p| !p.validated()).map(|p| p.c).collect();
    let failure = (!bad.is_empty()).then(|| Failure::invariant(format!("census polynomials for c in {bad:?} mispredict the held-out q")));
    Ok(Output { files, failure })
}

fn cmd_rankpoly(c: &Common) -> Outcome {
    let (n, m) = c.shape()?;
    let qs = c.qs(&[2, 3, 4, 5])?;
    let tabs = enumerate_row_standard(n, m)?;
    let mut rows = Vec::new();
    let mut fields = Vec::new();
    for &q in &qs {
        let f = field(q)?;
        for t in &tabs {
            rows.push((q, t.clone(), rank_polynomial(t, &f, c.budget)?));
        }
        fields.push(f);
    }
    let mut fits = Vec::new();
    for t in tabs.iter().filter(|t| t.is_standard()) {
        let fit = fit_rank_polynomial(t, &qs, c.budget)?;
        println!("t = {t}: r_t coefficients {:?}, r_t(1) = {}, checked at q={}", fit.poly.coeffs, fit.value_at_one(), fit.validated_q);
        fits.push(fit);
    }
    let refs: Vec<&GaloisField> = fields.iter().map(|f| f.as_ref()).collect();
    let prov = c.provenance("rankpoly", &qs, &refs);
    let name = format!("rankpoly_n{n}_m{m}");
    let mut files = vec![(format!("{name}_polynomials.json"), export::rank_polynomials_json(&rows, &fits, &prov))];
    if c.format == Format::Csv {
        files.push((format!("{name}_counts.csv"), export::rank_csv(&rows, &prov)));
    }
    Ok(files)
}

fn cmd_basis(c: &Common) -> Outcome {
    let (n, m) = c.shape()?;
    if m == 0 {
        return Err(Failure::usage("m = 0: S^λ is the trivial module, there is no Φ_m"));
    }
    let mut files = Vec::new();
    for q in c.qs(&[2])? {
        let f = field(q)?;
        let setting = SpechtSetting::new(n, m, f.clone(), c.budget)?;
        let prov = c.provenance("basis", &[q], &[&f]);
        let phi = export::phi_triplets(&setting.phi_matrix(), &prov);
        let engine = SpechtEngine::new(setting);
        let basis = engine.standard_basis()?;
        let s = &engine.setting;
        if let Some(v) = basis.iter().find(|v| !engine.in_kernel(&v.vector)) {
            return Err(Failure { code: 5, message: format!("vector led by {:?} is not in the kernel", v.leading) });
        }
        let p = s.chars.p();
        files.push((format!("{}.jsonl", stem("basis", n, m, q)), export::basis_jsonl(&s.src, &basis, p, &prov)));
        files.push((format!("{}.txt", stem("phi", n, m, q)), phi));
        println!("n={n} m={m} q={q}: {} standard basis vectors", basis.len());
    }
    Ok(files)
}

fn cmd_verify(c: &Common, fault: FaultArg) -> Result<Output, Failure> {
    let qs = c.qs(&[2, 3])?;
    let mut cfg = match (c.n, c.m) {
        (Some(n), Some(m)) => {
            c.shape()?;
            VerifyConfig { shapes: vec![(n, m)], qs: qs.clone(), seed: c.seed, budget: c.budget, fault: Fault::None }
        }
        (Some(n), None) => VerifyConfig::up_to(n, qs.clone(), c.seed, c.budget),
        (None, None) => VerifyConfig { qs: qs.clone(), seed: c.seed, budget: c.budget, ..VerifyConfig::default_scale() },
        (None, Some(_)) => return Err(Failure::usage("--m needs --n")),
    };
    cfg.fault = match fault {
        FaultArg::None => Fault::None,
        FaultArg::NegatedTheta => Fault::NegatedTheta,
    };
    let report = run_suite(&cfg)?;
    let fields: Vec<Arc<GaloisField>> = qs.iter().map(|&q| field(q)).collect::<Result<_, _>>()?;
    let refs: Vec<&GaloisField> = fields.iter().map(|f| f.as_ref()).collect();
    let mut prov = c.provenance("verify", &qs, &refs);
    if fault != FaultArg::None {
        prov.config.insert("fault".into(), Value::from(format!("{fault:?}").to_lowercase()));
    }
    let body = match c.format {
        Format::Csv => export::verify_csv(&report, &prov),
        Format::Json => export::verify_json(&report, &prov),
    };
    let passed = report.outcomes.iter().filter(|o| o.status == Status::Pass).count();
    let skipped = report.outcomes.iter().filter(|o| o.status == Status::Skip).count();
    for o in report.failures() {
        println!("FAIL {} (n={} m={} q={} seed={}): {}", o.check, o.n, o.m, o.q, o.seed, o.detail.as_deref().unwrap_or(""));
    }
    println!("{passed} passed, {} failed, {skipped} skipped", report.failures().count());
    let failure = if report.internal_failure() {
        Some(Failure { code: 5, message: "a check hit an internal inconsistency".into() })
    } else if !report.passed() {
        Some(Failure::invariant("invariant checks failed"))
    } else {
        None
    };
    Ok(Output { files: vec![(format!("verify.{}", c.ext()), body)], failure })
}

/// Write every file or none: stage under temporary names, then rename.
fn write_all(dir: &Path, files: &[(String, String)]) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let mut staged = Vec::new();
    for (name, body) in files {
        let tmp = dir.join(format!(".{name}.partial"));
        if let Err(e) = fs::write(&tmp, body) {
            for t in &staged {
                let _ = fs::remove_file(t);
            }
            let _ = fs::remove_file(&tmp);
            return Err(e);
        }
        staged.push(tmp);
    }
    for ((name, _), tmp) in files.iter().zip(&staged) {
        fs::rename(tmp, dir.join(name))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let common = match &cli.command {
        Command::Enumerate(c) | Command::Orbits(c) | Command::Rankpoly(c) | Command::Basis(c) => c,
        Command::Census { common, .. } | Command::Verify { common, .. } => common,
    };
    if let Some(w) = common.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build_global()
            .map_err(|e| Failure { code: 5, message: e.to_string() })?;
    }
    let out = match &cli.command {
        Command::Enumerate(c) => cmd_enumerate(c)?.into(),
        Command::Orbits(c) => cmd_orbits(c)?.into(),
        Command::Census { common, c } => cmd_census(common, c)?,
        Command::Rankpoly(c) => cmd_rankpoly(c)?.into(),
        Command::Basis(c) => cmd_basis(c)?.into(),
        Command::Verify { common, fault } => cmd_verify(common, *fault)?,
    };
    write_all(&common.out, &out.files).map_err(|e| Failure { code: 5, message: format!("writing output: {e}") })?;
    for (name, _) in &out.files {
        println!("wrote {}", common.out.join(name).display());
    }
    out.failure.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
