//! File formats. Every file starts with a provenance record carrying the
//! tool version, the command, its configuration and the field descriptors.
//! CSV files carry it as a `# provenance {json}` comment line, JSON files as
//! a top-level "provenance" member, JSON-lines files as their first line.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

use crate::census::{CensusCounts, CensusPolynomial};
use crate::field::GaloisField;
use crate::flag::{FlagSpace, NormalMatrix};
use crate::module_vector::{Basis, ModuleVector};
use crate::orbit::OrbitCensus;
use crate::poly::gaussian_binomial;
use crate::rank::RankPolynomialFit;
use crate::specht::{HomMatrix, SpechtVector};
use crate::tableau::TwoRowTableau;
use crate::verify::VerifyReport;
use crate::Cyc;

pub const TOOL: &str = "specht";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldDescriptor {
    pub q: u32,
    pub p: u32,
    pub k: u32,
    /// Monic modulus over GF(p), lowest coefficient first.
    pub modulus: Vec<u32>,
}

impl FieldDescriptor {
    pub fn of(f: &GaloisField) -> Self {
        FieldDescriptor { q: f.q(), p: f.p(), k: f.k(), modulus: f.modulus().to_vec() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: BTreeMap<String, Value>,
    pub fields: Vec<FieldDescriptor>,
}

impl Provenance {
    pub fn new(command: &str, config: BTreeMap<String, Value>, fields: &[&GaloisField]) -> Self {
        Provenance {
            tool: TOOL,
            version: VERSION,
            command: command.to_string(),
            config,
            fields: fields.iter().map(|f| FieldDescriptor::of(f)).collect(),
        }
    }

    fn csv_line(&self) -> String {
        format!("# provenance {}\n", serde_json::to_string(self).expect("serializable"))
    }
}

fn big(x: &BigInt) -> Value {
    x.to_i64().map_or_else(|| Value::String(x.to_string()), Value::from)
}

/// {"den": int, "num": [int; p−1]} in the power basis of Q(ζ_p).
pub fn cyc_json(c: &Cyc, p: u32) -> Value {
    json!({ "den": big(c.denominator()), "num": c.numerator_padded(p).iter().map(big).collect::<Vec<_>>() })
}

/// {"row_labels": [...], "entries": {"(i,j)": value}} with the nonzero entries.
pub fn matrix_json(l: &NormalMatrix) -> Value {
    let mut entries = serde_json::Map::new();
    for (b, row) in l.row_labels.iter().zip(&l.rows) {
        for (j, x) in row.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            entries.insert(format!("({b},{})", j + 1), Value::from(x.0));
        }
    }
    json!({ "row_labels": l.row_labels, "entries": entries })
}

pub fn tableau_json(t: &TwoRowTableau) -> Value {
    serde_json::to_value(t).expect("serializable")
}

pub fn module_vector_json(fs: &FlagSpace, v: &ModuleVector<Cyc>, p: u32) -> Value {
    let basis = match v.basis {
        Basis::Matrix => "matrix",
        Basis::Idempotent => "idempotent",
    };
    let terms: Vec<Value> =
        v.terms.iter().map(|(&l, c)| json!({ "matrix": matrix_json(&fs.matrix(l)), "coeff": cyc_json(c, p) })).collect();
    json!({ "basis": basis, "terms": terms })
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn jsonl(prov: &Provenance, header: Value, lines: impl Iterator<Item = Value>) -> String {
    let mut first = json!({ "provenance": prov });
    if let (Value::Object(a), Value::Object(b)) = (&mut first, header) {
        a.extend(b);
    }
    let mut out = serde_json::to_string(&first).expect("serializable");
    out.push('\n');
    for l in lines {
        out.push_str(&serde_json::to_string(&l).expect("serializable"));
        out.push('\n');
    }
    out
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn csv_text(prov: &Provenance, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8");
    prov.csv_line() + &body
}

/// Ξ_{m,n}: header, then one matrix per line.
pub fn batches_jsonl(fs: &FlagSpace, prov: &Provenance) -> String {
    let header = json!({ "n": fs.n, "m": fs.m, "q": fs.q() });
    let lines = fs.labels().map(|l| {
        json!({ "batch_row2": fs.batch(l.batch).tableau.row2, "key": l.key, "matrix": matrix_json(&fs.matrix(l)) })
    });
    jsonl(prov, header, lines)
}

/// Batch sizes and the comparison of |Ξ_{m,n}| with the Gaussian binomial.
pub fn enumeration_report(fs: &FlagSpace, prov: &Provenance) -> String {
    let want = gaussian_binomial(fs.n as u32, fs.m as u32, fs.q());
    let batches: Vec<Value> = fs
        .batches()
        .iter()
        .map(|b| json!({ "row2": b.tableau.row2, "free": b.dim(), "size": b.size, "standard": b.tableau.is_standard() }))
        .collect();
    pretty(&json!({
        "provenance": prov,
        "n": fs.n, "m": fs.m, "q": fs.q(),
        "count": fs.len(),
        "gaussian_binomial": want.to_string(),
        "consistent": fs.len() as u128 == want,
        "batches": batches,
    }))
}

const CENSUS_COLUMNS: [&str; 8] = ["n", "m", "q", "batch_row2", "pattern", "filling", "dim_exponent", "orbit_size"];

fn census_rows<'a>(fs: &'a FlagSpace, census: &'a OrbitCensus) -> impl Iterator<Item = Vec<String>> + 'a {
    census.orbits.iter().map(move |o| {
        vec![
            fs.n.to_string(),
            fs.m.to_string(),
            fs.q().to_string(),
            join(&fs.batch(o.batch).tableau.row2),
            o.pattern.pattern().to_string(),
            o.pattern.filling_string(),
            o.exponent.to_string(),
            o.size.to_string(),
        ]
    })
}

/// One row per orbit.
pub fn orbits_csv(fs: &FlagSpace, census: &OrbitCensus, prov: &Provenance) -> String {
    csv_text(prov, &CENSUS_COLUMNS, census_rows(fs, census))
}

/// JSON mirror of `orbits_csv`, with the eligibility flag added.
pub fn orbits_json(fs: &FlagSpace, census: &OrbitCensus, prov: &Provenance) -> String {
    let rows: Vec<Value> = census
        .orbits
        .iter()
        .zip(census_rows(fs, census))
        .map(|(o, r)| {
            let mut obj: serde_json::Map<String, Value> =
                CENSUS_COLUMNS.iter().zip(r).map(|(k, v)| (k.to_string(), Value::String(v))).collect();
            for k in ["n", "m", "q", "dim_exponent", "orbit_size"] {
                let n: u64 = obj[k].as_str().and_then(|s| s.parse().ok()).expect("numeric column");
                obj.insert(k.to_string(), Value::from(n));
            }
            obj.insert("eligible".into(), Value::from(o.eligible));
            Value::Object(obj)
        })
        .collect();
    pretty(&json!({ "provenance": prov, "orbits": rows }))
}

fn census_poly_value(p: &CensusPolynomial) -> Value {
    json!({
        "c": p.c,
        "coeffs_t": p.poly.coeffs,
        "coeffs_t_minus_1": p.coeffs_t_minus_1,
        "validated_q": p.validated_q,
        "fitted_q": p.fitted_q,
        "predicted": p.predicted,
        "observed": p.observed,
        "validated": p.validated(),
        "non_negative_t_minus_1": p.non_negative(),
    })
}

pub fn census_json(counts: &[CensusCounts], polys: &[CensusPolynomial], prov: &Provenance) -> String {
    pretty(&json!({
        "provenance": prov,
        "counts": counts,
        "polynomials": polys.iter().map(census_poly_value).collect::<Vec<_>>(),
    }))
}

/// Counts per q and exponent: n,m,q,c,count.
pub fn census_csv(counts: &[CensusCounts], prov: &Provenance) -> String {
    let rows = counts.iter().flat_map(|k| {
        k.by_exponent.iter().map(move |(c, v)| vec![k.n.to_string(), k.m.to_string(), k.q.to_string(), c.to_string(), v.to_string()])
    });
    csv_text(prov, &["n", "m", "q", "c", "count"], rows)
}

/// One row per (q, tableau): n,m,q,tableau_row2,rank_count.
pub fn rank_csv(rows: &[(u64, TwoRowTableau, u64)], prov: &Provenance) -> String {
    let rows = rows.iter().map(|(q, t, c)| vec![t.n.to_string(), t.m.to_string(), q.to_string(), join(&t.row2), c.to_string()]);
    csv_text(prov, &["n", "m", "q", "tableau_row2", "rank_count"], rows)
}

pub fn rank_polynomials_json(rows: &[(u64, TwoRowTableau, u64)], fits: &[RankPolynomialFit], prov: &Provenance) -> String {
    let counts: Vec<Value> =
        rows.iter().map(|(q, t, c)| json!({ "q": q, "tableau_row2": t.row2, "rank_count": c })).collect();
    let polys: Vec<Value> = fits
        .iter()
        .map(|f| {
            json!({
                "tableau_row2": f.tableau.row2,
                "coeffs_t": f.poly.coeffs,
                "coeffs_t_minus_1": f.poly.taylor_at_one(),
                "validated_q": f.validated_q,
                "fitted_q": f.fitted.iter().map(|x| x.0).collect::<Vec<_>>(),
                "value_at_one": f.value_at_one(),
            })
        })
        .collect();
    pretty(&json!({ "provenance": prov, "counts": counts, "polynomials": polys }))
}

/// Φ_m as "row col value" lines; rows index Ξ_{m−1,n}, columns Ξ_{m,n}, both
/// in batch order.
pub fn phi_triplets(phi: &HomMatrix, prov: &Provenance) -> String {
    let mut out = prov.csv_line();
    out.push_str(&format!("# rows {} cols {}\n", phi.rows, phi.cols()));
    for (r, c, v) in phi.triplets() {
        out.push_str(&format!("{r} {c} {v}\n"));
    }
    out
}

/// One standard-basis vector per line with its certificate.
pub fn basis_jsonl(fs: &FlagSpace, basis: &[SpechtVector], p: u32, prov: &Provenance) -> String {
    let header = json!({ "n": fs.n, "m": fs.m, "q": fs.q(), "vectors": basis.len() });
    let lines = basis.iter().map(|v| {
        json!({
            "leading": { "batch": v.leading.batch, "key": v.leading.key, "matrix": matrix_json(&fs.matrix(v.leading)) },
            "last": tableau_json(&v.last),
            "pattern": v.pattern.pattern().to_string(),
            "filling": v.pattern.filling_string(),
            "integral": v.integral(p),
            "vector": module_vector_json(fs, &v.vector, p),
        })
    });
    jsonl(prov, header, lines)
}

pub fn verify_json(report: &VerifyReport, prov: &Provenance) -> String {
    pretty(&json!({ "provenance": prov, "passed": report.passed(), "checks": report.outcomes }))
}

pub fn verify_csv(report: &VerifyReport, prov: &Provenance) -> String {
    let rows = report.outcomes.iter().map(|o| {
        vec![
            o.check.clone(),
            o.n.to_string(),
            o.m.to_string(),
            o.q.to_string(),
            serde_json::to_value(o.status).expect("serializable").as_str().unwrap_or_default().to_string(),
            o.cases.to_string(),
            o.detail.clone().unwrap_or_default(),
        ]
    });
    csv_text(prov, &["check", "n", "m", "q", "status", "cases", "detail"], rows)
}
