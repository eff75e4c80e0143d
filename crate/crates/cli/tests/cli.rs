use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn specht(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specht"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir)
        .map(|d| d.map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect())
        .unwrap_or_default();
    v.sort();
    v
}

#[test]
fn enumerate_writes_every_matrix() {
    let d = tempfile::tempdir().unwrap();
    let o = specht(&["enumerate", "--n", "4", "--m", "2", "--q", "2"], d.path());
    assert!(o.status.success());
    let lines: Vec<Value> = read(d.path(), "xi_n4_m2_q2.jsonl").lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 36);
    assert_eq!(lines[0]["provenance"]["config"]["seed"], 0);
    let report: Value = serde_json::from_str(&read(d.path(), "enumerate_n4_m2_q2.json")).unwrap();
    assert_eq!(report["count"], 35);
    assert_eq!(report["consistent"], true);
    assert_eq!(report["batches"].as_array().unwrap().len(), 6);

    let o = specht(&["enumerate", "--n", "5", "--m", "0", "--q", "3"], d.path());
    assert!(o.status.success());
    assert_eq!(read(d.path(), "xi_n5_m0_q3.jsonl").lines().count(), 2);
}

#[test]
fn budget_failure_leaves_no_files() {
    let d = tempfile::tempdir().unwrap();
    let o = specht(&["orbits", "--n", "6", "--m", "3", "--q", "2", "--q", "4", "--budget", "2000"], d.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(files(d.path()).is_empty(), "{:?}", files(d.path()));
}

#[test]
fn usage_errors_exit_2() {
    let d = tempfile::tempdir().unwrap();
    for args in [
        vec!["enumerate", "--n", "4", "--m", "3"],
        vec!["enumerate", "--n", "4", "--m", "1", "--q", "6"],
        vec!["enumerate", "--n", "4", "--m", "1", "--q", "32"],
        vec!["enumerate", "--n", "4"],
        vec!["census", "--n", "4", "--m", "1", "--q", "2", "--q", "2"],
        vec!["orbits", "--n", "4", "--m", "1", "--format", "xml"],
    ] {
        let o = specht(&args, d.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
    assert!(files(d.path()).is_empty());
}

#[test]
fn basis_has_one_record_per_dimension() {
    let d = tempfile::tempdir().unwrap();
    let o = specht(&["basis", "--n", "4", "--m", "2", "--q", "2"], d.path());
    assert!(o.status.success());
    let text = read(d.path(), "basis_n4_m2_q2.jsonl");
    let mut lines = text.lines();
    let head: Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(head["vectors"], 20);
    let recs: Vec<Value> = lines.map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(recs.len(), 20);
    for r in &recs {
        assert_eq!(r["integral"], true);
        assert_eq!(r["vector"]["basis"], "idempotent");
        assert!(r["leading"]["matrix"]["row_labels"].is_array());
    }
    let phi = read(d.path(), "phi_n4_m2_q2.txt");
    assert!(phi.lines().nth(1).unwrap().starts_with("# rows 15 cols 35"));
}

#[test]
fn rank_polynomials_are_validated_at_a_held_out_q() {
    let d = tempfile::tempdir().unwrap();
    let o = specht(&["rankpoly", "--n", "4", "--m", "2", "--q", "2", "--q", "3", "--q", "4", "--q", "5"], d.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&read(d.path(), "rankpoly_n4_m2_polynomials.json")).unwrap();
    let polys = v["polynomials"].as_array().unwrap();
    assert_eq!(polys.len(), 2);
    for p in polys {
        assert_eq!(p["value_at_one"], 1);
        assert!(!p["fitted_q"].as_array().unwrap().contains(&p["validated_q"]));
    }
    assert_eq!(polys[0]["coeffs_t"], serde_json::json!([0, 0, 1]));
    let csv = read(d.path(), "rankpoly_n4_m2_counts.csv");
    assert_eq!(csv.lines().nth(1).unwrap(), "n,m,q,tableau_row2,rank_count");
    assert_eq!(csv.lines().count(), 2 + 4 * 6);
}

#[test]
fn census_beyond_the_box_count_is_zero() {
    let d = tempfile::tempdir().unwrap();
    let o = specht(&["census", "--n", "4", "--m", "2", "--c", "9", "--format", "json"], d.path());
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&read(d.path(), "census_n4_m2_polynomials.json")).unwrap();
    let p = &v["polynomials"][0];
    assert_eq!(p["c"], 9);
    assert_eq!(p["coeffs_t"], serde_json::json!([]));
    assert_eq!(p["validated"], true);
    assert_eq!(files(d.path()), vec!["census_n4_m2_polynomials.json"]);
}

#[test]
fn verify_passes_and_notices_a_corrupted_theta() {
    let d = tempfile::tempdir().unwrap();
    let o = specht(&["verify", "--n", "4", "--format", "json"], d.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let v: Value = serde_json::from_str(&read(d.path(), "verify.json")).unwrap();
    assert_eq!(v["passed"], true);

    let o = specht(&["verify", "--n", "4", "--m", "2", "--q", "3", "--fault", "negated-theta"], d.path());
    assert_eq!(o.status.code(), Some(4));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("FAIL monomial-action-oracle"), "{stdout}");
    let csv = read(d.path(), "verify.csv");
    assert!(csv.lines().any(|l| l.starts_with("monomial-action-oracle,4,2,3,fail")));

    let o = specht(&["verify", "--n", "3", "--m", "0"], d.path());
    assert!(o.status.success());
}

#[test]
fn output_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, workers) in [(a.path(), "1"), (b.path(), "3")] {
        for cmd in ["orbits", "basis"] {
            let o = specht(&[cmd, "--n", "4", "--m", "2", "--q", "3", "--seed", "11", "--workers", workers], dir);
            assert!(o.status.success());
        }
        let o = specht(&["verify", "--n", "3", "--seed", "11", "--workers", workers], dir);
        assert!(o.status.success());
    }
    assert_eq!(files(a.path()), files(b.path()));
    for f in files(a.path()) {
        assert_eq!(read(a.path(), &f), read(b.path(), &f), "{f}");
    }
    assert!(read(a.path(), "orbits_n4_m2_q3.csv").lines().next().unwrap().contains("\"seed\":11"));
}
