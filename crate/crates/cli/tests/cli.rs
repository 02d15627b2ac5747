use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use liesym_cli::catalog::{run_catalog, Settings};
use liesym_cli::report::Report;
use tempfile::TempDir;

const HEAT: &str = r#"{"name": "heat", "form": "grdc", "f": "1", "h": "0", "k": "0"}"#;

fn liesym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liesym")).args(args).output().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn heat_equation_determines() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "heat.json", HEAT);
    let o = liesym(&["determine", s(&f)]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("== heat: determining system (free mode) =="), "{}", text);
    assert!(text.contains("all checks passed"));
    let o = liesym(&["determine", s(&f), "--mode", "evolution", "--format", "machine"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["command"], "determine");
    assert_eq!(v["seed"], 42);
}

#[test]
fn fixture_with_parameters_loads() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "b.json", include_str!("../catalog/B.json"));
    let o = liesym(&["verify-generator", s(&f), "--xi", "x", "--eta", "-t", "--phi", "-u"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn undeclared_symbol_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bad.json", r#"{"name": "bad", "form": "grdc", "f": "z", "h": "0", "k": "0"}"#);
    let o = liesym(&["determine", s(&f)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains('z'));
    let o = liesym(&["determine", s(&dir.path().join("missing.json"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn generator_verdict_sets_exit_code() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "heat.json", HEAT);
    let o = liesym(&["verify-generator", s(&f), "--xi", "x", "--eta", "2*t", "--phi", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let o = liesym(&["verify-generator", s(&f), "--xi", "x", "--eta", "0", "--phi", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("CHECKS FAILED"));
}

#[test]
fn jets_and_syntax_errors_rejected_in_fields() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "heat.json", HEAT);
    let o = liesym(&["verify-generator", s(&f), "--xi", "u_x", "--eta", "0", "--phi", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = liesym(&["verify-generator", s(&f), "--xi", "x+*u", "--eta", "0", "--phi", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--xi"));
}

#[test]
fn invariants_and_reduction() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "heat.json", HEAT);
    let args = ["--xi", "0", "--eta", "1", "--phi", "0", "--r", "x", "--w", "u"];
    let o = liesym(&[&["verify-invariants", s(&f)][..], &args].concat());
    assert_eq!(o.status.code(), Some(0));
    let o = liesym(&["verify-invariants", s(&f), "--xi", "1", "--eta", "0", "--phi", "0", "--r", "x", "--w", "u"]);
    assert_eq!(o.status.code(), Some(1));
    let o = liesym(&["reduce", s(&f), "--r", "x", "--w", "u"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("W_rr = 0"), "{}", text);
    assert!(text.contains("[order reduction]"));
}

#[test]
fn ansatz_needs_bases() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "heat.json", HEAT);
    assert_eq!(liesym(&["solve-ansatz", s(&f)]).status.code(), Some(2));
    let f = write(&dir, "d.json", include_str!("../catalog/D.json"));
    let o = liesym(&["solve-ansatz", s(&f)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("dimension: 2"));
}

#[test]
fn catalog_case_to_file() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("d.json");
    let o = liesym(&["catalog", "--case", "D", "--format", "machine", "--out", s(&out), "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = fs::read_to_string(&out).unwrap();
    let report: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(report.seed, 7);
    assert_eq!(report.cases.len(), 1);
    let gens = report.cases[0].sections.iter().find(|s| s.title == "generators").unwrap();
    assert_eq!(gens.items.len(), 2);
    assert!(gens.items.iter().all(|i| i.outcome.as_ref().unwrap().pass));
    assert_eq!(report.machine(), text);
}

#[test]
fn unknown_case_and_bad_flags() {
    assert_eq!(liesym(&["catalog", "--case", "E"]).status.code(), Some(2));
    assert_eq!(liesym(&["catalog", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(liesym(&["catalog", "--tol", "-1"]).status.code(), Some(2));
}

#[test]
fn empty_selection_is_header_only() {
    let r = run_catalog(&[], Settings::default()).unwrap();
    assert!(r.cases.is_empty());
    assert!(r.consistent);
    assert_eq!(r.human(None), "seed 42, tol 1e-8: all checks passed\n");
}

#[test]
fn published_case_counts() {
    let ids = vec!["system".to_string(), "KPP-I".to_string(), "KPP-II".to_string()];
    let r = run_catalog(&ids, Settings::default()).unwrap();
    assert_eq!(r.cases.iter().map(|c| c.id.as_str()).collect::<Vec<_>>(), ["KPP-I", "KPP-II", "system"]);
    let rows = r.cases[2].sections.iter().find(|s| s.title == "rows").unwrap();
    assert_eq!(rows.items.len(), 13);
    for c in &r.cases[..2] {
        let gens = c.sections.iter().find(|s| s.title == "generators").unwrap();
        assert!(gens.items[..2].iter().all(|i| i.outcome.as_ref().unwrap().pass));
    }
}
