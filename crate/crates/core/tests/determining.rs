mod common;

use common::p;
use liesym_core::determining::*;
use liesym_core::expr::{is_zero, simplify, Expr, Monomial, Number};
use liesym_core::jet::VectorField;

fn general() -> EvolutionPDE {
    build_grdc(p("f"), p("h"), p("k")).unwrap().assume_nonzero("f")
}

fn case(f: &str, h: &str, k: &str) -> EvolutionPDE {
    build_grdc(p(f), p(h), p(k)).unwrap()
}

fn field(xi: &str, eta: &str, phi: &str) -> VectorField {
    VectorField::new(p(xi), p(eta), p(phi))
}

/// `v` lies in the row space of the echelon rows.
fn in_span(rows: &[Vec<Number>], v: &[f64]) -> bool {
    let mut rest = v.to_vec();
    for row in rows {
        let row: Vec<f64> = row.iter().map(Number::to_f64).collect();
        let pivot = row.iter().position(|c| c.abs() > 1e-12).unwrap();
        let k = rest[pivot] / row[pivot];
        for (r, c) in rest.iter_mut().zip(&row) {
            *r -= k * c;
        }
    }
    rest.iter().all(|c| c.abs() < 1e-9)
}

#[test]
fn free_system_has_thirteen_rows_and_reconstructs() {
    let pde = general();
    let r = criterion_residual(&pde, &VectorField::general(), Mode::Free).unwrap();
    let sys = extract_system(&r, Mode::Free).unwrap();
    assert_eq!(sys.len(), 13);
    assert!(is_zero(&(sys.reconstruct() - simplify(&(sys.multiplier.clone() * r)))));
    let eta_u = sys.coefficient(&Monomial::from_pairs(&[("u_t", 2)])).unwrap();
    assert_eq!(*eta_u, simplify(&p("-eta_u")));
}

#[test]
fn structural_facts_for_general_equation() {
    let pde = general();
    let r = criterion_residual(&pde, &VectorField::general(), Mode::Free).unwrap();
    let red = structural_reduce(&extract_system(&r, Mode::Free).unwrap(), &pde.assumptions).unwrap();
    let labels: Vec<String> = red.facts.iter().map(Fact::label).collect();
    for l in ["eta_u", "eta_x", "xi_u"] {
        assert!(labels.iter().any(|x| x == l), "{:?}", labels);
    }
    assert_eq!(red.equations.len(), 5);
}

#[test]
fn unknown_f_needs_an_assumption() {
    let pde = build_grdc(p("f"), p("h"), p("k")).unwrap();
    let pde = EvolutionPDE { assumptions: Assumptions::default(), ..pde };
    let r = criterion_residual(&pde, &VectorField::general(), Mode::Free).unwrap();
    let sys = extract_system(&r, Mode::Free).unwrap();
    assert!(matches!(structural_reduce(&sys, &pde.assumptions), Err(DeterminingError::AssumptionMissing(_))));
}

#[test]
fn time_translation_is_always_a_symmetry() {
    for (f, h, k) in [
        ("x/u", "-2/u", "a*u + b"),
        ("a*x^4*u", "b*x/u", "x*u"),
        ("a*x*exp(-u/b)", "x*u", "c - b*u"),
        ("a*x^2*u", "x*u", "u"),
    ] {
        let rep = verify_generator(&case(f, h, k), &VectorField::dt(), 1e-8, 7);
        assert!(rep.pass && rep.symbolic_zero, "{} {} {}", f, h, k);
    }
}

#[test]
fn scaling_symmetries() {
    let b = case("a*x^4*u", "b*x/u", "x*u");
    assert!(verify_generator(&b, &field("x", "-t", "-u"), 1e-8, 7).pass);
    let d = case("a*x^2*u", "x*u", "u");
    assert!(verify_generator(&d, &field("x", "0", "0"), 1e-8, 7).pass);
    // Dilation in x alone is not a symmetry of case B.
    let rep = verify_generator(&b, &field("x", "0", "0"), 1e-8, 7);
    assert!(!rep.pass);
    assert!(rep.verdict.unwrap().witness.is_some());
}

#[test]
fn free_mode_matches_manifold_for_symmetries() {
    // A symmetry makes the residual vanish on solutions, so evolution mode
    // gives zero while free mode keeps u_t-dependent terms.
    let d = case("a*x^2*u", "x*u", "u");
    let e = criterion_residual(&d, &field("x", "0", "0"), Mode::Evolution).unwrap();
    assert!(is_zero(&e));
}

#[test]
fn ansatz_case_d() {
    let d = case("a*x^2*u", "x*u", "u");
    let bases = [vec![p("1"), p("x")], vec![p("1"), p("t")], vec![p("u")]];
    let sol = solve_ansatz(&d, &bases, &AnsatzOptions::default()).unwrap();
    assert!(in_span(&sol.coefficients, &[0.0, 0.0, 1.0, 0.0, 0.0]));
    assert!(in_span(&sol.coefficients, &[0.0, 1.0, 0.0, 0.0, 0.0]));
    assert!(sol.reports.iter().all(|r| r.pass));
}

#[test]
fn ansatz_kpp_translations_only() {
    let kpp = build_evolution(p("1/b*(u_xx - gamma*u*u_x - F(u))")).unwrap();
    let bases = [vec![p("1"), p("x")], vec![p("1"), p("t")], vec![p("1"), p("u")]];
    let sol = solve_ansatz(&kpp, &bases, &AnsatzOptions::default()).unwrap();
    assert_eq!(sol.fields.len(), 2);
    assert!(in_span(&sol.coefficients, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
    assert!(in_span(&sol.coefficients, &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0]));
    for f in &sol.fields {
        assert!(verify_generator(&kpp, f, 1e-8, 11).pass);
    }
}

#[test]
fn grdc_expansion() {
    let pde = case("x", "0", "u");
    let expect = simplify(&p("u_x + x*u_xx + u"));
    assert!(is_zero(&(pde.rhs.clone() - expect)));
    assert_eq!(pde.delta, simplify(&(Expr::sym("u_t") - pde.rhs.clone())));
}
