//! Single-file commands. Each returns a [`Report`] or an input error.

use std::path::Path;

use liesym_core::determining::{
    criterion_residual, extract_system, solve_ansatz, structural_reduce, verify_generator, AnsatzOptions, EvolutionPDE,
    Mode,
};
use liesym_core::expr::{is_zero, simplify, Expr};
use liesym_core::jet::VectorField;
use liesym_core::lang::{load_problem, parse_in, Problem};
use liesym_core::reduce::{
    autonomous_reduce, reduce, separable_solve, verify_invariants, InvariantPair, ReduceError, ReducedODE,
};

use crate::catalog::Settings;
use crate::report::{CaseReport, Item, Outcome, Report, Section};

/// Bad input: unreadable file, schema or syntax error, malformed option.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn input(e: impl ToString) -> InputError {
    InputError(e.to_string())
}

/// Field components as given on the command line.
pub struct FieldArgs<'a> {
    pub xi: &'a str,
    pub eta: &'a str,
    pub phi: &'a str,
}

fn load(path: &Path) -> Result<(Problem, EvolutionPDE), InputError> {
    let prob = load_problem(path).map_err(input)?;
    let pde = EvolutionPDE::from_problem(&prob).map_err(input)?;
    Ok((prob, pde))
}

/// Parse a user expression over `x`, `t`, `u` and the declared parameters.
fn expr(prob: &Problem, what: &str, src: &str) -> Result<Expr, InputError> {
    let scope = prob.field_scope();
    let e = parse_in(src, &scope).map_err(|e| InputError(format!("--{}: {}", what, e)))?;
    match scope.forbidden().iter().find(|j| e.depends_on(j)) {
        Some(j) => Err(InputError(format!("--{}: `{}` is not allowed here", what, j))),
        None => Ok(e),
    }
}

fn field(prob: &Problem, a: &FieldArgs) -> Result<VectorField, InputError> {
    Ok(VectorField::new(
        expr(prob, "xi", a.xi)?,
        expr(prob, "eta", a.eta)?,
        expr(prob, "phi", a.phi)?,
    ))
}

fn single(command: &str, s: Settings, case: CaseReport) -> Report {
    Report::new(command, s.seed, s.tol, vec![case])
}

pub fn determine(path: &Path, mode: Mode, s: Settings) -> Result<Report, InputError> {
    let (prob, pde) = load(path)?;
    let mut rep = CaseReport::new(&prob.name, format!("determining system ({} mode)", mode));
    let general = VectorField::general();
    let residual = criterion_residual(&pde, &general, mode).map_err(input)?;
    let sys = extract_system(&residual, mode).map_err(input)?;
    let mut rows = Section::new("rows");
    for (m, c) in &sys.rows {
        rows.push(Item::new(m.to_string(), c.to_string()));
    }
    rep.sections.push(rows);
    let cleared = simplify(&(sys.multiplier.clone() * residual));
    rep.check(
        "rows reconstruct the residual",
        is_zero(&(sys.reconstruct() - cleared)),
        format!("multiplier {}", sys.multiplier),
    );
    if mode == Mode::Free {
        match structural_reduce(&sys, &pde.assumptions) {
            Ok(red) => {
                let mut sec = Section::new("structural reduction");
                for f in &red.facts {
                    sec.push(Item::new(format!("{} = 0", f.label()), format!("from row {}", f.source)));
                }
                for (m, e) in &red.equations {
                    sec.push(Item::new(format!("row {}", m), format!("{} = 0", e)));
                }
                rep.sections.push(sec);
            }
            Err(e) => rep.sections.push({
                let mut sec = Section::new("structural reduction");
                sec.push(Item::new("skipped", e.to_string()));
                sec
            }),
        }
    }
    Ok(single("determine", s, rep))
}

pub fn verify_generator_cmd(path: &Path, a: &FieldArgs, s: Settings) -> Result<Report, InputError> {
    let (prob, pde) = load(path)?;
    let x = field(&prob, a)?;
    let r = verify_generator(&pde, &x, s.tol, s.seed);
    let mut rep = CaseReport::new(&prob.name, "generator verification");
    let mut sec = Section::new("generator");
    let mut item = Item::new(x.display(), format!("residual {}", r.residual)).outcome(Outcome::from_generator(&r, s.seed, s.tol));
    if !r.notes.is_empty() {
        item = item.note(r.notes.join("; "));
    }
    sec.push(item);
    rep.sections.push(sec);
    rep.check("generator is a symmetry", r.pass, "");
    Ok(single("verify-generator", s, rep))
}

pub fn solve_ansatz_cmd(path: &Path, s: Settings) -> Result<Report, InputError> {
    let (prob, pde) = load(path)?;
    let bases = prob
        .bases
        .as_ref()
        .ok_or_else(|| InputError(format!("{}: no `bases` given", path.display())))?;
    let opts = AnsatzOptions {
        tol: s.tol,
        seed: s.seed,
        ..Default::default()
    };
    let sol = solve_ansatz(&pde, bases, &opts).map_err(input)?;
    let mut rep = CaseReport::new(&prob.name, "polynomial ansatz");
    let mut sec = Section::new("fields");
    for (f, r) in sol.fields.iter().zip(&sol.reports) {
        sec.push(Item::new("field", f.display()).outcome(Outcome::from_generator(r, s.seed, s.tol)));
    }
    sec.push(Item::new("dimension", sol.fields.len().to_string()));
    rep.sections.push(sec);
    rep.check("every field verifies", sol.reports.iter().all(|r| r.pass), "");
    Ok(single("solve-ansatz", s, rep))
}

pub fn verify_invariants_cmd(path: &Path, a: &FieldArgs, r: &str, w: &str, s: Settings) -> Result<Report, InputError> {
    let (prob, _) = load(path)?;
    let x = field(&prob, a)?;
    let pair = InvariantPair::new(expr(&prob, "r", r)?, expr(&prob, "w", w)?).map_err(input)?;
    let ir = verify_invariants(&x, &pair, s.tol, s.seed);
    let mut rep = CaseReport::new(&prob.name, "invariant verification");
    let mut sec = Section::new("invariants");
    sec.push(Item::new("X(r)", ir.xr.to_string()));
    sec.push(Item::new("X(w)", ir.xw.to_string()));
    let outcome = match ir.verdicts.iter().find(|v| !v.equivalent).or(ir.verdicts.first()) {
        Some(v) if !ir.exact => Outcome::from_verdict(v),
        _ => Outcome::symbolic(ir.exact, s.seed, s.tol),
    };
    let mut item = Item::new(format!("r = {}, w = {}", pair.r, pair.w), "annihilated").outcome(Outcome {
        pass: ir.pass,
        ..outcome
    });
    if !ir.notes.is_empty() {
        item = item.note(ir.notes.join("; "));
    }
    sec.push(item);
    rep.sections.push(sec);
    rep.check("invariants are annihilated", ir.pass, "");
    Ok(single("verify-invariants", s, rep))
}

pub fn reduce_cmd(path: &Path, r: &str, w: &str, s: Settings) -> Result<Report, InputError> {
    let (prob, pde) = load(path)?;
    let pair = InvariantPair::new(expr(&prob, "r", r)?, expr(&prob, "w", w)?).map_err(input)?;
    let mut rep = CaseReport::new(&prob.name, format!("reduction by r = {}, w = {}", pair.r, pair.w));
    match reduce(&pde, &pair, s.tol, s.seed) {
        Ok(ode) => reduced_sections(&ode, &mut rep, s),
        Err(e @ (ReduceError::UnsupportedInvariantForm(_) | ReduceError::UnsupportedFieldStructure(_))) => {
            return Err(input(e))
        }
        Err(e @ ReduceError::NotSelfSimilar { .. }) => {
            let mut sec = Section::new("reduction");
            sec.push(Item::new("reduced equation", "none").note(e.to_string()));
            rep.sections.push(sec);
        }
        Err(e) => rep.errors.push(e.to_string()),
    }
    Ok(single("reduce", s, rep))
}

fn reduced_sections(ode: &ReducedODE, rep: &mut CaseReport, s: Settings) {
    let mut sec = Section::new("reduction");
    for (k, v) in &ode.change.bindings {
        sec.push(Item::new(k.clone(), v.to_string()));
    }
    if let Some((k, v)) = &ode.change.eliminated {
        sec.push(Item::new(format!("eliminated {}", k), v.to_string()));
    }
    sec.push(
        Item::new("reduced equation", format!("{} = 0", ode.residual))
            .note(format!("multiplier {}, {}", ode.multiplier, ode.certification)),
    );
    if let Some(v) = &ode.soundness {
        rep.check("multiplier identity", v.equivalent, format!("max {:.2e}", v.max_scaled));
    }
    if let Some(v) = &ode.independence {
        rep.check("depends on r only", v.equivalent, format!("max {:.2e}", v.max_scaled));
    }
    rep.sections.push(sec);
    if let Ok(a) = autonomous_reduce(ode) {
        let mut sec = Section::new("order reduction");
        sec.push(Item::new(format!("{}({}) = {}", a.unknown, a.indep, ode.jet(1)), format!("{} = 0", a.residual)));
        rep.sections.push(sec);
    }
    if let Ok(q) = separable_solve(ode) {
        let mut sec = Section::new("quadrature");
        let mut item = Item::new("solution", q.to_string());
        match q.verify(ode, 100, 1e-7, s.seed) {
            Ok(v) => {
                rep.check("quadrature implicit differentiation", v.equivalent, format!("max {:.2e}", v.max_scaled));
                item = item.outcome(Outcome::from_verdict(&v));
            }
            Err(e) => item = item.note(e.to_string()),
        }
        sec.push(item);
        rep.sections.push(sec);
    }
}
