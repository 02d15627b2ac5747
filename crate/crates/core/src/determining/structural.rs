use std::collections::BTreeSet;

use super::{Assumptions, DeterminingError, DeterminingSystem};
use crate::expr::{simplify, split_coeff, Expr, FnSym, Monomial};

/// Generator component functions whose derivatives are the unknowns.
const UNKNOWNS: [&str; 3] = ["xi", "eta", "phi"];

/// A derived identity `function_J = 0`, e.g. `eta_u = 0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fact {
    pub function: FnSym,
    /// Row the fact was read from.
    pub source: Monomial,
}

impl Fact {
    pub fn label(&self) -> String {
        self.function.label()
    }

    /// True when `g` is this derivative or a further derivative of it.
    fn covers(&self, g: &FnSym) -> bool {
        g.name == self.function.name
            && g.slots == self.function.slots
            && g.d.len() == self.function.d.len()
            && g.d.iter().zip(&self.function.d).all(|(a, b)| a >= b)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructuralReduction {
    pub facts: Vec<Fact>,
    /// Remaining equations, keyed by the row they came from.
    pub equations: Vec<(Monomial, Expr)>,
    /// Rows that vanish once the facts hold.
    pub dropped: Vec<Monomial>,
    /// True when no deduction was attempted (`f == 0` declared).
    pub passthrough: bool,
}

/// Deduce vanishing derivatives of `xi`, `eta`, `phi` from the determining
/// system and rewrite the remaining equations with them.
///
/// Two rules run to a fixpoint:
/// * a row whose coefficient is a single unknown derivative times factors
///   known to be nonzero forces that derivative to vanish;
/// * a row `c·D + rest` where `rest` does not depend on some slot `s` of `D`
///   forces `D_s` to vanish.
pub fn structural_reduce(sys: &DeterminingSystem, assumptions: &Assumptions) -> Result<StructuralReduction, DeterminingError> {
    if assumptions.zero.contains("f") {
        return Ok(StructuralReduction {
            facts: Vec::new(),
            equations: sys.rows.clone(),
            dropped: Vec::new(),
            passthrough: true,
        });
    }
    if !assumptions.is_nonzero("f") {
        return Err(DeterminingError::AssumptionMissing("f".into()));
    }
    let mut rows = sys.rows.clone();
    let mut facts: Vec<Fact> = Vec::new();
    let mut dropped = Vec::new();
    loop {
        let mut new: Vec<Fact> = Vec::new();
        // Simplest rows first, so each fact is credited to its plainest source.
        let mut order: Vec<&(Monomial, Expr)> = rows.iter().collect();
        order.sort_by_key(|(_, c)| (c.factors().iter().filter(|f| f.as_num().is_none()).count(), c.size()));
        for (m, c) in order {
            if let Some(g) = single_unknown(c, assumptions) {
                push_fact(&mut new, &facts, g, m);
            }
        }
        if new.is_empty() {
            for (m, c) in &rows {
                for g in slot_independence(c, &facts) {
                    push_fact(&mut new, &facts, g, m);
                }
                if !new.is_empty() {
                    break;
                }
            }
        }
        if new.is_empty() {
            break;
        }
        facts.extend(new);
        let mut kept = Vec::new();
        for (m, c) in rows {
            let c = simplify(&apply_facts(&c, &facts));
            if c.is_num_zero() {
                dropped.push(m);
            } else {
                kept.push((m, c));
            }
        }
        rows = kept;
    }
    Ok(StructuralReduction {
        facts,
        equations: rows,
        dropped,
        passthrough: false,
    })
}

fn push_fact(new: &mut Vec<Fact>, old: &[Fact], g: FnSym, source: &Monomial) {
    if old.iter().chain(new.iter()).any(|f| f.covers(&g)) {
        return;
    }
    new.retain(|f| !Fact { function: g.clone(), source: source.clone() }.covers(&f.function));
    new.push(Fact {
        function: g,
        source: source.clone(),
    });
}

/// Replace every derivative covered by a fact with zero.
pub(crate) fn apply_facts(e: &Expr, facts: &[Fact]) -> Expr {
    match e {
        Expr::Fn(g) if facts.iter().any(|f| f.covers(g)) => Expr::zero(),
        _ => e.map_children(|c| apply_facts(c, facts)),
    }
}

fn is_unknown(g: &FnSym) -> bool {
    UNKNOWNS.contains(&g.name.as_str())
}

/// `c = (nonzero factors) · D` with `D` a derivative of an unknown.
fn single_unknown(c: &Expr, a: &Assumptions) -> Option<FnSym> {
    let (k, rest) = split_coeff(c);
    if k.is_zero() {
        return None;
    }
    let mut found = None;
    for f in rest.factors() {
        let base = match &f {
            Expr::Pow(b, x) if x.as_num().is_some_and(|n| !n.is_negative() && !n.is_zero()) => b.as_ref(),
            other => other,
        };
        match base {
            Expr::Fn(g) if is_unknown(g) && g.order() > 0 => {
                if found.is_some() {
                    return None;
                }
                found = Some(g.clone());
            }
            other if nonzero_factor(other, a) => {}
            _ => return None,
        }
    }
    found
}

fn nonzero_factor(e: &Expr, a: &Assumptions) -> bool {
    match e {
        Expr::Num(n) => !n.is_zero(),
        Expr::Sym(s) => matches!(s.as_str(), "x" | "t" | "u") || a.is_nonzero(s),
        Expr::Fn(g) => !is_unknown(g) && a.is_nonzero(&g.label()),
        Expr::Pow(b, _) => nonzero_factor(b, a),
        Expr::Exp(_) => true,
        Expr::Mul(v) => v.iter().all(|f| nonzero_factor(f, a)),
        other => {
            let base: BTreeSet<&str> = ["x", "t", "u"].into_iter().collect();
            other.function_labels().is_empty()
                && other.symbols().iter().all(|s| base.contains(s.as_str()))
                && !crate::expr::is_zero(other)
        }
    }
}

/// Variables an expression may depend on, given the facts: first-order
/// facts `g_s = 0` remove slot `s` from `g`.
fn dependence(e: &Expr, facts: &[Fact]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    dependence_into(e, facts, &mut out);
    out
}

fn dependence_into(e: &Expr, facts: &[Fact], out: &mut BTreeSet<String>) {
    match e {
        Expr::Sym(s) if matches!(s.as_str(), "x" | "t" | "u") => {
            out.insert(s.clone());
        }
        Expr::Fn(g) => {
            for (i, arg) in g.args.iter().enumerate() {
                let killed = facts
                    .iter()
                    .any(|f| f.function.name == g.name && f.function.order() == 1 && f.function.d[i] == 1);
                if !killed {
                    dependence_into(arg, facts, out);
                }
            }
        }
        _ => {
            for c in e.children() {
                dependence_into(c, facts, out);
            }
        }
    }
}

/// For `c = k·D + rest`, derivatives `D_s` for slots `s` that neither `rest`
/// nor the facts allow `D` to depend on.
fn slot_independence(c: &Expr, facts: &[Fact]) -> Vec<FnSym> {
    let terms = c.terms();
    for (i, t) in terms.iter().enumerate() {
        let (k, r) = split_coeff(t);
        let Expr::Fn(g) = &r else { continue };
        if k.is_zero() || !is_unknown(g) || g.order() == 0 {
            continue;
        }
        let rest = Expr::add(terms.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, t)| t.clone()).collect());
        if rest.function_labels().contains(&g.label()) {
            continue;
        }
        let deps = dependence(&rest, facts);
        let own = dependence(&Expr::Fn(g.clone()), facts);
        let out: Vec<FnSym> = g
            .slots
            .iter()
            .enumerate()
            .filter(|(j, _)| {
                let vars = g.args[*j].symbols();
                vars.iter().all(|v| own.contains(v)) && !vars.iter().any(|v| deps.contains(v))
            })
            .map(|(j, _)| g.derived(j))
            .collect();
        if !out.is_empty() {
            return out;
        }
    }
    Vec::new()
}
