use std::collections::BTreeMap;

use super::reduction::{ode_jet, Certification, ChangeOfVariables, ReducedODE};
use super::ReduceError;
use crate::expr::{substitute, Expr};

fn fresh(candidates: &[&str], used: &std::collections::BTreeSet<String>) -> String {
    candidates
        .iter()
        .find(|c| !used.contains(**c))
        .map(|c| c.to_string())
        .unwrap_or_else(|| format!("{}{}", candidates[0], used.len()))
}

/// Order reduction of an autonomous second-order ODE: with `c = W` and
/// `W' = P(c)`, `W'' = P'(c)·P(c)`.
pub fn autonomous_reduce(ode: &ReducedODE) -> Result<ReducedODE, ReduceError> {
    if ode.residual.depends_on(&ode.indep) {
        return Err(ReduceError::NotAutonomous(format!("{} depends on {}", ode.residual, ode.indep)));
    }
    if ode.order != 2 {
        return Err(ReduceError::NotAutonomous(format!("expected second order, found order {}", ode.order)));
    }
    let used = ode.residual.symbols();
    let c = fresh(&["c", "s", "v"], &used);
    let p = fresh(&["P", "Q", "G"], &used);
    let pc = ode_jet(&p, &c, 1);
    let bindings = vec![
        (ode.jet(0), Expr::sym(&c)),
        (ode.jet(1), Expr::sym(&p)),
        (ode.jet(2), Expr::sym(&pc) * Expr::sym(&p)),
    ];
    let map: BTreeMap<String, Expr> = bindings.iter().cloned().collect();
    let residual = substitute(&ode.residual, &map).expect("fresh names");
    Ok(ReducedODE {
        indep: c,
        unknown: p,
        indep_expr: Expr::sym(&ode.jet(0)),
        order: 1,
        residual,
        multiplier: Expr::one(),
        change: ChangeOfVariables {
            bindings,
            eliminated: None,
        },
        certification: Certification::Symbolic,
        independence: None,
        soundness: None,
    })
}
