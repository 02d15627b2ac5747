use super::{verify_invariants, InvariantPair, ReduceError};
use crate::expr::{diff, expand, is_zero, simplify, Expr, Number};
use crate::jet::VectorField;

/// Antiderivative in `var` for sums of terms `c·var^p` and `c·exp(λ·var + μ)`
/// with `c`, `λ`, `μ` free of `var`. `None` for anything else.
pub fn integrate(e: &Expr, var: &str) -> Option<Expr> {
    let mut out = Vec::new();
    for term in expand(e).terms() {
        out.push(integrate_term(&term, var)?);
    }
    Some(simplify(&Expr::add(out)))
}

fn integrate_term(t: &Expr, var: &str) -> Option<Expr> {
    let (c, dep): (Vec<Expr>, Vec<Expr>) = t.factors().into_iter().partition(|f| !f.depends_on(var));
    let c = Expr::mul(c);
    let v = Expr::sym(var);
    let body = match dep.as_slice() {
        [] => v,
        [Expr::Sym(s)] if s == var => Expr::powi(v, 2) / 2,
        [Expr::Pow(b, n)] if b.as_sym() == Some(var) && n.as_num().is_some() => {
            let n = n.as_num().unwrap();
            if *n == Number::int(-1) {
                Expr::ln(v)
            } else {
                let m = Expr::Num(n.add(&Number::one()));
                Expr::pow(v, m.clone()) / m
            }
        }
        [Expr::Exp(arg)] => {
            let lambda = diff(arg, var);
            if lambda.depends_on(var) || is_zero(&lambda) {
                return None;
            }
            Expr::exp(arg.as_ref().clone()) / lambda
        }
        _ => return None,
    };
    Some(simplify(&(c * body)))
}

/// `exp(-I)`, turning `c·ln(v)` terms of `I` into powers `v^-c`.
fn exp_neg(i: &Expr) -> Expr {
    let mut powers = Vec::new();
    let mut rest = Vec::new();
    for t in i.terms() {
        match ln_term(&t) {
            Some((c, v)) => powers.push(Expr::pow(v, Expr::Num(c.neg()))),
            None => rest.push(t),
        }
    }
    if !rest.is_empty() {
        powers.push(Expr::exp(-Expr::add(rest)));
    }
    simplify(&Expr::mul(powers))
}

/// `c·ln(v)` with numeric `c`.
fn ln_term(t: &Expr) -> Option<(Number, Expr)> {
    match t {
        Expr::Ln(a) => Some((Number::one(), a.as_ref().clone())),
        Expr::Mul(v) if v.len() == 2 => match (&v[0], &v[1]) {
            (Expr::Num(c), Expr::Ln(a)) => Some((c.clone(), a.as_ref().clone())),
            _ => None,
        },
        _ => None,
    }
}

/// Split `e` into a factor depending only on `a` and one depending only on
/// `b` (constants go with the first).
fn separate(e: &Expr, a: &str, b: &str) -> Option<(Expr, Expr)> {
    let mut fa = Vec::new();
    let mut fb = Vec::new();
    for f in simplify(e).factors() {
        match (f.depends_on(a), f.depends_on(b)) {
            (true, true) => return None,
            (false, true) => fb.push(f),
            _ => fa.push(f),
        }
    }
    Some((simplify(&Expr::mul(fa)), simplify(&Expr::mul(fb))))
}

fn unsupported(msg: impl Into<String>) -> ReduceError {
    ReduceError::UnsupportedFieldStructure(msg.into())
}

/// Invariants of a structured field by integrating its characteristic
/// system `dx/ξ = dt/η = du/φ`.
///
/// `ξ` and `η` must be free of `u`, `φ` affine in `u`, and each ratio that
/// has to be integrated must be a sum of monomials and exponentials in one
/// variable.
pub fn characteristics_solve(field: &VectorField) -> Result<InvariantPair, ReduceError> {
    let xi = simplify(&field.xi);
    let eta = simplify(&field.eta);
    let phi = simplify(&field.phi);
    if xi.depends_on("u") || eta.depends_on("u") {
        return Err(unsupported("xi and eta must be free of u"));
    }
    let phi_lin = diff(&phi, "u");
    if phi_lin.depends_on("u") {
        return Err(unsupported("phi must be affine in u"));
    }
    let phi0 = simplify(&(phi.clone() - phi_lin.clone() * Expr::sym("u")));
    let (r, var, denom) = match (is_zero(&xi), is_zero(&eta)) {
        (true, true) => return Err(unsupported("a field along d_u alone has no u-affine invariant")),
        (false, true) => (Expr::sym("t"), "x", xi.clone()),
        (true, false) => (Expr::sym("x"), "t", eta.clone()),
        (false, false) => {
            // dt/dx = η/ξ = P(x)·Q(t)  ⇒  r = ∫P dx − ∫ dt/Q.
            let (p, q) = separate(&simplify(&(eta.clone() / xi.clone())), "x", "t")
                .ok_or_else(|| unsupported("eta/xi does not separate in x and t"))?;
            let ip = integrate(&p, "x").ok_or_else(|| unsupported(format!("cannot integrate {} in x", p)))?;
            let iq = integrate(&simplify(&q.clone().recip()), "t")
                .ok_or_else(|| unsupported(format!("cannot integrate 1/({}) in t", q)))?;
            let r = normalize_log_sum(&simplify(&(ip - iq)));
            let by_x = simplify(&(phi.clone() / xi.clone()));
            if !by_x.depends_on("t") {
                (r, "x", xi.clone())
            } else if !simplify(&(phi.clone() / eta.clone())).depends_on("x") {
                (r, "t", eta.clone())
            } else {
                return Err(unsupported("du/phi couples x and t"));
            }
        }
    };
    let w = if is_zero(&phi_lin) {
        let i = integrate(&simplify(&(phi0.clone() / denom.clone())), var)
            .ok_or_else(|| unsupported(format!("cannot integrate ({})/({}) in {}", phi0, denom, var)))?;
        simplify(&(Expr::sym("u") - i))
    } else {
        let g = simplify(&(phi_lin.clone() / denom.clone()));
        let i = integrate(&g, var).ok_or_else(|| unsupported(format!("cannot integrate {} in {}", g, var)))?;
        let factor = exp_neg(&i);
        if is_zero(&phi0) {
            simplify(&(Expr::sym("u") * factor))
        } else {
            let s = simplify(&(phi0.clone() / denom.clone() * factor.clone()));
            let j = integrate(&s, var).ok_or_else(|| unsupported(format!("cannot integrate {} in {}", s, var)))?;
            simplify(&(Expr::sym("u") * factor - j))
        }
    };
    let inv = InvariantPair::new(r, w)?;
    let rep = verify_invariants(field, &inv, 1e-10, 1);
    if !rep.pass {
        return Err(unsupported(format!("derived pair ({}, {}) does not verify", inv.r, inv.w)));
    }
    Ok(inv)
}

/// `Σ cᵢ ln(vᵢ)` becomes `Π vᵢ^(cᵢ/c₀)`; anything else is returned as is.
fn normalize_log_sum(r: &Expr) -> Expr {
    let terms = r.terms();
    let logs: Option<Vec<(Number, Expr)>> = terms.iter().map(ln_term).collect();
    match logs {
        Some(l) if !l.is_empty() => {
            let c0 = l[0].0.clone();
            let inv = c0.recip().expect("nonzero log coefficient");
            simplify(&Expr::mul(
                l.into_iter()
                    .map(|(c, v)| Expr::pow(v, Expr::Num(c.mul(&inv))))
                    .collect(),
            ))
        }
        _ => r.clone(),
    }
}
