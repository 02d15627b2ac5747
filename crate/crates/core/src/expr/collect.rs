//! Coefficient collection over a set of polynomial variables.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::simplify::{add, mul, pow};
use super::{expand, Expr, Number};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("expression is not polynomial in {var}: offending factor `{factor}`")]
pub struct NotPolynomialInVars {
    pub var: String,
    pub factor: String,
}

/// A monomial in the collection variables: variable name -> exponent.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub BTreeMap<String, u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn exponent(&self, var: &str) -> u32 {
        self.0.get(var).copied().unwrap_or(0)
    }

    pub fn to_expr(&self) -> Expr {
        mul(self
            .0
            .iter()
            .map(|(v, &n)| pow(Expr::sym(v), Expr::int(n as i64)))
            .collect())
    }

    /// Build from `(var, exponent)` pairs; zero exponents are dropped.
    pub fn from_pairs(pairs: &[(&str, u32)]) -> Self {
        let mut m = BTreeMap::new();
        for &(v, n) in pairs {
            if n > 0 {
                *m.entry(v.to_string()).or_insert(0) += n;
            }
        }
        Monomial(m)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, &n)| if n == 1 { v.clone() } else { format!("{}^{}", v, n) })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

/// Collect `e` as a polynomial in `vars`.
///
/// Returns pairwise distinct monomials with nonzero coefficients free of
/// `vars`, ordered by total degree and then monomial. `e` equals the sum of
/// `monomial * coefficient` exactly.
pub fn collect(e: &Expr, vars: &[&str]) -> Result<Vec<(Monomial, Expr)>, NotPolynomialInVars> {
    let ex = expand(e);
    let mut groups: BTreeMap<Monomial, Vec<Expr>> = BTreeMap::new();
    for term in ex.terms() {
        let mut mono = BTreeMap::new();
        let mut coef = Vec::new();
        for f in term.factors() {
            match monomial_factor(&f, vars) {
                Some(Ok((v, n))) => *mono.entry(v).or_insert(0) += n,
                Some(Err(v)) => {
                    return Err(NotPolynomialInVars { var: v, factor: f.to_string() });
                }
                None => {
                    if let Some(v) = vars.iter().find(|v| f.depends_on(v)) {
                        return Err(NotPolynomialInVars {
                            var: v.to_string(),
                            factor: f.to_string(),
                        });
                    }
                    coef.push(f);
                }
            }
        }
        groups.entry(Monomial(mono)).or_default().push(mul(coef));
    }
    let mut out: Vec<(Monomial, Expr)> = groups
        .into_iter()
        .map(|(m, cs)| (m, add(cs)))
        .filter(|(_, c)| !c.is_num_zero())
        .collect();
    out.sort_by(|a, b| a.0.degree().cmp(&b.0.degree()).then_with(|| a.0.cmp(&b.0)));
    Ok(out)
}

/// `Some(Ok((var, n)))` for `var` or `var^n` with `n` a positive integer,
/// `Some(Err(var))` for any other power of a variable, `None` otherwise.
fn monomial_factor(f: &Expr, vars: &[&str]) -> Option<Result<(String, u32), String>> {
    match f {
        Expr::Sym(s) if vars.contains(&s.as_str()) => Some(Ok((s.clone(), 1))),
        Expr::Pow(b, x) => match b.as_ref() {
            Expr::Sym(s) if vars.contains(&s.as_str()) => {
                match x.as_num().and_then(Number::as_i64) {
                    Some(n) if n > 0 => Some(Ok((s.clone(), n as u32))),
                    _ => Some(Err(s.clone())),
                }
            }
            _ => None,
        },
        _ => None,
    }
}

/// Least common denominator of the expanded form of `e`: the product of every
/// base appearing with a negative numeric exponent, raised to the largest such
/// exponent magnitude. Bases depending on any name in `exclude` are skipped.
pub fn clearing_multiplier(e: &Expr, exclude: &[&str]) -> Expr {
    let ex = expand(e);
    let mut worst: BTreeMap<Expr, Number> = BTreeMap::new();
    for term in ex.terms() {
        for f in term.factors() {
            if let Expr::Pow(b, x) = &f {
                if let Expr::Num(n) = x.as_ref() {
                    if n.is_negative() && !exclude.iter().any(|v| b.depends_on(v)) {
                        let mag = n.abs();
                        let slot = worst.entry(b.as_ref().clone()).or_insert_with(Number::zero);
                        if mag > *slot {
                            *slot = mag;
                        }
                    }
                }
            }
        }
    }
    mul(worst.into_iter().map(|(b, n)| pow(b, Expr::Num(n))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{is_zero, simplify};

    #[test]
    fn table_rows_example() {
        let eta_u = crate::expr::diff(&Expr::func("eta", &["x", "t", "u"]), "u");
        let eta_x = crate::expr::diff(&Expr::func("eta", &["x", "t", "u"]), "x");
        let f = Expr::func("f", &["x", "u"]);
        let e = eta_u.clone() * Expr::powi(Expr::sym("u_t"), 2)
            + 2 * f.clone() * eta_x.clone() * Expr::sym("u_x") * Expr::sym("u_xt");
        let rows = collect(&e, &["u_t", "u_x", "u_xt"]).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].0, Monomial::from_pairs(&[("u_t", 2)]));
        assert_eq!(rows[0].1, eta_u);
        assert_eq!(rows[1].0, Monomial::from_pairs(&[("u_x", 1), ("u_xt", 1)]));
        assert_eq!(rows[1].1, simplify(&(2 * f * eta_x)));
    }

    #[test]
    fn zero_collects_to_nothing() {
        assert!(collect(&Expr::zero(), &["u_x"]).unwrap().is_empty());
    }

    #[test]
    fn non_polynomial_rejected() {
        let e = Expr::exp(Expr::sym("u_x"));
        assert!(collect(&e, &["u_x"]).is_err());
        let e = Expr::powi(Expr::sym("u_x"), -1);
        assert!(collect(&e, &["u_x"]).is_err());
    }

    #[test]
    fn reconstruction() {
        let ux = Expr::sym("u_x");
        let e = (ux.clone() + Expr::sym("a")) * (ux.clone() * Expr::sym("x") - 3);
        let rows = collect(&e, &["u_x"]).unwrap();
        let back = Expr::add(rows.iter().map(|(m, c)| m.to_expr() * c.clone()).collect());
        assert!(is_zero(&(back - e)));
    }

    #[test]
    fn clearing() {
        let u = Expr::sym("u");
        let e = Expr::sym("b") * Expr::sym("x") / u.clone() * Expr::sym("u_x")
            + Expr::powi(u.clone(), -2);
        assert_eq!(clearing_multiplier(&e, &["u_x"]), Expr::powi(u, 2));
    }
}
