//! Jet coordinates, total derivatives, characteristics and prolongation.
//!
//! The base space is `(x, t, u)`. A jet coordinate `u_J` is named by its
//! multi-index written with all `x` letters before all `t` letters, so the
//! mixed second derivative is always `u_xt`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::expr::{diff, expand, simplify, Expr};

pub const X: &str = "x";
pub const T: &str = "t";
pub const U: &str = "u";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("derivative order overflow: differentiating `{coord}` exceeds order {max}")]
    OrderOverflow { coord: String, max: u32 },
}

/// Derivative multi-index `(number of x, number of t)`.
pub type MultiIndex = (u32, u32);

/// Name of the jet coordinate for `J`; `u` itself for `(0, 0)`.
pub fn jet_name(j: MultiIndex) -> String {
    if j == (0, 0) {
        return U.to_string();
    }
    let mut s = String::from("u_");
    s.extend(std::iter::repeat_n('x', j.0 as usize));
    s.extend(std::iter::repeat_n('t', j.1 as usize));
    s
}

pub fn jet(j: MultiIndex) -> Expr {
    Expr::sym(&jet_name(j))
}

/// Inverse of [`jet_name`] for coordinates of order at least one.
pub fn parse_jet(name: &str) -> Option<MultiIndex> {
    let rest = name.strip_prefix("u_")?;
    if rest.is_empty() {
        return None;
    }
    let nx = rest.chars().take_while(|&c| c == 'x').count();
    let tail = &rest[nx..];
    if !tail.chars().all(|c| c == 't') {
        return None;
    }
    Some((nx as u32, tail.len() as u32))
}

/// Every multi-index with `1 <= |J| <= max`, by order then x-count descending.
pub fn multi_indices(max: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for n in 1..=max {
        for nt in 0..=n {
            out.push((n - nt, nt));
        }
    }
    out
}

/// Names of every jet coordinate of order `1..=max`.
pub fn all_jet_names(max: u32) -> Vec<String> {
    multi_indices(max).into_iter().map(jet_name).collect()
}

/// Jet coordinates (order ≥ 1) occurring in `e`.
pub fn jets_in(e: &Expr) -> Vec<String> {
    e.symbols().into_iter().filter(|s| parse_jet(s).is_some()).collect()
}

/// Highest derivative order present in `e` (0 when free of jets).
pub fn order_of(e: &Expr) -> u32 {
    jets_in(e)
        .iter()
        .filter_map(|s| parse_jet(s))
        .map(|(a, b)| a + b)
        .max()
        .unwrap_or(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JetContext {
    pub max_order: u32,
}

impl Default for JetContext {
    fn default() -> Self {
        JetContext { max_order: 3 }
    }
}

impl JetContext {
    pub fn new(max_order: u32) -> Self {
        JetContext { max_order }
    }

    /// Total derivative `D_v e` for `v` in `{x, t}`.
    pub fn total_d(&self, e: &Expr, v: &str) -> Result<Expr, JetError> {
        let step: MultiIndex = if v == X { (1, 0) } else { (0, 1) };
        let mut terms = vec![diff(e, v)];
        let mut coords: Vec<MultiIndex> = jets_in(e).iter().filter_map(|s| parse_jet(s)).collect();
        if e.depends_on(U) {
            coords.push((0, 0));
        }
        for j in coords {
            let de = diff(e, &jet_name(j));
            if de.is_num_zero() {
                continue;
            }
            let next = (j.0 + step.0, j.1 + step.1);
            if next.0 + next.1 > self.max_order {
                return Err(JetError::OrderOverflow {
                    coord: jet_name(j),
                    max: self.max_order,
                });
            }
            terms.push(jet(next) * de);
        }
        Ok(simplify(&Expr::add(terms)))
    }

    /// `D_J e`, x-derivatives first.
    pub fn total_d_multi(&self, e: &Expr, j: MultiIndex) -> Result<Expr, JetError> {
        let mut out = e.clone();
        for _ in 0..j.0 {
            out = self.total_d(&out, X)?;
        }
        for _ in 0..j.1 {
            out = self.total_d(&out, T)?;
        }
        Ok(out)
    }

    /// Prolongation coefficient `φ^J = D_J Q + ξ u_{J+x} + η u_{J+t}`.
    pub fn prolong_coeff(&self, field: &VectorField, j: MultiIndex) -> Result<Expr, JetError> {
        if j == (0, 0) {
            return Ok(field.phi.clone());
        }
        if j.0 + j.1 + 1 > self.max_order {
            return Err(JetError::OrderOverflow {
                coord: jet_name(j),
                max: self.max_order,
            });
        }
        let q = field.characteristic();
        let djq = self.total_d_multi(&q, j)?;
        let e = djq + field.xi.clone() * jet((j.0 + 1, j.1)) + field.eta.clone() * jet((j.0, j.1 + 1));
        Ok(expand(&e))
    }

    /// Prolongation coefficient by the recursive formula
    /// `φ^{J+v} = D_v φ^J − (D_v ξ) u_{J+x} − (D_v η) u_{J+t}`.
    pub fn prolong_coeff_recursive(&self, field: &VectorField, j: MultiIndex) -> Result<Expr, JetError> {
        if j == (0, 0) {
            return Ok(field.phi.clone());
        }
        let (prev, v) = if j.1 > 0 { ((j.0, j.1 - 1), T) } else { ((j.0 - 1, j.1), X) };
        let p = self.prolong_coeff_recursive(field, prev)?;
        let e = self.total_d(&p, v)?
            - self.total_d(&field.xi, v)? * jet((prev.0 + 1, prev.1))
            - self.total_d(&field.eta, v)? * jet((prev.0, prev.1 + 1));
        Ok(expand(&e))
    }

    /// The full second prolongation `X^(2)` applied to `e`.
    pub fn apply_prolonged(&self, field: &VectorField, e: &Expr) -> Result<Expr, JetError> {
        let mut terms = vec![
            field.xi.clone() * diff(e, X),
            field.eta.clone() * diff(e, T),
            field.phi.clone() * diff(e, U),
        ];
        for name in jets_in(e) {
            let j = parse_jet(&name).unwrap();
            if j.0 + j.1 > 2 {
                return Err(JetError::OrderOverflow {
                    coord: name,
                    max: 2,
                });
            }
            let de = diff(e, &name);
            if !de.is_num_zero() {
                terms.push(self.prolong_coeff(field, j)? * de);
            }
        }
        Ok(expand(&Expr::add(terms)))
    }
}

/// Infinitesimal generator `ξ∂x + η∂t + φ∂u`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VectorField {
    pub xi: Expr,
    pub eta: Expr,
    pub phi: Expr,
}

impl VectorField {
    pub fn new(xi: Expr, eta: Expr, phi: Expr) -> Self {
        VectorField { xi, eta, phi }
    }

    pub fn zero() -> Self {
        VectorField::new(Expr::zero(), Expr::zero(), Expr::zero())
    }

    /// `∂t`.
    pub fn dt() -> Self {
        VectorField::new(Expr::zero(), Expr::one(), Expr::zero())
    }

    /// `∂x`.
    pub fn dx() -> Self {
        VectorField::new(Expr::one(), Expr::zero(), Expr::zero())
    }

    /// General field with unknown component functions `xi`, `eta`, `phi` of `(x, t, u)`.
    pub fn general() -> Self {
        let s = ["x", "t", "u"];
        VectorField::new(Expr::func("xi", &s), Expr::func("eta", &s), Expr::func("phi", &s))
    }

    /// `Q = φ − ξ u_x − η u_t`.
    pub fn characteristic(&self) -> Expr {
        simplify(&(self.phi.clone() - self.xi.clone() * jet((1, 0)) - self.eta.clone() * jet((0, 1))))
    }

    pub fn components(&self) -> [&Expr; 3] {
        [&self.xi, &self.eta, &self.phi]
    }

    pub fn map(&self, mut f: impl FnMut(&Expr) -> Expr) -> VectorField {
        VectorField::new(f(&self.xi), f(&self.eta), f(&self.phi))
    }

    pub fn simplified(&self) -> VectorField {
        self.map(simplify)
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        VectorField::new(
            simplify(&(self.xi.clone() + other.xi.clone())),
            simplify(&(self.eta.clone() + other.eta.clone())),
            simplify(&(self.phi.clone() + other.phi.clone())),
        )
    }

    pub fn scale(&self, c: &Expr) -> VectorField {
        self.map(|e| simplify(&(c.clone() * e.clone())))
    }

    /// `X(F) = ξ F_x + η F_t + φ F_u` for a function on the base space.
    pub fn apply(&self, e: &Expr) -> Expr {
        simplify(&(self.xi.clone() * diff(e, X) + self.eta.clone() * diff(e, T) + self.phi.clone() * diff(e, U)))
    }

    pub fn is_zero(&self) -> bool {
        self.components().iter().all(|c| crate::expr::is_zero(c))
    }

    /// Human-readable `ξ∂x + η∂t + φ∂u` form, omitting zero components.
    pub fn display(&self) -> String {
        let mut parts = Vec::new();
        for (c, d) in [(&self.xi, "d_x"), (&self.eta, "d_t"), (&self.phi, "d_u")] {
            let c = simplify(c);
            if c.is_num_zero() {
                continue;
            }
            if c.is_num_one() {
                parts.push(d.to_string());
            } else if matches!(c, Expr::Add(_)) {
                parts.push(format!("({})*{}", c, d));
            } else {
                parts.push(format!("{}*{}", c, d));
            }
        }
        let mut out = String::new();
        for (i, part) in parts.iter().enumerate() {
            match (i, part.strip_prefix('-')) {
                (0, _) => out.push_str(part),
                (_, Some(rest)) => {
                    out.push_str(" - ");
                    out.push_str(rest);
                }
                (_, None) => {
                    out.push_str(" + ");
                    out.push_str(part);
                }
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    /// Text form of each component.
    pub fn to_strings(&self) -> BTreeMap<&'static str, String> {
        [("xi", &self.xi), ("eta", &self.eta), ("phi", &self.phi)]
            .into_iter()
            .map(|(k, v)| (k, simplify(v).to_string()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{equiv_oracle, is_zero};
    use crate::lang::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn names() {
        assert_eq!(jet_name((1, 1)), "u_xt");
        assert_eq!(jet_name((0, 2)), "u_tt");
        assert_eq!(parse_jet("u_xxt"), Some((2, 1)));
        assert_eq!(parse_jet("u_tx"), None);
        assert_eq!(all_jet_names(2), vec!["u_x", "u_t", "u_xx", "u_xt", "u_tt"]);
    }

    #[test]
    fn total_derivatives() {
        let ctx = JetContext::default();
        assert_eq!(ctx.total_d(&p("u"), "x").unwrap(), p("u_x"));
        let df = ctx.total_d(&p("f"), "x").unwrap();
        assert!(is_zero(&(df - p("f_x + f_u*u_x"))));
        let ddf = ctx.total_d(&p("f_x + f_u*u_x"), "x").unwrap();
        assert!(is_zero(&(ddf - p("f_xx + 2*f_xu*u_x + f_uu*u_x^2 + f_u*u_xx"))));
    }

    #[test]
    fn overflow() {
        let ctx = JetContext::default();
        assert!(matches!(
            ctx.total_d(&p("u_xxt"), "x"),
            Err(JetError::OrderOverflow { .. })
        ));
    }

    #[test]
    fn characteristics() {
        assert_eq!(VectorField::dx().characteristic(), -p("u_x"));
        assert_eq!(VectorField::new(p("0"), p("0"), p("u")).characteristic(), p("u"));
        let x1 = VectorField::new(p("0"), p("exp(a*t)"), p("a*exp(a*t)"));
        assert!(is_zero(&(x1.characteristic() - p("a*exp(a*t) - exp(a*t)*u_t"))));
    }

    #[test]
    fn simple_prolongations() {
        let ctx = JetContext::default();
        let dx = VectorField::dx();
        assert!(ctx.prolong_coeff(&dx, (1, 0)).unwrap().is_num_zero());
        assert!(ctx.prolong_coeff(&dx, (2, 0)).unwrap().is_num_zero());
        let scale = VectorField::new(p("0"), p("0"), p("u"));
        assert_eq!(ctx.prolong_coeff(&scale, (1, 0)).unwrap(), p("u_x"));
        assert_eq!(ctx.prolong_coeff(&scale, (2, 0)).unwrap(), p("u_xx"));
    }

    #[test]
    fn apply() {
        let ctx = JetContext::default();
        assert!(ctx.apply_prolonged(&VectorField::dt(), &p("u_t")).unwrap().is_num_zero());
        let scale = VectorField::new(p("0"), p("0"), p("u"));
        let r = ctx.apply_prolonged(&scale, &p("u*u_x")).unwrap();
        assert!(is_zero(&(r - p("2*u*u_x"))));
    }

    #[test]
    fn characteristic_and_recursive_agree_for_general_field() {
        let ctx = JetContext::default();
        let g = VectorField::general();
        for j in multi_indices(2) {
            let a = ctx.prolong_coeff(&g, j).unwrap();
            let b = ctx.prolong_coeff_recursive(&g, j).unwrap();
            assert!(is_zero(&(a.clone() - b.clone())), "J = {:?}", j);
            assert!(equiv_oracle(&a, &b, 20, 1e-10, 3).unwrap().equivalent);
        }
    }
}
