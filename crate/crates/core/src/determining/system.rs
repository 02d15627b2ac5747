use super::{DeterminingError, Mode};
use crate::expr::{clearing_multiplier, collect, expand, Expr, Monomial};
use crate::jet;

/// Determining equations: each coefficient must vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct DeterminingSystem {
    pub rows: Vec<(Monomial, Expr)>,
    /// The residual was multiplied by this before collection.
    pub multiplier: Expr,
    pub mode: Mode,
}

impl DeterminingSystem {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Option<&Expr> {
        self.rows.iter().find(|(n, _)| n == m).map(|(_, c)| c)
    }

    /// `Σ monomial · coefficient`.
    pub fn reconstruct(&self) -> Expr {
        Expr::add(self.rows.iter().map(|(m, c)| m.to_expr() * c.clone()).collect())
    }
}

/// Collect `residual` over the jet coordinates it contains, after clearing
/// denominators that do not involve jet coordinates.
pub fn extract_system(residual: &Expr, mode: Mode) -> Result<DeterminingSystem, DeterminingError> {
    let names = jet::jets_in(residual);
    let vars: Vec<&str> = names.iter().map(String::as_str).collect();
    let multiplier = clearing_multiplier(residual, &vars);
    let cleared = expand(&(multiplier.clone() * residual.clone()));
    let rows = collect(&cleared, &vars)?;
    Ok(DeterminingSystem { rows, multiplier, mode })
}
