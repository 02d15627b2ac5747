use std::collections::BTreeSet;

use super::{criterion_residual, EvolutionPDE, Mode};
use crate::expr::{clearing_multiplier, expand, Expr, SamplingBox, Verdict};
use crate::jet::{self, VectorField};

/// Minimum number of oracle points for a generator verdict.
pub const MIN_POINTS: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    /// Evolution-mode residual after clearing `multiplier`.
    pub residual: Expr,
    pub multiplier: Expr,
    pub symbolic_zero: bool,
    pub verdict: Option<Verdict>,
    pub pass: bool,
    pub notes: Vec<String>,
}

/// Sampling box for a residual: every symbol other than `x`, `t`, `u` and
/// jet coordinates is a parameter.
pub(crate) fn residual_box(e: &Expr) -> SamplingBox {
    let params: BTreeSet<String> = e
        .symbols()
        .into_iter()
        .filter(|s| !matches!(s.as_str(), "x" | "t" | "u") && jet::parse_jet(s).is_none())
        .collect();
    SamplingBox::with_params(params)
}

/// Check `X^(2) Δ = 0` on the solution manifold: symbolically when the
/// cleared residual simplifies to zero, otherwise by the vanishing oracle at
/// [`MIN_POINTS`] points.
pub fn verify_generator(pde: &EvolutionPDE, field: &VectorField, tol: f64, seed: u64) -> VerificationReport {
    let residual = match criterion_residual(pde, field, Mode::Evolution) {
        Ok(r) => r,
        Err(e) => {
            return VerificationReport {
                residual: Expr::zero(),
                multiplier: Expr::one(),
                symbolic_zero: false,
                verdict: None,
                pass: false,
                notes: vec![e.to_string()],
            }
        }
    };
    let names = jet::jets_in(&residual);
    let vars: Vec<&str> = names.iter().map(String::as_str).collect();
    let multiplier = clearing_multiplier(&residual, &vars);
    let cleared = expand(&(multiplier.clone() * residual));
    if cleared.is_num_zero() {
        return VerificationReport {
            residual: cleared,
            multiplier,
            symbolic_zero: true,
            verdict: None,
            pass: true,
            notes: Vec::new(),
        };
    }
    let mut notes = Vec::new();
    let verdict = match residual_box(&cleared).vanishes(&cleared, MIN_POINTS, tol, seed) {
        Ok(v) => Some(v),
        Err(e) => {
            notes.push(e.to_string());
            None
        }
    };
    let pass = verdict.as_ref().is_some_and(|v| v.equivalent);
    VerificationReport {
        residual: cleared,
        multiplier,
        symbolic_zero: false,
        verdict,
        pass,
        notes,
    }
}
