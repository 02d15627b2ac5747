//! The symmetry criterion for evolution equations `u_t = rhs`.
//!
//! [`EvolutionPDE`] holds the equation. [`criterion_residual`] applies the
//! second prolongation of a vector field to `Δ = u_t − rhs`, either as is
//! ([`Mode::Free`]) or restricted to the solution manifold
//! ([`Mode::Evolution`]). [`extract_system`] splits a residual into
//! determining equations, [`structural_reduce`] runs the standard deduction
//! chain on the symbolic system, [`verify_generator`] checks a concrete
//! field and [`solve_ansatz`] finds all symmetries spanned by finite bases.

mod ansatz;
mod pde;
mod residual;
mod structural;
mod system;
mod verify;

use thiserror::Error;

use crate::expr::{NotPolynomialInVars, OracleError};
use crate::jet::JetError;

pub use ansatz::{solve_ansatz, AnsatzOptions, AnsatzSolution};
pub use pde::{build_evolution, build_grdc, Assumptions, EvolutionPDE, Provenance};
pub use residual::{criterion_residual, Mode};
pub use structural::{structural_reduce, Fact, StructuralReduction};
pub use system::{extract_system, DeterminingSystem};
pub use verify::{verify_generator, VerificationReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeterminingError {
    #[error("`{component}` may not depend on `{symbol}`")]
    IllegalDependence { component: String, symbol: String },
    #[error("residual order leak: `{coord}` survives restriction to the solution manifold")]
    ResidualOrderLeak { coord: String },
    #[error(transparent)]
    NotPolynomial(#[from] NotPolynomialInVars),
    #[error("assumption missing: `{0} != 0` must be declared (or `{0} == 0`)")]
    AssumptionMissing(String),
    #[error("rank-deficient sampling: nullspace did not verify after {attempts} attempts")]
    RankDeficientSampling { attempts: usize },
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}
