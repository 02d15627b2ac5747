//! Differential invariants and symmetry reduction.
//!
//! An [`InvariantPair`] `(r, w)` with `r` free of `u` and `w = A u + B`
//! turns the ansatz `w = W(r)` into an ODE for `W` ([`reduce`]). Autonomous
//! second-order ODEs drop to first order with [`autonomous_reduce`], and
//! separable first-order ODEs are solved by formal quadrature with
//! [`separable_solve`].

mod autonomous;
mod characteristics;
mod invariants;
mod quadrature;
mod reduction;

use thiserror::Error;

use crate::expr::{Assignment, OracleError};

pub use autonomous::autonomous_reduce;
pub use characteristics::{characteristics_solve, integrate};
pub use invariants::{verify_invariants, InvariantPair, InvariantReport};
pub use quadrature::{adaptive_simpson, separable_solve, Quadrature};
pub use reduction::{compare_reduced, ode_jet, reduce, Certification, ChangeOfVariables, ReducedODE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReduceError {
    #[error("unsupported invariant form: {0}")]
    UnsupportedInvariantForm(String),
    #[error("unsupported field structure: {0}")]
    UnsupportedFieldStructure(String),
    #[error("not self-similar: the reduced residual changes from {first:?} to {second:?} at equal r ({detail})")]
    NotSelfSimilar {
        first: Assignment,
        second: Assignment,
        detail: String,
    },
    #[error("multiplier identity failed at {witness:?}: {detail}")]
    Unsound { witness: Assignment, detail: String },
    #[error("not autonomous: {0}")]
    NotAutonomous(String),
    #[error("not separable: {0}")]
    NotSeparable(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}
