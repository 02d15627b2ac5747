//! Lie point-symmetry analysis of second-order evolution equations of the form
//! `u_t = (f(x,u) u_x)_x + h(x,u) u_x + k(x,u)`.
//!
//! * [`expr`]: symbolic expressions, simplification, differentiation and a
//!   random-point equivalence oracle.
//! * [`lang`]: text grammar, canonical printer, wire format and problem files.
//! * [`jet`]: jet coordinates, total derivatives and prolongation.
//! * [`determining`]: the symmetry criterion, determining systems, generator
//!   verification and ansatz solving.
//! * [`reduce`]: differential invariants and symmetry reduction to ODEs.

pub mod determining;
pub mod expr;
pub mod jet;
pub mod lang;
pub mod reduce;

pub use expr::{Assignment, Expr, FnSym, Number};
pub use jet::{JetContext, VectorField};
