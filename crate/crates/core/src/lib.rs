//! Lagrangian minimizing-movement scheme for `∂ₜu = P(u)ₓₓ + (Vₓu)ₓ` on an
//! interval with no-flux boundaries.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod datum;
pub mod diagnostics;
pub mod energy;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod io;
pub mod model;
pub mod quadrature;
pub mod registry;
pub mod stepper;
pub mod tridiag;

pub use error::{Error, Result};
