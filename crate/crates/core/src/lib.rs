//! Pell equations, class numbers of indefinite forms, and integer points on
//! the Pellian surface `t^2 - d u^2 = 1`.
//!
//! Modules:
//! - [`arith`]: Jacobi symbols, integer roots, factorization, square-free parts.
//! - [`pell`]: continued fractions of `sqrt(d)` and fundamental units.
//! - [`forms`]: reduced forms, class numbers, `L_d(1)` with certified error.
//! - [`counting`]: counting functions for points of bounded height.
//! - [`surface`]: the log K3 model, `A^1`-curves and intersection data.

pub mod arith;
pub mod counting;
pub mod error;
pub mod forms;
pub mod pell;
pub mod poly;
pub mod report;
pub mod surface;
pub mod sweep;

pub use error::{Error, Result};
pub use forms::{ClassNumberReport, Convention, IndefiniteForm, LValue};
pub use pell::{CfExpansion, PellSolution};
pub use poly::Poly;
