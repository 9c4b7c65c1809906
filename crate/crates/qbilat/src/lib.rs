//! Dual-backend evaluation and verification of bilateral q-series
//! summation formulae: a high-precision numeric kernel (complex arithmetic,
//! gamma, classical bilateral sums, q-products, theta functions, bilateral
//! basic hypergeometric series) and an exact formal-series backend over
//! rational Laurent series in p = q^{1/2}, joined by a machine-checkable
//! identity catalog, a randomized scan driver, and a q -> 1-0 limit study.

pub mod algebra;
pub mod catalog;
pub mod classical;
pub mod complex;
pub mod error;
pub mod exprs;
pub mod formal;
pub mod gamma;
pub mod identity;
pub mod limits;
pub mod precision;
pub mod psi;
pub mod qseries;
pub mod scan;
pub mod theta;
pub mod value;

pub use complex::{cpow_principal, ComplexHP};
pub use error::{Error, Result};
pub use identity::{IdentityId, Side};
pub use precision::PrecisionContext;
pub use qseries::QBase;
pub use value::Eval;
