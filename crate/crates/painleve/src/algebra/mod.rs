//! Exact arithmetic for multivariate polynomials and rational functions over
//! the rationals.
//!
//! Coefficients are arbitrary-precision rationals; "generic" complex
//! parameters are modeled as fresh transcendental indeterminates adjoined to
//! the coefficient field, so genericity hypotheses become decidable by
//! canonical-form arithmetic. All values are immutable after construction and
//! all operations are pure.

mod context;
mod derivation;
mod gcd;
mod poly;
pub mod rat;
mod ratfun;

pub use context::{Context, VarId, VarKind};
pub use derivation::Derivation;
pub use gcd::poly_gcd;
pub use poly::{Monomial, Polynomial};
pub use rat::Rat;
pub use ratfun::RationalFunction;
