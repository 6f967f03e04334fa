//! Exact symbolic and numerical toolkit for the Painlevé families P_I–P_VI.
//!
//! The crate is organized in layers:
//!
//! - [`algebra`]: exact multivariate rational-function arithmetic over the
//!   rationals, with derivations whose generator images are assignable.
//! - [`parser`]: the textual expression language used by the CLI and fixtures.
//! - [`systems`]: the six Painlevé equations, the Hamiltonian systems
//!   S_II, S_III′ and S_VI, residual checks and parameter-coordinate
//!   conversions.
//! - [`backlund`]: the Bäcklund generators s₀…s₄ on parameters and
//!   solutions, Weyl words, translation operators and the reflecting
//!   hyperplane set ℳ.
//! - [`classify`]: existence/count of algebraic solutions per family, strong
//!   minimality of S_VI, the Boalch coset and genericity reports.
//! - [`numeric`]: adaptive Runge–Kutta integration, Taylor-series seeds,
//!   pointwise numerical Bäcklund checks and algebraic-relation detection.

pub mod algebra;
pub mod backlund;
pub mod classify;
pub mod error;
pub mod numeric;
pub mod parser;
pub mod systems;

pub use algebra::{Context, Derivation, Polynomial, Rat, RationalFunction, VarId, VarKind};
pub use error::Error;
pub use systems::{Equation, FamilyId, HamiltonianSystem, ParamTuple, SecondOrderODE};
