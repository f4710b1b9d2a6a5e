//! Exact graded deformation calculus on symplectic R^m.
//!
//! The scalar ring is Q[eps^{+-1}, e_1..e_g, t, dt] tensored with polynomials in x.
//! Polyvectors, exterior forms and polydifferential operators are built on it, together
//! with Maurer-Cartan checks, gauge actions and the coderivation exp(Pi).

pub mod cli;
pub mod coderivations;
pub mod deformation;
pub mod dsl;
pub mod error;
pub mod fixtures;
pub mod forms;
pub mod grassmann;
pub mod polydiff;
pub mod polyvectors;
pub mod random;
pub mod scalars;

pub use error::{Error, Result};
pub use scalars::{BaseSeries, Ctx, Poly, TruncationCtx, Q};
