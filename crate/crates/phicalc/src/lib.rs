//! Bookkeeping for b- and φ-pseudodifferential operators on fibred-cusp
//! manifolds, together with numerical checks on flat product models.
//!
//! * [`index_algebra`]: polyhomogeneous index sets and index families.
//! * [`calculus`]: symbolic operator classes, composition, lifting, adjoints
//!   and mapping predicates.
//! * [`split`]: the five-step parametrix construction for Π-split operators,
//!   Fredholm gates and regularity predictions.
//! * [`model`]: indicial roots, normal-family gaps and harmonic decay on
//!   torus-bundle models.
//! * [`cli`]: the `phicalc` command-line front end.

pub mod calculus;
pub mod cli;
pub mod error;
pub mod extreal;
pub mod index_algebra;
pub mod json;
pub mod model;
pub mod split;

pub use error::{PhiError, Result};
