//! Symbolic operator classes of the b- and φ-calculi.
//!
//! Classes carry either a full index family (propagated exactly where closed
//! formulas exist) or a weight, which is folded into face-wise [`bounds`]
//! when needed. Sums of classes are plain `Vec<OpClass>`; a predicate holds
//! for a sum iff it holds for each summand.

pub mod bounds;
pub mod class;
pub mod compose;
pub mod containment;
pub mod predicates;

use serde::{Deserialize, Serialize};

use crate::error::{PhiError, Result};

pub use bounds::{Bound, FaceBounds};
pub use class::{Base, Kind, OpClass, Projector, Side, Spec, SumDisplay};
pub use compose::{apply_rule, compose, compose_alternatives, Composite, Derivation, Rule};
pub use containment::{contained_in, sum_contained_in};
pub use predicates::{
    decompose_near_ff, is_bounded, is_compact, lift_b_to_phi, map_phg, LiftResult, RegularityKind,
    SobolevSpaceSpec,
};

/// Constants of the fibration: degeneracy order `a` and base dimension `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub a: u32,
    pub b_dim: u32,
}

impl Geometry {
    pub fn new(a: u32, b_dim: u32) -> Result<Self> {
        if a == 0 {
            return Err(PhiError::InvalidInput("degeneracy order a must be positive".into()));
        }
        Ok(Geometry { a, b_dim })
    }

    /// The front-face shift `A = a(b+1)`.
    pub fn big_a(&self) -> f64 {
        f64::from(self.a * (self.b_dim + 1))
    }
}
