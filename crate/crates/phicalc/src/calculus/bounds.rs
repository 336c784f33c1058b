//! Lower bounds on index sets, used for the weight tier.
//!
//! A [`Bound`] is an abstraction of an index set by its leading real part:
//! `Gt(r)` stands for every set with all real parts `> r`, and `Ge(r, k)` for
//! sets with real parts `≥ r` and log powers at most `k` at real part `r`.
//! Every operation here over-approximates the exact index-set operation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::extreal::fmt_ext;
use crate::index_algebra::{Face, IndexFamily, IndexSet, EXP_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum Bound {
    Empty,
    Gt(f64),
    Ge { r: f64, k: u32 },
}

impl Bound {
    pub fn ge(r: f64) -> Bound {
        Bound::Ge { r, k: 0 }
    }

    /// The exact bound of a concrete index set.
    pub fn of_set(set: &IndexSet) -> Bound {
        match set.leading() {
            None => Bound::Empty,
            Some((r, k)) => Bound::Ge { r, k },
        }
    }

    pub fn is_empty(self) -> bool {
        self == Bound::Empty
    }

    /// Real part below which no element lies (`+∞` for the empty set).
    pub fn floor(self) -> f64 {
        match self {
            Bound::Empty => f64::INFINITY,
            Bound::Gt(r) | Bound::Ge { r, .. } => r,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Bound) -> Bound {
        match (self, other) {
            (Bound::Empty, _) | (_, Bound::Empty) => Bound::Empty,
            (Bound::Ge { r: a, k }, Bound::Ge { r: b, k: l }) => Bound::Ge { r: a + b, k: k + l },
            (a, b) => Bound::Gt(a.floor() + b.floor()),
        }
    }

    /// Shift by `c`; `c = +∞` yields the empty bound.
    pub fn shift(self, c: f64) -> Bound {
        if c == f64::INFINITY {
            return Bound::Empty;
        }
        match self {
            Bound::Empty => Bound::Empty,
            Bound::Gt(r) => Bound::Gt(r + c),
            Bound::Ge { r, k } => Bound::Ge { r: r + c, k },
        }
    }

    pub fn ext_union(self, other: Bound) -> Bound {
        match (self, other) {
            (Bound::Empty, b) | (b, Bound::Empty) => b,
            (a, b) if a.floor() < b.floor() - EXP_TOL => a,
            (a, b) if b.floor() < a.floor() - EXP_TOL => b,
            (Bound::Gt(r), Bound::Gt(_)) => Bound::Gt(r),
            (Bound::Gt(_), g @ Bound::Ge { .. }) | (g @ Bound::Ge { .. }, Bound::Gt(_)) => g,
            (Bound::Ge { r, k }, Bound::Ge { k: l, .. }) => Bound::Ge { r, k: k + l + 1 },
        }
    }

    /// Weakest bound implied by both (plain union of the sets).
    pub fn join(self, other: Bound) -> Bound {
        match (self, other) {
            (Bound::Empty, b) | (b, Bound::Empty) => b,
            (a, b) if a.floor() < b.floor() - EXP_TOL => a,
            (a, b) if b.floor() < a.floor() - EXP_TOL => b,
            (Bound::Gt(r), Bound::Gt(_)) => Bound::Gt(r),
            (Bound::Gt(_), g @ Bound::Ge { .. }) | (g @ Bound::Ge { .. }, Bound::Gt(_)) => g,
            (Bound::Ge { r, k }, Bound::Ge { k: l, .. }) => Bound::Ge { r, k: k.max(l) },
        }
    }

    /// `I > α` holds for every set described by the bound.
    pub fn gt(self, alpha: f64) -> bool {
        match self {
            Bound::Empty => true,
            Bound::Gt(r) => r >= alpha - EXP_TOL,
            Bound::Ge { r, .. } => r > alpha + EXP_TOL,
        }
    }

    /// `I ≥ α` holds for every set described by the bound.
    pub fn geq(self, alpha: f64) -> bool {
        match self {
            Bound::Empty => true,
            Bound::Gt(r) => r >= alpha - EXP_TOL,
            Bound::Ge { r, k } => r > alpha + EXP_TOL || ((r - alpha).abs() <= EXP_TOL && k == 0),
        }
    }

    /// Every set satisfying `self` also satisfies `other`.
    pub fn implies(self, other: Bound) -> bool {
        match other {
            Bound::Empty => self.is_empty(),
            Bound::Gt(r) => self.gt(r),
            Bound::Ge { r, k } => match self {
                Bound::Empty => true,
                Bound::Gt(s) => s >= r - EXP_TOL,
                Bound::Ge { r: s, k: l } => s > r + EXP_TOL || ((s - r).abs() <= EXP_TOL && l <= k),
            },
        }
    }

    /// The strict bound just above the leading real part.
    pub fn strictly_above(self) -> Bound {
        match self {
            Bound::Empty => Bound::Empty,
            Bound::Gt(r) | Bound::Ge { r, .. } => Bound::Gt(r),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Empty => write!(f, "∅"),
            Bound::Gt(r) => write!(f, ">{}", fmt_ext(*r)),
            Bound::Ge { r, k: 0 } => write!(f, "≥{}", fmt_ext(*r)),
            Bound::Ge { r, k } => write!(f, "≥{} (log^{k})", fmt_ext(*r)),
        }
    }
}

/// Bounds for each face; `ff` is `None` for b-type kernels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaceBounds {
    pub lf: Bound,
    pub rf: Bound,
    pub bf: Bound,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ff: Option<Bound>,
}

impl FaceBounds {
    pub fn b(lf: Bound, rf: Bound, bf: Bound) -> Self {
        FaceBounds { lf, rf, bf, ff: None }
    }

    pub fn phi(lf: Bound, rf: Bound, bf: Bound, ff: Bound) -> Self {
        FaceBounds { lf, rf, bf, ff: Some(ff) }
    }

    pub fn empty_phi() -> Self {
        FaceBounds::phi(Bound::Empty, Bound::Empty, Bound::Empty, Bound::Empty)
    }

    pub fn of_family(fam: &IndexFamily) -> Self {
        FaceBounds {
            lf: Bound::of_set(&fam.lf),
            rf: Bound::of_set(&fam.rf),
            bf: Bound::of_set(&fam.bf),
            ff: fam.ff.as_ref().map(Bound::of_set),
        }
    }

    pub fn get(&self, face: Face) -> Option<Bound> {
        match face {
            Face::Lf => Some(self.lf),
            Face::Rf => Some(self.rf),
            Face::Bf => Some(self.bf),
            Face::Ff => self.ff,
        }
    }

    pub fn set(&mut self, face: Face, b: Bound) {
        match face {
            Face::Lf => self.lf = b,
            Face::Rf => self.rf = b,
            Face::Bf => self.bf = b,
            Face::Ff => {
                if self.ff.is_some() {
                    self.ff = Some(b)
                }
            }
        }
    }

    pub fn swapped(self) -> Self {
        FaceBounds { lf: self.rf, rf: self.lf, ..self }
    }

    /// Left factor `x^c`: shifts `lf`, `bf` and `ff`.
    pub fn left_power(self, c: f64) -> Self {
        FaceBounds {
            lf: self.lf.shift(c),
            bf: self.bf.shift(c),
            ff: self.ff.map(|b| b.shift(c)),
            ..self
        }
    }

    /// Right factor `x^c`: shifts `rf`, `bf` and `ff`.
    pub fn right_power(self, c: f64) -> Self {
        FaceBounds {
            rf: self.rf.shift(c),
            bf: self.bf.shift(c),
            ff: self.ff.map(|b| b.shift(c)),
            ..self
        }
    }

    /// Face-wise implication on the faces of `other`. A missing `ff` on the
    /// left is only accepted against a missing `ff`.
    pub fn implies(&self, other: &FaceBounds) -> bool {
        let ff_ok = match (self.ff, other.ff) {
            (Some(a), Some(b)) => a.implies(b),
            (None, None) => true,
            _ => false,
        };
        self.lf.implies(other.lf) && self.rf.implies(other.rf) && self.bf.implies(other.bf) && ff_ok
    }

    pub fn join(&self, other: &FaceBounds) -> FaceBounds {
        FaceBounds {
            lf: self.lf.join(other.lf),
            rf: self.rf.join(other.rf),
            bf: self.bf.join(other.bf),
            ff: match (self.ff, other.ff) {
                (Some(a), Some(b)) => Some(a.join(b)),
                (a, b) => a.or(b),
            },
        }
    }

    /// The φ-composition formulas evaluated on bounds, with `A = a(b+1)`.
    pub fn compose_phi(i: &FaceBounds, j: &FaceBounds, big_a: f64) -> FaceBounds {
        let iff = i.ff.unwrap_or(Bound::Empty);
        let jff = j.ff.unwrap_or(Bound::Empty);
        let lf = i.lf.ext_union(i.bf.add(j.lf)).ext_union(iff.add(j.lf));
        let rf = j.rf.ext_union(i.rf.add(j.bf)).ext_union(i.rf.add(jff));
        let bf = i
            .lf
            .add(j.rf)
            .ext_union(i.bf.add(j.bf))
            .ext_union(iff.add(j.bf))
            .ext_union(i.bf.add(jff));
        let ff = i
            .lf
            .add(j.rf)
            .shift(big_a)
            .ext_union(i.bf.add(j.bf).shift(big_a))
            .ext_union(iff.add(jff));
        FaceBounds::phi(lf, rf, bf, ff)
    }
}

impl fmt::Display for FaceBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(lf {}, rf {}, bf {}", self.lf, self.rf, self.bf)?;
        if let Some(ff) = self.ff {
            write!(f, ", ff {ff}")?;
        }
        write!(f, ")")
    }
}
