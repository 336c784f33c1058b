use std::fmt;

use serde::{Deserialize, Serialize};

use super::bounds::{Bound, FaceBounds};
use crate::error::{PhiError, Result};
use crate::extreal::{self, fmt_ext};
use crate::index_algebra::{Face, FamilyKind, IndexFamily, IndexSet};

/// Calculus a class lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    B,
    BExt,
    Phi,
    PhiExt,
    Bphi,
    BphiExt,
    SusPhi,
    Zero,
}

/// Underlying double space of a kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Base {
    B,
    Phi,
    Sus,
    Zero,
}

impl Kind {
    pub fn base(self) -> Base {
        match self {
            Kind::B | Kind::BExt => Base::B,
            Kind::Phi | Kind::PhiExt | Kind::Bphi | Kind::BphiExt => Base::Phi,
            Kind::SusPhi => Base::Sus,
            Kind::Zero => Base::Zero,
        }
    }

    pub fn is_ext(self) -> bool {
        matches!(self, Kind::BExt | Kind::PhiExt | Kind::BphiExt)
    }

    pub fn is_bphi(self) -> bool {
        matches!(self, Kind::Bphi | Kind::BphiExt)
    }

    pub fn with_ext(self, ext: bool) -> Kind {
        match (self, ext) {
            (Kind::B | Kind::BExt, e) => if e { Kind::BExt } else { Kind::B },
            (Kind::Phi | Kind::PhiExt, e) => if e { Kind::PhiExt } else { Kind::Phi },
            (Kind::Bphi | Kind::BphiExt, e) => if e { Kind::BphiExt } else { Kind::Bphi },
            (k, _) => k,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Kind::B => "Ψ_b",
            Kind::BExt => "Ψ_b,ext",
            Kind::Phi => "Ψ_φ",
            Kind::PhiExt => "Ψ_φ,ext",
            Kind::Bphi => "Ψ_bφ",
            Kind::BphiExt => "Ψ_bφ,ext",
            Kind::SusPhi => "Ψ_sus-φ",
            Kind::Zero => "0",
        }
    }
}

/// How the boundary behaviour of a class is described.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spec {
    /// `lf > α`, `rf > −α`, `bf ≥ 0` and, for φ-kinds, `ff > 0`.
    Weight(f64),
    /// The small calculus: `(∅, ∅, 0)` for b, `(∅, ∅, ∅, 0)` for φ.
    Small,
    /// A full index family.
    Family(IndexFamily),
    /// Face-wise bounds (the weight tier in its general form).
    Bounds(FaceBounds),
    /// No boundary data (zero, bφ and suspended classes).
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// A decoration `(x^pi Π + x^perp Π⊥)` on one side of a class.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Projector {
    pub side: Side,
    #[serde(with = "extreal")]
    pub pi: f64,
    #[serde(with = "extreal")]
    pub perp: f64,
}

/// A symbolic operator class `x^xl · Ψ · x^xr`, possibly decorated by a projector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OpClassRaw", into = "OpClassRaw")]
pub struct OpClass {
    pub kind: Kind,
    pub order: f64,
    pub spec: Spec,
    pub xl: f64,
    pub xr: f64,
    pub vanish: Vec<Face>,
    pub proj: Option<Projector>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OpClassRaw {
    kind: Kind,
    #[serde(with = "extreal")]
    order: f64,
    spec: Spec,
    #[serde(with = "extreal", default)]
    xl: f64,
    #[serde(with = "extreal", default)]
    xr: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    vanish: Vec<Face>,
    #[serde(default)]
    proj: Option<Projector>,
}

impl TryFrom<OpClassRaw> for OpClass {
    type Error = PhiError;
    fn try_from(r: OpClassRaw) -> Result<Self> {
        let c = OpClass {
            kind: r.kind,
            order: r.order,
            spec: r.spec,
            xl: r.xl,
            xr: r.xr,
            vanish: r.vanish,
            proj: r.proj,
        };
        c.validate()?;
        Ok(c.normalized())
    }
}

impl From<OpClass> for OpClassRaw {
    fn from(c: OpClass) -> Self {
        OpClassRaw {
            kind: c.kind,
            order: c.order,
            spec: c.spec,
            xl: c.xl,
            xr: c.xr,
            vanish: c.vanish,
            proj: c.proj,
        }
    }
}

impl OpClass {
    pub fn new(kind: Kind, order: f64, spec: Spec) -> Self {
        OpClass { kind, order, spec, xl: 0.0, xr: 0.0, vanish: Vec::new(), proj: None }.normalized()
    }

    pub fn zero() -> Self {
        OpClass::new(Kind::Zero, f64::NEG_INFINITY, Spec::None)
    }

    pub fn weight(kind: Kind, order: f64, alpha: f64) -> Self {
        OpClass::new(kind, order, Spec::Weight(alpha))
    }

    pub fn small(kind: Kind, order: f64) -> Self {
        OpClass::new(kind, order, Spec::Small)
    }

    pub fn bphi(ext: bool, order: f64) -> Self {
        OpClass::new(Kind::Bphi.with_ext(ext), order, Spec::None)
    }

    pub fn with_left(mut self, c: f64) -> Self {
        self.xl = add_power(self.xl, c);
        self
    }

    pub fn with_right(mut self, c: f64) -> Self {
        self.xr = add_power(self.xr, c);
        self
    }

    pub fn vanishing_at(mut self, face: Face) -> Self {
        self.vanish.push(face);
        self.normalized()
    }

    pub fn with_proj(mut self, side: Side, pi: f64, perp: f64) -> Self {
        self.proj = Some(Projector { side, pi, perp });
        self
    }

    pub fn is_zero(&self) -> bool {
        self.kind == Kind::Zero
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(PhiError::InvalidInput(m.to_string()));
        if self.order.is_nan() || self.order == f64::INFINITY {
            return bad("order must be finite or -inf");
        }
        for p in [self.xl, self.xr] {
            if p.is_nan() || p == f64::NEG_INFINITY {
                return bad("x-powers must be finite or +inf");
            }
        }
        if let Some(pr) = self.proj {
            if pr.pi.is_nan() || pr.perp.is_nan() || pr.pi == f64::NEG_INFINITY || pr.perp == f64::NEG_INFINITY {
                return bad("projector powers must be finite or +inf");
            }
        }
        match (self.kind.base(), &self.spec) {
            (Base::Zero | Base::Sus, Spec::None) => {}
            (Base::Zero | Base::Sus, _) => return bad("zero and sus_phi classes take spec \"none\""),
            (Base::Phi, Spec::None) if self.kind.is_bphi() => {}
            (_, _) if self.kind.is_bphi() => return bad("bphi classes take spec \"none\""),
            (_, Spec::None) => return bad("b and phi classes need a spec"),
            (Base::B, Spec::Family(f)) if f.kind != FamilyKind::B => return bad("b class with phi family"),
            (Base::Phi, Spec::Family(f)) if f.kind != FamilyKind::Phi => return bad("phi class with b family"),
            (Base::B, Spec::Bounds(b)) if b.ff.is_some() => return bad("b class bounds have no ff"),
            (Base::Phi, Spec::Bounds(b)) if b.ff.is_none() => return bad("phi class bounds need ff"),
            (_, Spec::Weight(a)) if !a.is_finite() => return bad("weight must be finite"),
            _ => {}
        }
        if self.kind.base() == Base::B && self.vanish.contains(&Face::Ff) {
            return bad("b classes have no ff face");
        }
        Ok(())
    }

    /// Canonical representative: sorted vanishing faces, and the extended
    /// flag dropped at order `-∞` where both calculi agree.
    pub fn normalized(mut self) -> Self {
        self.vanish.sort();
        self.vanish.dedup();
        if self.order == f64::NEG_INFINITY {
            self.kind = self.kind.with_ext(false);
        }
        self
    }

    /// Index-set bounds of the class with x-powers and vanishing faces folded in.
    pub fn fold(&self) -> Result<FaceBounds> {
        if self.proj.is_some() {
            return Err(PhiError::InvalidInput("expand projector decorations before folding".into()));
        }
        let phi = self.kind.base() == Base::Phi;
        let base = match (&self.spec, self.kind.base()) {
            (_, Base::Zero) => FaceBounds::empty_phi(),
            (_, Base::Sus) => {
                return Err(PhiError::Unsupported("suspended classes carry no index data".into()))
            }
            (Spec::None, _) => FaceBounds::phi(Bound::Empty, Bound::Empty, Bound::ge(0.0), Bound::Gt(0.0)),
            (Spec::Weight(a), _) => {
                let mut fb = FaceBounds::b(Bound::Gt(*a), Bound::Gt(-a), Bound::ge(0.0));
                if phi {
                    fb.ff = Some(Bound::Gt(0.0));
                }
                fb
            }
            (Spec::Small, _) => {
                if phi {
                    FaceBounds::phi(Bound::Empty, Bound::Empty, Bound::Empty, Bound::ge(0.0))
                } else {
                    FaceBounds::b(Bound::Empty, Bound::Empty, Bound::ge(0.0))
                }
            }
            (Spec::Family(f), _) => FaceBounds::of_family(f),
            (Spec::Bounds(b), _) => *b,
        };
        let mut fb = base;
        for face in &self.vanish {
            fb.set(*face, Bound::Empty);
        }
        Ok(fb.left_power(self.xl).right_power(self.xr))
    }

    /// The exact index family with x-powers and vanishing faces folded in.
    pub fn fold_family(&self) -> Result<IndexFamily> {
        let Spec::Family(f) = &self.spec else {
            return Err(PhiError::InvalidInput("class has no full index family".into()));
        };
        let mut f = f.clone();
        for face in &self.vanish {
            if let Some(s) = f.get_mut(*face) {
                *s = IndexSet::empty();
            }
        }
        let shift = |s: &IndexSet, c: f64| if c == f64::INFINITY { IndexSet::empty() } else { s.shift(c) };
        let (l, r) = (self.xl, self.xr);
        Ok(IndexFamily {
            kind: f.kind,
            lf: shift(&f.lf, l),
            rf: shift(&f.rf, r),
            bf: shift(&shift(&f.bf, l), r),
            ff: f.ff.as_ref().map(|s| shift(&shift(s, l), r)),
        })
    }

    /// `x^{-c} P x^{c}`.
    pub fn conjugate_by_power(&self, c: f64) -> OpClass {
        let mut out = self.clone();
        out.spec = match &self.spec {
            Spec::Weight(a) => Spec::Weight(a - c),
            Spec::Family(f) => {
                let mut g = f.clone();
                g.lf = g.lf.shift(-c);
                g.rf = g.rf.shift(c);
                Spec::Family(g)
            }
            Spec::Bounds(b) => {
                Spec::Bounds(FaceBounds { lf: b.lf.shift(-c), rf: b.rf.shift(c), ..*b })
            }
            s => s.clone(),
        };
        out
    }

    /// Records a factor `x^c` on the given side.
    pub fn multiply_x_power(&self, c: f64, side: Side) -> OpClass {
        match side {
            Side::Left => self.clone().with_left(c),
            Side::Right => self.clone().with_right(c),
        }
    }

    /// Class of the formal adjoints.
    pub fn adjoint(&self) -> OpClass {
        let spec = match &self.spec {
            Spec::Weight(a) => Spec::Weight(-a),
            Spec::Family(f) => Spec::Family(f.swapped()),
            Spec::Bounds(b) => Spec::Bounds(b.swapped()),
            s => s.clone(),
        };
        let vanish = self
            .vanish
            .iter()
            .map(|f| match f {
                Face::Lf => Face::Rf,
                Face::Rf => Face::Lf,
                other => *other,
            })
            .collect();
        let proj = self.proj.map(|p| Projector {
            side: match p.side {
                Side::Left => Side::Right,
                Side::Right => Side::Left,
            },
            ..p
        });
        OpClass { kind: self.kind, order: self.order, spec, xl: self.xr, xr: self.xl, vanish, proj }
            .normalized()
    }

    /// Expands a projector decoration into a 2×2 matrix of undecorated classes.
    pub fn expand_projector(&self) -> [[OpClass; 2]; 2] {
        let mut bare = self.clone();
        bare.proj = None;
        match self.proj {
            None => [[bare.clone(), bare.clone()], [bare.clone(), bare]],
            Some(p) => {
                let pow = [p.pi, p.perp];
                std::array::from_fn(|i| {
                    std::array::from_fn(|j| match p.side {
                        Side::Right => bare.clone().with_right(pow[j]),
                        Side::Left => bare.clone().with_left(pow[i]),
                    })
                })
            }
        }
    }
}

pub(crate) fn add_power(a: f64, b: f64) -> f64 {
    if a == f64::INFINITY || b == f64::INFINITY {
        f64::INFINITY
    } else {
        a + b
    }
}

fn fmt_power(c: f64) -> String {
    format!("x^{{{}}}", fmt_ext(c))
}

impl fmt::Display for OpClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let proj_str = |p: &Projector| {
            let term = |c: f64, s: &str| if c == 0.0 { s.to_string() } else { format!("{}{s}", fmt_power(c)) };
            format!("({} + {})", term(p.pi, "Π"), term(p.perp, "Π⊥"))
        };
        if let Some(p) = self.proj.filter(|p| p.side == Side::Left) {
            write!(f, "{}", proj_str(&p))?;
        }
        if self.xl != 0.0 {
            write!(f, "{}", fmt_power(self.xl))?;
        }
        write!(f, "{}", self.kind.symbol())?;
        for face in &self.vanish {
            write!(f, ",{}", face.name())?;
        }
        let ord = fmt_ext(self.order);
        match &self.spec {
            Spec::Weight(a) => write!(f, "^{{{ord},{}}}", fmt_ext(*a))?,
            Spec::Small | Spec::None => write!(f, "^{{{ord}}}")?,
            Spec::Family(fam) => {
                write!(f, "^{{{ord}}}[lf {}, rf {}, bf {}", fam.lf, fam.rf, fam.bf)?;
                if let Some(ff) = &fam.ff {
                    write!(f, ", ff {ff}")?;
                }
                write!(f, "]")?;
            }
            Spec::Bounds(b) => write!(f, "^{{{ord}}}{b}")?,
        }
        if self.xr != 0.0 {
            write!(f, "{}", fmt_power(self.xr))?;
        }
        if let Some(p) = self.proj.filter(|p| p.side == Side::Right) {
            write!(f, "{}", proj_str(&p))?;
        }
        Ok(())
    }
}

/// Displays a sum of classes.
pub struct SumDisplay<'a>(pub &'a [OpClass]);

impl fmt::Display for SumDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}
