use serde::{Deserialize, Serialize};

use super::bounds::{Bound, FaceBounds};
use super::class::{Base, Kind, OpClass, Spec};
use super::Geometry;
use crate::error::{PhiError, Result};
use crate::index_algebra::{Face, IndexFamily, IndexSet, EXP_TOL};

/// Regularity scale of a weighted Sobolev space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegularityKind {
    B,
    Phi,
    Split,
}

/// The space `x^weight H^order` of the given kind.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SobolevSpaceSpec {
    pub weight: f64,
    pub order: f64,
    pub kind: RegularityKind,
}

impl SobolevSpaceSpec {
    /// Split spaces only make sense for operators in 2×2 block form.
    pub fn validate(&self, block_setting: bool) -> Result<()> {
        if !self.weight.is_finite() || !self.order.is_finite() {
            return Err(PhiError::InvalidInput("Sobolev weight and order must be finite".into()));
        }
        if self.kind == RegularityKind::Split && !block_setting {
            return Err(PhiError::InvalidInput("split spaces need the Π-block setting".into()));
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        let k = match self.kind {
            RegularityKind::B => "b",
            RegularityKind::Phi => "φ",
            RegularityKind::Split => "split",
        };
        format!("x^{{{}}}H^{{{}}}_{k}", crate::extreal::fmt_ext(self.weight), crate::extreal::fmt_ext(self.order))
    }
}

fn bounds_for_mapping(p: &OpClass) -> Result<FaceBounds> {
    match (&p.spec, p.proj) {
        (_, Some(_)) => Err(PhiError::InvalidInput("expand projector decorations first".into())),
        (Spec::Family(_), _) => Ok(FaceBounds::of_family(&p.fold_family()?)),
        _ => p.fold(),
    }
}

fn corner_ok(fb: &FaceBounds, gap: f64, strict: bool) -> bool {
    match (fb.ff, strict) {
        (None, true) => fb.bf.gt(gap),
        (None, false) => fb.bf.geq(gap),
        (Some(ff), true) => fb.bf.gt(gap) && ff.gt(gap),
        (Some(ff), false) => fb.bf.geq(gap) && ff.geq(gap) && (fb.bf.gt(gap) || ff.gt(gap)),
    }
}

/// `P : x^α L² → x^β H^k` is bounded (b- or φ-Sobolev space matching the kind).
pub fn is_bounded(p: &OpClass, alpha: f64, beta: f64, k: f64) -> Result<bool> {
    if p.is_zero() {
        return Ok(true);
    }
    let fb = bounds_for_mapping(p)?;
    Ok(p.order <= -k + EXP_TOL && fb.lf.gt(beta) && fb.rf.gt(-alpha) && corner_ok(&fb, beta - alpha, false))
}

/// `P : x^α L² → x^β H^k` is compact.
pub fn is_compact(p: &OpClass, alpha: f64, beta: f64, k: f64) -> Result<bool> {
    if p.is_zero() {
        return Ok(true);
    }
    let fb = bounds_for_mapping(p)?;
    Ok(p.order < -k - EXP_TOL && fb.lf.gt(beta) && fb.rf.gt(-alpha) && corner_ok(&fb, beta - alpha, true))
}

/// Index set of `Pu` for `u` polyhomogeneous with index set `i`.
pub fn map_phg(p: &OpClass, i: &IndexSet) -> Result<IndexSet> {
    let j = p.fold_family()?;
    let pairing = j.rf.add(i);
    if !pairing.greater_than(0.0) {
        return Err(PhiError::NonIntegrable(format!("J_rf + I = {pairing} is not > 0")));
    }
    let mut k = j.lf.extended_union(&j.bf.add(i));
    if let Some(ff) = &j.ff {
        k = k.extended_union(&ff.add(i));
    }
    Ok(k)
}

/// The two φ-summands of a lifted b-class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftResult {
    pub main: OpClass,
    pub residual: OpClass,
    pub warnings: Vec<String>,
}

/// Lifts a b-class with full index family to the φ-double space.
pub fn lift_b_to_phi(t: &OpClass, geo: Geometry) -> Result<LiftResult> {
    if t.kind.base() != Base::B {
        return Err(PhiError::InvalidInput(format!("{t} is not a b-class")));
    }
    let fam = t.fold_family()?;
    let mut warnings = Vec::new();
    if t.order >= 0.0 {
        warnings.push(format!("lifting at order {} ≥ 0 is outside the intended range", t.order));
    }
    let neg_m = IndexSet::real(-t.order);
    let ff_main = fam.bf.add(&neg_m.scale(geo.a));
    let ff_res = fam.bf.add(&neg_m.extended_union(&IndexSet::real(f64::from(geo.b_dim + 1))).scale(geo.a));
    let kind = Kind::Phi.with_ext(t.kind.is_ext());
    let mk = |order: f64, ff: IndexSet| {
        OpClass::new(kind, order, Spec::Family(IndexFamily::phi(fam.lf.clone(), fam.rf.clone(), fam.bf.clone(), ff)))
    };
    Ok(LiftResult { main: mk(t.order, ff_main), residual: mk(f64::NEG_INFINITY, ff_res), warnings })
}

/// Splits a φ-class into a b-part supported away from `diag ∪ ff` (order
/// `-∞`) and a part supported near `diag ∪ ff` with empty `lf`, `rf` sets.
pub fn decompose_near_ff(s: &OpClass) -> Result<(OpClass, OpClass)> {
    if s.is_zero() {
        return Ok((OpClass::zero(), OpClass::zero()));
    }
    if s.kind.base() != Base::Phi {
        return Err(PhiError::InvalidInput(format!("{s} is not a φ-class")));
    }
    if s.kind.is_bphi() {
        return Ok((OpClass::zero(), s.clone()));
    }
    let ext = s.kind.is_ext();
    let (far_spec, near_kind, near_spec) = match &s.spec {
        Spec::Weight(a) => (Spec::Weight(*a), Kind::Bphi, Spec::None),
        Spec::Small => (Spec::Bounds(FaceBounds::b(Bound::Empty, Bound::Empty, Bound::Empty)), Kind::Phi, Spec::Small),
        Spec::Family(f) => (
            Spec::Family(IndexFamily::b(f.lf.clone(), f.rf.clone(), f.bf.clone())),
            Kind::Phi,
            Spec::Family(IndexFamily { lf: IndexSet::empty(), rf: IndexSet::empty(), ..f.clone() }),
        ),
        Spec::Bounds(b) => (
            Spec::Bounds(FaceBounds { ff: None, ..*b }),
            Kind::Phi,
            Spec::Bounds(FaceBounds { lf: Bound::Empty, rf: Bound::Empty, ..*b }),
        ),
        Spec::None => return Err(PhiError::InvalidInput(format!("{s} has no boundary data"))),
    };
    let far = OpClass {
        kind: Kind::BExt,
        order: f64::NEG_INFINITY,
        spec: far_spec,
        xl: s.xl,
        xr: s.xr,
        vanish: s.vanish.iter().copied().filter(|f| *f != Face::Ff).collect(),
        proj: None,
    }
    .normalized();
    let near = OpClass {
        kind: near_kind.with_ext(ext),
        order: s.order,
        spec: near_spec,
        xl: s.xl,
        xr: s.xr,
        vanish: s.vanish.iter().copied().filter(|f| matches!(f, Face::Bf | Face::Ff)).collect(),
        proj: None,
    }
    .normalized();
    Ok((far, near))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_algebra::Generator;

    fn set(g: &[(f64, u32)]) -> IndexSet {
        IndexSet::from_generators(g.iter().map(|&(re, k)| Generator::real(re, k)))
    }

    fn phi_family(lf: IndexSet, rf: IndexSet, bf: IndexSet, ff: IndexSet, order: f64) -> OpClass {
        OpClass::new(Kind::Phi, order, Spec::Family(IndexFamily::phi(lf, rf, bf, ff)))
    }

    #[test]
    fn boundedness_corner_rule() {
        let e = IndexSet::empty;
        let small = phi_family(e(), e(), e(), set(&[(0.0, 0)]), 0.0);
        assert!(is_bounded(&small, 0.0, 0.0, 0.0).unwrap());
        let corner = phi_family(e(), e(), set(&[(0.0, 0)]), set(&[(0.0, 0)]), 0.0);
        assert!(!is_bounded(&corner, 0.0, 0.0, 0.0).unwrap());
        let strict = phi_family(set(&[(1.0, 0)]), set(&[(1.0, 0)]), set(&[(0.5, 0)]), set(&[(0.5, 0)]), -1.0);
        assert!(is_compact(&strict, 0.0, 0.0, 0.0).unwrap());
        assert!(!is_compact(&strict.clone().with_left(0.0), 0.0, 0.0, 1.0).unwrap());
    }

    #[test]
    fn boundedness_is_conjugation_equivariant() {
        for &(alpha, beta, c) in &[(0.0, 0.0, 1.0), (0.5, -0.5, -2.0), (1.0, 1.0, 0.25)] {
            for w in [-1.0, 0.0, 0.5, 1.0] {
                let p = OpClass::weight(Kind::Phi, -1.0, w);
                assert_eq!(
                    is_bounded(&p, alpha, beta, 0.0).unwrap(),
                    is_bounded(&p.conjugate_by_power(c), alpha - c, beta - c, 0.0).unwrap()
                );
            }
        }
    }

    #[test]
    fn phg_mapping_examples() {
        let e = IndexSet::empty;
        let j = OpClass::new(Kind::B, -1.0, Spec::Family(IndexFamily::b(e(), e(), set(&[(0.0, 0)]))));
        assert_eq!(map_phg(&j, &set(&[(1.0, 0)])).unwrap(), set(&[(1.0, 0)]));
        let j2 = OpClass::new(Kind::B, -1.0, Spec::Family(IndexFamily::b(set(&[(0.0, 0)]), e(), set(&[(0.0, 0)]))));
        assert_eq!(map_phg(&j2, &set(&[(0.0, 0)])).unwrap(), set(&[(0.0, 1)]));
        let j3 = OpClass::new(Kind::B, -1.0, Spec::Family(IndexFamily::b(e(), set(&[(0.0, 0)]), e())));
        assert!(matches!(map_phg(&j3, &set(&[(0.0, 0)])), Err(PhiError::NonIntegrable(_))));
    }

    #[test]
    fn lift_examples() {
        let e = IndexSet::empty;
        let t = OpClass::new(Kind::B, -1.0, Spec::Family(IndexFamily::b(e(), e(), set(&[(0.0, 0)]))));
        let l = lift_b_to_phi(&t, Geometry::new(1, 1).unwrap()).unwrap();
        let Spec::Family(f) = &l.main.spec else { panic!() };
        assert_eq!(f.ff, Some(set(&[(1.0, 0)])));
        let l2 = lift_b_to_phi(&t, Geometry::new(2, 1).unwrap()).unwrap();
        let Spec::Family(f2) = &l2.residual.spec else { panic!() };
        assert_eq!(f2.ff, Some(set(&[(2.0, 0), (4.0, 1)])));
        assert!(l2.warnings.is_empty());
        let empty_bf = OpClass::new(Kind::B, -1.0, Spec::Family(IndexFamily::b(e(), e(), e())));
        let l3 = lift_b_to_phi(&empty_bf, Geometry::new(1, 1).unwrap()).unwrap();
        let Spec::Family(f3) = &l3.residual.spec else { panic!() };
        assert!(f3.ff.as_ref().unwrap().is_empty());
        let pos = OpClass::new(Kind::B, 1.0, Spec::Family(IndexFamily::b(e(), e(), e())));
        assert_eq!(lift_b_to_phi(&pos, Geometry::new(1, 1).unwrap()).unwrap().warnings.len(), 1);
    }

    #[test]
    fn lift_preserves_b_boundedness_when_ff_vanishes() {
        for w in [-0.5, 0.0, 0.5] {
            let t = OpClass::weight(Kind::B, 0.0, w).with_left(f64::INFINITY);
            let lifted = OpClass::weight(Kind::Phi, 0.0, w).with_left(f64::INFINITY);
            for (alpha, beta) in [(0.0, 0.0), (1.0, 2.0), (-1.0, 0.5)] {
                assert_eq!(is_bounded(&t, alpha, beta, 0.0).unwrap(), is_bounded(&lifted, alpha, beta, 0.0).unwrap());
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        let s = OpClass::weight(Kind::PhiExt, -1.0, 0.5);
        let (far, near) = decompose_near_ff(&s).unwrap();
        assert_eq!(far, OpClass::weight(Kind::B, f64::NEG_INFINITY, 0.5));
        assert_eq!(near, OpClass::bphi(true, -1.0));
        let smooth = OpClass::weight(Kind::Phi, f64::NEG_INFINITY, 0.0);
        let (f2, n2) = decompose_near_ff(&smooth).unwrap();
        assert_eq!(f2.order, f64::NEG_INFINITY);
        assert_eq!(n2.order, f64::NEG_INFINITY);
        let b = OpClass::bphi(false, 0.0);
        assert_eq!(decompose_near_ff(&b).unwrap(), (OpClass::zero(), b));
    }
}
