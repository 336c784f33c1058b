use super::bounds::{Bound, FaceBounds};
use super::class::{Base, OpClass};
use super::compose::Rule;
use super::predicates::decompose_near_ff;
use crate::index_algebra::EXP_TOL;

/// Bounds of the lift of a b-class to the φ-double space, if a lift applies.
pub(crate) fn lift_bounds(fb: &FaceBounds, order: f64) -> Option<(FaceBounds, Rule)> {
    if fb.bf.is_empty() {
        Some((FaceBounds { ff: Some(Bound::Empty), ..*fb }, Rule::RuleE))
    } else if order < 0.0 {
        Some((FaceBounds { ff: Some(fb.bf.strictly_above()), ..*fb }, Rule::Lift))
    } else {
        None
    }
}

/// Decides `inner ⊂ outer` for undecorated classes. Returns the rules used,
/// or `None` if containment cannot be certified.
pub fn contained_in(inner: &OpClass, outer: &OpClass) -> Option<Vec<Rule>> {
    if inner.proj.is_some() || outer.proj.is_some() {
        return None;
    }
    let inner = inner.clone().normalized();
    let outer = outer.clone().normalized();
    if inner.is_zero() {
        return Some(Vec::new());
    }
    if outer.is_zero() {
        return None;
    }
    let (ib, ob) = (inner.kind.base(), outer.kind.base());
    let ext_ok = !inner.kind.is_ext() || outer.kind.is_ext();
    let order_ok = inner.order <= outer.order + EXP_TOL;
    if ib == Base::Sus || ob == Base::Sus {
        return (ib == ob && ext_ok && order_ok).then(Vec::new);
    }
    if !ext_ok || !order_ok {
        return None;
    }
    let ifold = inner.fold().ok()?;
    let ofold = outer.fold().ok()?;
    match (ib, ob) {
        (Base::B, Base::B) | (Base::Phi, Base::Phi) => ifold.implies(&ofold).then(Vec::new),
        (Base::B, Base::Phi) => {
            let (lifted, rule) = lift_bounds(&ifold, inner.order)?;
            lifted.implies(&ofold).then(|| vec![rule])
        }
        (Base::Phi, Base::B) => {
            if ifold.ff != Some(Bound::Empty) {
                return None;
            }
            FaceBounds { ff: None, ..ifold }.implies(&ofold).then(|| vec![Rule::FfVanishing])
        }
        _ => None,
    }
}

/// Decides `Σ inner ⊂ Σ outer` summand by summand. A φ-summand that fits no
/// target summand is split into its parts away from and near `ff`.
pub fn sum_contained_in(inner: &[OpClass], outer: &[OpClass]) -> Option<Vec<Rule>> {
    let mut rules = Vec::new();
    let fits = |s: &OpClass| outer.iter().find_map(|t| contained_in(s, t));
    for s in inner {
        if s.is_zero() {
            continue;
        }
        if let Some(r) = fits(s) {
            rules.extend(r);
            continue;
        }
        if s.kind.base() != Base::Phi {
            return None;
        }
        let (far, near) = decompose_near_ff(s).ok()?;
        rules.push(Rule::Decompose);
        rules.extend(fits(&far)?);
        rules.extend(fits(&near)?);
    }
    rules.dedup();
    Some(rules)
}
