//! Composition of operator classes.
//!
//! [`compose_alternatives`] returns every applicable rule's result, best
//! first. Each [`Composite`] records the rule chain that produced it, and
//! [`apply_rule`] re-runs a named rule so derivations can be replayed.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::bounds::FaceBounds;
use super::class::{add_power, Base, Kind, OpClass, Spec, SumDisplay};
use super::containment::lift_bounds;
use super::predicates::lift_b_to_phi;
use super::Geometry;
use crate::error::{PhiError, Result};
use crate::index_algebra::{IndexFamily, IndexSet, EXP_TOL};

/// Named rules of the calculus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// A zero factor.
    ZeroFactor,
    /// Exact composition of full φ index families.
    CompositionTheorem,
    /// The composition formulas evaluated on face bounds.
    BoundsTheorem,
    /// A small-calculus factor preserves the other factor's index data.
    SmallCalculus,
    /// b-classes of equal weight compose.
    RuleA,
    /// φ-classes of equal weight compose.
    RuleB,
    /// b-classes of negative order lift to φ-classes.
    Lift,
    /// x-powers moved through a class by conjugation.
    Conjugation,
    /// `x^∞` classes agree in both calculi.
    RuleE,
    /// The refined mixed composition `Ψ^{k,α} x^c Ψ_φ^{l,α}`.
    RuleF,
    /// Splitting a φ-class into parts away from and near `ff`.
    Decompose,
    /// A φ-class vanishing at `ff` is a b-class.
    FfVanishing,
    /// Taking formal adjoints.
    Adjoint,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_owned));
        write!(f, "{}", s.unwrap_or_default())
    }
}

/// The result of one composition rule: a sum of classes and the rule chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Composite {
    pub rules: Vec<Rule>,
    pub result: Vec<OpClass>,
}

impl Composite {
    fn new(primary: Rule, extra: impl IntoIterator<Item = Rule>, result: Vec<OpClass>) -> Self {
        let mut rules = vec![primary];
        for r in extra {
            if !rules.contains(&r) {
                rules.push(r);
            }
        }
        Composite { rules, result }
    }

    pub fn primary(&self) -> Rule {
        self.rules[0]
    }
}

impl fmt::Display for Composite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}  [", SumDisplay(&self.result))?;
        for (i, r) in self.rules.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "]")
    }
}

/// A recorded composition `left ∘ right`, replayable from its rule chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Derivation {
    pub left: OpClass,
    pub right: OpClass,
    pub composite: Composite,
}

impl Derivation {
    /// Re-runs the primary rule and checks that it reproduces the result.
    pub fn replay(&self, geo: Option<Geometry>) -> Result<bool> {
        let again = apply_rule(self.composite.primary(), &self.left, &self.right, geo)?;
        Ok(again == self.composite)
    }
}

type Strategy = fn(&OpClass, &OpClass, Option<Geometry>) -> Option<Result<Composite>>;

const STRATEGIES: [(Rule, Strategy); 7] = [
    (Rule::ZeroFactor, zero_factor),
    (Rule::CompositionTheorem, full_families),
    (Rule::SmallCalculus, small_factor),
    (Rule::RuleA, aligned_weights),
    (Rule::RuleB, aligned_weights),
    (Rule::RuleF, rule_f),
    (Rule::BoundsTheorem, bounds_theorem),
];

/// Every applicable composition of `p ∘ q`, most precise first.
pub fn compose_alternatives(p: &OpClass, q: &OpClass, geo: Option<Geometry>) -> Result<Vec<Composite>> {
    check_operands(p, q)?;
    let mut out: Vec<Composite> = Vec::new();
    for (_, strategy) in STRATEGIES {
        if let Some(r) = strategy(p, q, geo) {
            let c = r?;
            if !out.contains(&c) {
                out.push(c);
            }
            if matches!(out.last().map(Composite::primary), Some(Rule::ZeroFactor | Rule::CompositionTheorem)) {
                break;
            }
        }
    }
    if out.is_empty() {
        let phi_possible = to_phi(p, geo).is_some() && to_phi(q, geo).is_some();
        return Err(if geo.is_none() && phi_possible {
            PhiError::MissingConstants(format!("composing {p} with {q} needs (a, b)"))
        } else {
            PhiError::Unsupported(format!("no composition rule applies to {p} ∘ {q}"))
        });
    }
    Ok(out)
}

/// The most precise composition of `p ∘ q`.
pub fn compose(p: &OpClass, q: &OpClass, geo: Option<Geometry>) -> Result<Composite> {
    Ok(compose_alternatives(p, q, geo)?.remove(0))
}

/// Applies one named rule; errors if its hypotheses fail.
pub fn apply_rule(rule: Rule, p: &OpClass, q: &OpClass, geo: Option<Geometry>) -> Result<Composite> {
    check_operands(p, q)?;
    let strategy = STRATEGIES
        .iter()
        .find(|(r, _)| *r == rule)
        .map(|(_, s)| *s)
        .ok_or_else(|| PhiError::InvalidInput(format!("{rule} is not a composition rule")))?;
    match strategy(p, q, geo) {
        Some(r) => r.and_then(|c| {
            if c.primary() == rule {
                Ok(c)
            } else {
                Err(PhiError::Hypothesis(format!("{rule} does not apply to {p} ∘ {q}")))
            }
        }),
        None => Err(PhiError::Hypothesis(format!("{rule} does not apply to {p} ∘ {q}"))),
    }
}

fn check_operands(p: &OpClass, q: &OpClass) -> Result<()> {
    p.validate()?;
    q.validate()?;
    if p.proj.is_some() || q.proj.is_some() {
        return Err(PhiError::InvalidInput("expand projector decorations before composing".into()));
    }
    if !(p.is_zero() || q.is_zero()) && (p.kind == Kind::SusPhi || q.kind == Kind::SusPhi) {
        return Err(PhiError::Unsupported("composition inside the suspended calculus is not mechanized".into()));
    }
    Ok(())
}

fn ext_of(p: &OpClass, q: &OpClass) -> bool {
    p.kind.is_ext() || q.kind.is_ext()
}

fn is_phi_base(c: &OpClass) -> bool {
    c.kind.base() == Base::Phi
}

/// Rewrites a class as a sum of φ-classes, lifting b-classes when allowed.
fn to_phi(c: &OpClass, geo: Option<Geometry>) -> Option<(Vec<OpClass>, Option<Rule>)> {
    match c.kind.base() {
        Base::Phi => return Some((vec![c.clone()], None)),
        Base::B => {}
        _ => return None,
    }
    let ext = c.kind.is_ext();
    let phi_kind = Kind::Phi.with_ext(ext);
    if let (Spec::Family(_), Some(g)) = (&c.spec, geo) {
        if c.order < 0.0 {
            let lift = lift_b_to_phi(c, g).ok()?;
            return Some((vec![lift.main, lift.residual], Some(Rule::Lift)));
        }
    }
    let fb = c.fold().ok()?;
    let (lifted, rule) = lift_bounds(&fb, c.order)?;
    let out = match &c.spec {
        Spec::Weight(_) => {
            let mut d = c.clone();
            d.kind = phi_kind;
            d
        }
        _ => OpClass::new(phi_kind, c.order, Spec::Bounds(lifted)),
    };
    Some((vec![out.normalized()], Some(rule)))
}

fn zero_factor(p: &OpClass, q: &OpClass, _: Option<Geometry>) -> Option<Result<Composite>> {
    (p.is_zero() || q.is_zero()).then(|| Ok(Composite::new(Rule::ZeroFactor, [], vec![OpClass::zero()])))
}

fn full_families(p: &OpClass, q: &OpClass, geo: Option<Geometry>) -> Option<Result<Composite>> {
    if !matches!(p.spec, Spec::Family(_)) || !matches!(q.spec, Spec::Family(_)) {
        return None;
    }
    Some(compose_families(p, q, geo))
}

fn compose_families(p: &OpClass, q: &OpClass, geo: Option<Geometry>) -> Result<Composite> {
    if p.kind.base() == Base::B && q.kind.base() == Base::B {
        return Err(PhiError::Unsupported("composition of full b index families".into()));
    }
    let geo = geo.ok_or_else(|| PhiError::MissingConstants("full φ composition needs (a, b)".into()))?;
    let (ps, pr) = to_phi(p, Some(geo))
        .ok_or_else(|| PhiError::Unsupported(format!("{p} cannot be lifted to the φ-calculus")))?;
    let (qs, qr) = to_phi(q, Some(geo))
        .ok_or_else(|| PhiError::Unsupported(format!("{q} cannot be lifted to the φ-calculus")))?;
    let ext = ext_of(p, q);
    let mut result = Vec::new();
    for pi in &ps {
        for qj in &qs {
            let k = compose_phi_families(&pi.fold_family()?, &qj.fold_family()?, geo.big_a())?;
            result.push(OpClass::new(Kind::Phi.with_ext(ext), pi.order + qj.order, Spec::Family(k)));
        }
    }
    Ok(Composite::new(Rule::CompositionTheorem, pr.into_iter().chain(qr), result))
}

/// The four composition formulas on exact index families.
pub fn compose_phi_families(i: &IndexFamily, j: &IndexFamily, big_a: f64) -> Result<IndexFamily> {
    let e = IndexSet::empty();
    let iff = i.ff.as_ref().unwrap_or(&e);
    let jff = j.ff.as_ref().unwrap_or(&e);
    if !i.rf.add(&j.lf).greater_than(0.0) {
        return Err(PhiError::NonIntegrable(format!(
            "I_rf + J_lf = {} is not > 0",
            i.rf.add(&j.lf)
        )));
    }
    let lf = i.lf.extended_union(&i.bf.add(&j.lf)).extended_union(&iff.add(&j.lf));
    let rf = j.rf.extended_union(&i.rf.add(&j.bf)).extended_union(&i.rf.add(jff));
    let bf = i
        .lf
        .add(&j.rf)
        .extended_union(&i.bf.add(&j.bf))
        .extended_union(&iff.add(&j.bf))
        .extended_union(&i.bf.add(jff));
    let ff = i
        .lf
        .add(&j.rf)
        .shift(big_a)
        .extended_union(&i.bf.add(&j.bf).shift(big_a))
        .extended_union(&iff.add(jff));
    Ok(IndexFamily::phi(lf, rf, bf, ff))
}

fn small_factor(p: &OpClass, q: &OpClass, geo: Option<Geometry>) -> Option<Result<Composite>> {
    let small = |c: &OpClass| c.spec == Spec::Small && c.vanish.is_empty();
    let ext = ext_of(p, q);
    let (s, other, left_small) = if small(p) {
        (p, q, true)
    } else if small(q) {
        (q, p, false)
    } else {
        return None;
    };
    let (others, lift_rule) = if is_phi_base(s) {
        to_phi(other, geo)?
    } else if other.kind.base() == Base::B && !matches!(other.spec, Spec::Family(_)) {
        (vec![other.clone()], None)
    } else {
        return None;
    };
    let through = add_power(s.xl, s.xr);
    let result = others
        .into_iter()
        .map(|mut c| {
            if left_small {
                c.xl = add_power(through, c.xl);
            } else {
                c.xr = add_power(c.xr, through);
            }
            c.order += s.order;
            c.kind = c.kind.with_ext(ext);
            c.normalized()
        })
        .collect();
    Some(Ok(Composite::new(Rule::SmallCalculus, lift_rule, result)))
}

/// Weight of a class at the weight tier; `None` inside means "every weight".
fn weight_view(c: &OpClass) -> Option<Option<f64>> {
    match (&c.spec, c.kind.is_bphi()) {
        (Spec::Weight(a), false) => Some(Some(*a)),
        (Spec::None, true) => Some(None),
        _ => None,
    }
}

fn strip_vanish(c: &OpClass) -> OpClass {
    let mut d = c.clone();
    d.vanish.clear();
    d
}

fn single_phi(c: &OpClass, geo: Option<Geometry>) -> Option<(OpClass, Option<Rule>)> {
    let (mut v, r) = to_phi(c, geo)?;
    (v.len() == 1).then(|| (v.remove(0), r))
}

fn aligned_weights(p: &OpClass, q: &OpClass, geo: Option<Geometry>) -> Option<Result<Composite>> {
    let c = add_power(p.xr, q.xl);
    if !c.is_finite() {
        return None;
    }
    let (p0, q0) = (strip_vanish(p), strip_vanish(q));
    let ext = ext_of(p, q);
    let conj = (c != 0.0).then_some(Rule::Conjugation);
    if p0.kind.base() == Base::B && q0.kind.base() == Base::B {
        let (Some(Some(ap)), Some(Some(aq))) = (weight_view(&p0), weight_view(&q0)) else {
            return None;
        };
        if (ap - c - aq).abs() > EXP_TOL {
            return None;
        }
        let r = OpClass::weight(Kind::B.with_ext(ext), p0.order + q0.order, aq)
            .with_left(add_power(p0.xl, c))
            .with_right(q0.xr);
        return Some(Ok(Composite::new(Rule::RuleA, conj, vec![r.normalized()])));
    }
    let (pp, lp) = single_phi(&p0, geo)?;
    let (qq, lq) = single_phi(&q0, geo)?;
    let alpha = match (weight_view(&pp)?, weight_view(&qq)?) {
        (Some(ap), Some(aq)) if (ap - c - aq).abs() <= EXP_TOL => Some(aq),
        (Some(_), Some(_)) => return None,
        (Some(ap), None) => Some(ap - c),
        (None, aq) => aq,
    };
    let order = pp.order + qq.order;
    let r = match alpha {
        Some(a) => OpClass::weight(Kind::Phi.with_ext(ext), order, a),
        None => OpClass::bphi(ext, order),
    }
    .with_left(add_power(pp.xl, c))
    .with_right(qq.xr);
    Some(Ok(Composite::new(Rule::RuleB, lp.into_iter().chain(lq).chain(conj), vec![r.normalized()])))
}

fn rule_f(p: &OpClass, q: &OpClass, geo: Option<Geometry>) -> Option<Result<Composite>> {
    let c = add_power(p.xr, q.xl);
    let (p0, q0) = (strip_vanish(p), strip_vanish(q));
    let Some(Some(alpha)) = weight_view(&p0) else { return None };
    let (qq, lq) = single_phi(&q0, geo)?;
    let aq = weight_view(&qq)?;
    if !p0.kind.base().eq(&Base::B) && !is_phi_base(&p0) {
        return None;
    }
    if aq.is_some_and(|aq| (aq - alpha).abs() > EXP_TOL) {
        return None;
    }
    if !c.is_finite() || c < -EXP_TOL || p0.order > EXP_TOL {
        return None;
    }
    let ext = ext_of(p, q);
    let far = OpClass::weight(Kind::BExt, f64::NEG_INFINITY, alpha).with_left(p0.xl).with_right(qq.xr);
    let near = OpClass::bphi(ext, p0.order + qq.order).with_left(add_power(p0.xl, c)).with_right(qq.xr);
    Some(Ok(Composite::new(Rule::RuleF, lq, vec![far.normalized(), near.normalized()])))
}

fn bounds_theorem(p: &OpClass, q: &OpClass, geo: Option<Geometry>) -> Option<Result<Composite>> {
    let g = geo?;
    let (ps, lp) = to_phi(p, Some(g))?;
    let (qs, lq) = to_phi(q, Some(g))?;
    let ext = ext_of(p, q);
    let mut result = Vec::new();
    for pi in &ps {
        for qj in &qs {
            let (i, j) = (pi.fold().ok()?, qj.fold().ok()?);
            if !i.rf.add(j.lf).gt(0.0) {
                return None;
            }
            let k = FaceBounds::compose_phi(&i, &j, g.big_a());
            result.push(OpClass::new(Kind::Phi.with_ext(ext), pi.order + qj.order, Spec::Bounds(k)));
        }
    }
    Some(Ok(Composite::new(Rule::BoundsTheorem, lp.into_iter().chain(lq), result)))
}
