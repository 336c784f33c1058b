//! Polyhomogeneous index sets and index families.
//!
//! An [`IndexSet`] is stored as a finite list of minimal generators `(z, k)`.
//! The set it stands for is the closure under `(z, k) -> (z + 1, k)` and
//! `(z, k) -> (z, k - 1)`. Exponent comparisons use the tolerance [`EXP_TOL`].

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::PhiError;

/// Tolerance used for every exponent equality decision.
pub const EXP_TOL: f64 = 1e-9;

/// Element listings stop at this real part unless asked otherwise.
pub const DISPLAY_CUTOFF: f64 = 10.0;

/// A complex exponent `re + i im`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exponent {
    pub re: f64,
    pub im: f64,
}

impl Exponent {
    pub fn real(re: f64) -> Self {
        Exponent { re, im: 0.0 }
    }

    pub fn new(re: f64, im: f64) -> Self {
        Exponent { re, im }
    }

    pub fn approx_eq(self, other: Exponent) -> bool {
        (self.re - other.re).abs() <= EXP_TOL && (self.im - other.im).abs() <= EXP_TOL
    }

    /// True when `self - other` is a nonnegative integer (within tolerance).
    pub fn is_above_in_lattice(self, other: Exponent) -> bool {
        let d_re = self.re - other.re;
        let d_im = self.im - other.im;
        d_im.abs() <= EXP_TOL && d_re >= -EXP_TOL && (d_re - d_re.round()).abs() <= EXP_TOL
    }

    fn add(self, other: Exponent) -> Exponent {
        Exponent::new(self.re + other.re, self.im + other.im)
    }
}

/// A generator `(z, k)`: exponent `z` with log power up to `k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Generator {
    pub z: Exponent,
    pub k: u32,
}

impl Generator {
    pub fn new(re: f64, im: f64, k: u32) -> Self {
        Generator { z: Exponent::new(re, im), k }
    }

    pub fn real(re: f64, k: u32) -> Self {
        Generator::new(re, 0.0, k)
    }

    /// `other` lies in the closure of `self`.
    fn dominates(&self, other: &Generator) -> bool {
        other.z.is_above_in_lattice(self.z) && other.k <= self.k
    }

    fn cmp_key(&self, other: &Generator) -> Ordering {
        self.z
            .im
            .total_cmp(&other.z.im)
            .then(self.z.re.total_cmp(&other.z.re))
            .then(other.k.cmp(&self.k))
    }
}

/// A closed index set in canonical form. The empty set has no generators.
#[derive(Clone, Debug, Default)]
pub struct IndexSet {
    gens: Vec<Generator>,
}

impl PartialEq for IndexSet {
    fn eq(&self, other: &Self) -> bool {
        self.gens.len() == other.gens.len()
            && self
                .gens
                .iter()
                .zip(&other.gens)
                .all(|(a, b)| a.k == b.k && a.z.approx_eq(b.z))
    }
}

impl IndexSet {
    pub fn empty() -> Self {
        IndexSet { gens: Vec::new() }
    }

    /// Builds the closed set generated by `gens`.
    pub fn from_generators(gens: impl IntoIterator<Item = Generator>) -> Self {
        let mut set = IndexSet { gens: gens.into_iter().collect() };
        set.canonicalize();
        set
    }

    /// Checked constructor taking signed log powers.
    pub fn make(gens: &[(f64, f64, i64)]) -> Result<Self, PhiError> {
        let mut out = Vec::with_capacity(gens.len());
        for &(re, im, k) in gens {
            if k < 0 {
                return Err(PhiError::InvalidInput(format!(
                    "negative log power {k} at exponent {re}{im:+}i"
                )));
            }
            if !re.is_finite() || !im.is_finite() {
                return Err(PhiError::InvalidInput("non-finite exponent".into()));
            }
            out.push(Generator::new(re, im, k as u32));
        }
        Ok(IndexSet::from_generators(out))
    }

    /// The shorthand real set `r`, i.e. the closure of `(r, 0)`.
    pub fn real(r: f64) -> Self {
        IndexSet::from_generators([Generator::real(r, 0)])
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    fn canonicalize(&mut self) {
        self.gens.sort_by(Generator::cmp_key);
        let gens = std::mem::take(&mut self.gens);
        let mut kept: Vec<Generator> = Vec::with_capacity(gens.len());
        for (i, g) in gens.iter().enumerate() {
            let dominated = gens.iter().enumerate().any(|(j, h)| {
                if i == j || !h.dominates(g) {
                    return false;
                }
                // For mutual domination (identical generators) keep the first copy.
                !g.dominates(h) || j < i
            });
            if !dominated {
                kept.push(*g);
            }
        }
        self.gens = kept;
    }

    /// Membership of `(z, k)`.
    pub fn contains(&self, z: Exponent, k: u32) -> bool {
        self.gens.iter().any(|g| z.is_above_in_lattice(g.z) && k <= g.k)
    }

    /// Largest log power present at `z`, or `None` when `z` is absent.
    pub fn profile(&self, z: Exponent) -> Option<u32> {
        self.gens
            .iter()
            .filter(|g| z.is_above_in_lattice(g.z))
            .map(|g| g.k)
            .max()
    }

    /// Set addition `I + J`; the empty set is absorbing.
    pub fn add(&self, other: &IndexSet) -> IndexSet {
        let mut gens = Vec::with_capacity(self.gens.len() * other.gens.len());
        for g in &self.gens {
            for h in &other.gens {
                gens.push(Generator { z: g.z.add(h.z), k: g.k + h.k });
            }
        }
        IndexSet::from_generators(gens)
    }

    /// Extended union: `I ∪ J` together with `(z, l1 + l2 + 1)` at every
    /// exponent `z` common to both closed sets.
    ///
    /// The log profile of each set is a step function that only jumps at its
    /// generators, and the combined profile at `z` is `f_I(z) + f_J(z) + 1` with
    /// an absent exponent counted as `-1`. Evaluating it at all generator
    /// exponents therefore yields a complete generator list.
    pub fn extended_union(&self, other: &IndexSet) -> IndexSet {
        let candidates = self.gens.iter().chain(&other.gens).map(|g| g.z);
        let gens: Vec<Generator> = candidates
            .filter_map(|z| {
                let fi = self.profile(z).map_or(-1, i64::from);
                let fj = other.profile(z).map_or(-1, i64::from);
                let f = fi + fj + 1;
                (f >= 0).then_some(Generator { z, k: f as u32 })
            })
            .collect();
        IndexSet::from_generators(gens)
    }

    /// `I + r`: every exponent shifted by the real number `r`.
    pub fn shift(&self, r: f64) -> IndexSet {
        IndexSet::from_generators(self.gens.iter().map(|g| Generator {
            z: Exponent::new(g.z.re + r, g.z.im),
            k: g.k,
        }))
    }

    /// `aI`: the minimal elements scaled by `a`, then closed again.
    pub fn scale(&self, a: u32) -> IndexSet {
        let a = f64::from(a);
        IndexSet::from_generators(self.gens.iter().map(|g| Generator {
            z: Exponent::new(a * g.z.re, a * g.z.im),
            k: g.k,
        }))
    }

    /// `I > α`.
    pub fn greater_than(&self, alpha: f64) -> bool {
        self.gens.iter().all(|g| g.z.re > alpha + EXP_TOL)
    }

    /// `I ≥ α`: real parts at least `α`, and no logarithms at real part `α`.
    pub fn geq(&self, alpha: f64) -> bool {
        self.gens.iter().all(|g| {
            g.z.re > alpha + EXP_TOL || ((g.z.re - alpha).abs() <= EXP_TOL && g.k == 0)
        })
    }

    /// Smallest real part together with the largest log power attained there.
    pub fn leading(&self) -> Option<(f64, u32)> {
        let min = self.gens.iter().map(|g| g.z.re).min_by(f64::total_cmp)?;
        let k = self
            .gens
            .iter()
            .filter(|g| (g.z.re - min).abs() <= EXP_TOL)
            .map(|g| g.k)
            .max()
            .unwrap_or(0);
        Some((min, k))
    }

    /// All elements with `Re z <= cutoff`, sorted.
    pub fn elements_up_to(&self, cutoff: f64) -> Vec<(Exponent, u32)> {
        let mut out: Vec<(Exponent, u32)> = Vec::new();
        for g in &self.gens {
            let mut n = 0.0;
            while g.z.re + n <= cutoff + EXP_TOL {
                let z = Exponent::new(g.z.re + n, g.z.im);
                for k in 0..=g.k {
                    if !out.iter().any(|(w, l)| *l == k && w.approx_eq(z)) {
                        out.push((z, k));
                    }
                }
                n += 1.0;
            }
        }
        out.sort_by(|a, b| {
            a.0.im.total_cmp(&b.0.im).then(a.0.re.total_cmp(&b.0.re)).then(a.1.cmp(&b.1))
        });
        out
    }

    /// True when every element of `self` belongs to `other`.
    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.gens.iter().all(|g| other.contains(g.z, g.k))
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "∅");
        }
        write!(f, "{{")?;
        for (i, g) in self.gens.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if g.z.im == 0.0 {
                write!(f, "({}, {})", g.z.re, g.k)?;
            } else {
                write!(f, "({}{:+}i, {})", g.z.re, g.z.im, g.k)?;
            }
        }
        write!(f, "}}")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorJson {
    re: f64,
    im: f64,
    k: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IndexSetJson {
    empty: bool,
    generators: Vec<GeneratorJson>,
}

impl Serialize for IndexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        IndexSetJson {
            empty: self.is_empty(),
            generators: self
                .gens
                .iter()
                .map(|g| GeneratorJson { re: g.z.re, im: g.z.im, k: i64::from(g.k) })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = IndexSetJson::deserialize(d)?;
        if raw.empty != raw.generators.is_empty() {
            return Err(D::Error::custom(
                "\"empty\" must be true exactly when the generator list is empty",
            ));
        }
        let gens: Vec<(f64, f64, i64)> = raw.generators.iter().map(|g| (g.re, g.im, g.k)).collect();
        IndexSet::make(&gens).map_err(D::Error::custom)
    }
}

/// Boundary hypersurfaces of the b- and φ-double spaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Face {
    Lf,
    Rf,
    Bf,
    Ff,
}

impl Face {
    pub const B_FACES: [Face; 3] = [Face::Lf, Face::Rf, Face::Bf];
    pub const PHI_FACES: [Face; 4] = [Face::Lf, Face::Rf, Face::Bf, Face::Ff];

    pub fn name(self) -> &'static str {
        match self {
            Face::Lf => "lf",
            Face::Rf => "rf",
            Face::Bf => "bf",
            Face::Ff => "ff",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    B,
    Phi,
}

/// An index set for each boundary hypersurface. b-type families have no `ff`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FamilyJson", into = "FamilyJson")]
pub struct IndexFamily {
    pub kind: FamilyKind,
    pub lf: IndexSet,
    pub rf: IndexSet,
    pub bf: IndexSet,
    pub ff: Option<IndexSet>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyJson {
    kind: FamilyKind,
    lf: IndexSet,
    rf: IndexSet,
    bf: IndexSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ff: Option<IndexSet>,
}

impl TryFrom<FamilyJson> for IndexFamily {
    type Error = String;
    fn try_from(j: FamilyJson) -> Result<Self, String> {
        match (j.kind, &j.ff) {
            (FamilyKind::B, Some(_)) => Err("b-type families have no ff entry".into()),
            (FamilyKind::Phi, None) => Err("phi-type families need an ff entry".into()),
            _ => Ok(IndexFamily { kind: j.kind, lf: j.lf, rf: j.rf, bf: j.bf, ff: j.ff }),
        }
    }
}

impl From<IndexFamily> for FamilyJson {
    fn from(f: IndexFamily) -> Self {
        FamilyJson { kind: f.kind, lf: f.lf, rf: f.rf, bf: f.bf, ff: f.ff }
    }
}

impl IndexFamily {
    pub fn b(lf: IndexSet, rf: IndexSet, bf: IndexSet) -> Self {
        IndexFamily { kind: FamilyKind::B, lf, rf, bf, ff: None }
    }

    pub fn phi(lf: IndexSet, rf: IndexSet, bf: IndexSet, ff: IndexSet) -> Self {
        IndexFamily { kind: FamilyKind::Phi, lf, rf, bf, ff: Some(ff) }
    }

    /// The family of the small φ-calculus: `(∅, ∅, ∅, 0)`.
    pub fn small_phi() -> Self {
        IndexFamily::phi(IndexSet::empty(), IndexSet::empty(), IndexSet::empty(), IndexSet::real(0.0))
    }

    pub fn faces(&self) -> &'static [Face] {
        match self.kind {
            FamilyKind::B => &Face::B_FACES,
            FamilyKind::Phi => &Face::PHI_FACES,
        }
    }

    pub fn get(&self, face: Face) -> Option<&IndexSet> {
        match face {
            Face::Lf => Some(&self.lf),
            Face::Rf => Some(&self.rf),
            Face::Bf => Some(&self.bf),
            Face::Ff => self.ff.as_ref(),
        }
    }

    pub fn get_mut(&mut self, face: Face) -> Option<&mut IndexSet> {
        match face {
            Face::Lf => Some(&mut self.lf),
            Face::Rf => Some(&mut self.rf),
            Face::Bf => Some(&mut self.bf),
            Face::Ff => self.ff.as_mut(),
        }
    }

    /// Swaps the roles of `lf` and `rf` (adjoint).
    pub fn swapped(&self) -> Self {
        let mut out = self.clone();
        std::mem::swap(&mut out.lf, &mut out.rf);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(g: &[(f64, u32)]) -> IndexSet {
        IndexSet::from_generators(g.iter().map(|&(re, k)| Generator::real(re, k)))
    }

    #[test]
    fn empty_generators_give_empty_set() {
        assert!(IndexSet::make(&[]).unwrap().is_empty());
    }

    #[test]
    fn dominated_generator_is_dropped() {
        assert_eq!(set(&[(0.0, 0), (1.0, 0)]), set(&[(0.0, 0)]));
        assert_eq!(set(&[(0.0, 0), (0.0, 0)]).generators().len(), 1);
    }

    #[test]
    fn membership_of_log_generator() {
        let s = set(&[(0.0, 1)]);
        for (re, k) in [(0.0, 0), (0.0, 1), (1.0, 1), (2.0, 0)] {
            assert!(s.contains(Exponent::real(re), k));
        }
        assert!(!s.contains(Exponent::real(-1.0), 0));
        assert!(!s.contains(Exponent::real(0.0), 2));
        assert!(!s.contains(Exponent::real(0.5), 0));
    }

    #[test]
    fn negative_log_power_rejected() {
        assert!(IndexSet::make(&[(0.0, 0.0, -1)]).is_err());
    }

    #[test]
    fn addition_rules() {
        let i = set(&[(0.5, 1), (2.25, 0)]);
        assert!(i.add(&IndexSet::empty()).is_empty());
        assert_eq!(i.add(&IndexSet::real(0.0)), i);
        assert_eq!(set(&[(1.0, 0)]).add(&set(&[(1.0, 0)])), set(&[(2.0, 0)]));
    }

    #[test]
    fn extended_union_examples() {
        let j = set(&[(1.5, 2)]);
        assert_eq!(IndexSet::empty().extended_union(&j), j);
        assert_eq!(set(&[(0.0, 0)]).extended_union(&set(&[(0.0, 0)])), set(&[(0.0, 1)]));
        assert_eq!(set(&[(0.0, 0)]).extended_union(&set(&[(1.0, 0)])), set(&[(0.0, 0), (1.0, 1)]));
        assert_eq!(set(&[(1.0, 0)]).extended_union(&set(&[(2.0, 0)])), set(&[(1.0, 0), (2.0, 1)]));
    }

    #[test]
    fn shift_and_scale() {
        assert!(IndexSet::empty().shift(5.0).is_empty());
        assert_eq!(set(&[(0.0, 1)]).shift(2.0), set(&[(2.0, 1)]));
        assert_eq!(set(&[(-1.0, 0)]).scale(2), set(&[(-2.0, 0)]));
        assert_eq!(set(&[(1.0, 0), (2.0, 1)]).scale(2), set(&[(2.0, 0), (4.0, 1)]));
    }

    #[test]
    fn order_comparisons() {
        assert!(IndexSet::empty().greater_than(1e6));
        assert!(set(&[(0.0, 0)]).geq(0.0));
        assert!(!set(&[(0.0, 1)]).geq(0.0));
        assert!(set(&[(0.5, 0)]).greater_than(0.0));
        assert!(!set(&[(0.5, 0)]).greater_than(0.5));
    }

    #[test]
    fn complex_exponents_live_in_separate_lattices() {
        let s = IndexSet::from_generators([Generator::new(0.0, 1.0, 0), Generator::new(0.0, 0.0, 0)]);
        assert_eq!(s.generators().len(), 2);
        assert!(s.contains(Exponent::new(3.0, 1.0), 0));
        assert!(!s.contains(Exponent::new(3.0, 0.5), 0));
    }

    #[test]
    fn json_round_trip() {
        let s = set(&[(0.0, 1), (0.5, 0)]);
        let text = serde_json::to_string(&s).unwrap();
        let back: IndexSet = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<IndexSet>(r#"{"empty":true,"generators":[{"re":0,"im":0,"k":0}]}"#).is_err());
        assert!(serde_json::from_str::<IndexSet>(r#"{"empty":false,"generators":[],"x":1}"#).is_err());
    }

    #[test]
    fn family_kind_checks_ff() {
        let bad = r#"{"kind":"b","lf":{"empty":true,"generators":[]},"rf":{"empty":true,"generators":[]},"bf":{"empty":true,"generators":[]},"ff":{"empty":true,"generators":[]}}"#;
        assert!(serde_json::from_str::<IndexFamily>(bad).is_err());
        let fam = IndexFamily::small_phi();
        let back: IndexFamily = serde_json::from_str(&serde_json::to_string(&fam).unwrap()).unwrap();
        assert_eq!(back, fam);
    }
}
