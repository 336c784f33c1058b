//! Brute-force oracles shared by the integration and acceptance tests.
//!
//! Exponents live on a quarter-unit lattice so truncated sets are exact maps
//! from `(4·Re z, 4·Im z)` to the largest log power present there.
#![allow(dead_code)]

use std::collections::BTreeMap;

use phicalc::index_algebra::{Generator, IndexFamily, IndexSet};
use rand::Rng;

pub const Q: f64 = 4.0;

/// A closed index set truncated at `Re z ≤ cutoff`: exponent → max log power.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trunc {
    pub cutoff: i64,
    pub max_k: BTreeMap<(i64, i64), u32>,
}

fn key(re: f64, im: f64) -> (i64, i64) {
    let (r, i) = (re * Q, im * Q);
    assert!((r - r.round()).abs() < 1e-9 && (i - i.round()).abs() < 1e-9, "exponent {re}+{im}i is off the test lattice");
    (r.round() as i64, i.round() as i64)
}

impl Trunc {
    pub fn new(cutoff: f64) -> Self {
        Trunc { cutoff: (cutoff * Q).round() as i64, max_k: BTreeMap::new() }
    }

    fn bump(&mut self, z: (i64, i64), k: u32) {
        if z.0 <= self.cutoff {
            let e = self.max_k.entry(z).or_insert(k);
            *e = (*e).max(k);
        }
    }

    /// Closure of raw generators `(re, im, k)` under `z → z+1` and lowering `k`.
    pub fn closure(gens: &[(f64, f64, u32)], cutoff: f64) -> Self {
        let mut t = Trunc::new(cutoff);
        for &(re, im, k) in gens {
            let (mut r, i) = key(re, im);
            while r <= t.cutoff {
                t.bump((r, i), k);
                r += Q as i64;
            }
        }
        t
    }

    /// The elements an `IndexSet` reports below the cutoff.
    pub fn of_set(set: &IndexSet, cutoff: f64) -> Self {
        let mut t = Trunc::new(cutoff);
        for (z, k) in set.elements_up_to(cutoff) {
            t.bump(key(z.re, z.im), k);
        }
        t
    }

    pub fn contains(&self, re: f64, im: f64, k: u32) -> bool {
        self.max_k.get(&key(re, im)).is_some_and(|m| k <= *m)
    }

    /// `{(z+z', k+k')}`; exact below the cutoff when both operands have `Re ≥ 0`.
    pub fn add(&self, other: &Trunc) -> Trunc {
        let mut t = Trunc { cutoff: self.cutoff, max_k: BTreeMap::new() };
        for (z1, k1) in &self.max_k {
            for (z2, k2) in &other.max_k {
                t.bump((z1.0 + z2.0, z1.1 + z2.1), k1 + k2);
            }
        }
        t
    }

    /// `I ∪ J ∪ {(z, l₁+l₂+1)}` evaluated pointwise on the closed sets.
    pub fn ext_union(&self, other: &Trunc) -> Trunc {
        let mut t = self.clone();
        for (z, k) in &other.max_k {
            match self.max_k.get(z) {
                Some(k1) => t.max_k.insert(*z, k1 + k + 1),
                None => t.max_k.insert(*z, *k),
            };
        }
        t
    }

    pub fn shift(&self, r: f64) -> Trunc {
        let d = key(r, 0.0).0;
        let mut t = Trunc { cutoff: self.cutoff, max_k: BTreeMap::new() };
        for (z, k) in &self.max_k {
            t.bump((z.0 + d, z.1), *k);
        }
        t
    }
}

/// Random generators on the lattice: `Re ∈ [lo, hi]` in quarter steps, `Im ∈ {0, ½}`, `k ≤ 2`.
pub fn random_gens<R: Rng>(rng: &mut R, lo: f64, hi: f64, max_gens: usize) -> Vec<(f64, f64, u32)> {
    let n = rng.gen_range(0..=max_gens);
    let steps = ((hi - lo) * Q).round() as i64;
    (0..n)
        .map(|_| {
            let re = lo + rng.gen_range(0..=steps) as f64 / Q;
            let im = if rng.gen_bool(0.2) { 0.5 } else { 0.0 };
            (re, im, rng.gen_range(0..=2))
        })
        .collect()
}

pub fn to_set(gens: &[(f64, f64, u32)]) -> IndexSet {
    IndexSet::from_generators(gens.iter().map(|&(re, im, k)| Generator::new(re, im, k)))
}

/// Generator lists for the four faces of a φ-family.
#[derive(Clone, Debug)]
pub struct RawFamily {
    pub lf: Vec<(f64, f64, u32)>,
    pub rf: Vec<(f64, f64, u32)>,
    pub bf: Vec<(f64, f64, u32)>,
    pub ff: Vec<(f64, f64, u32)>,
}

impl RawFamily {
    /// `lf` and `rf` strictly positive so `I_rf + J_lf > 0` always holds.
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        RawFamily {
            lf: random_gens(rng, 0.25, 3.0, 3),
            rf: random_gens(rng, 0.25, 3.0, 3),
            bf: random_gens(rng, 0.0, 3.0, 3),
            ff: random_gens(rng, 0.0, 3.0, 3),
        }
    }

    pub fn family(&self) -> IndexFamily {
        IndexFamily::phi(to_set(&self.lf), to_set(&self.rf), to_set(&self.bf), to_set(&self.ff))
    }

    pub fn face(&self, name: &str, cutoff: f64) -> Trunc {
        let g = match name {
            "lf" => &self.lf,
            "rf" => &self.rf,
            "bf" => &self.bf,
            "ff" => &self.ff,
            _ => panic!("unknown face {name}"),
        };
        Trunc::closure(g, cutoff)
    }
}

/// One summand of a composition display: faces of the left factor `I` and right
/// factor `J` to be added, plus whether the front-face shift `A` is applied.
type Term = (&'static [(&'static str, &'static str)], bool);

/// The four composition formulas transcribed as data; each face is the extended
/// union of its terms.
pub const COMPOSITION_TABLE: [(&str, &[Term]); 4] = [
    ("lf", &[(&[("I", "lf")], false), (&[("I", "bf"), ("J", "lf")], false), (&[("I", "ff"), ("J", "lf")], false)]),
    ("rf", &[(&[("J", "rf")], false), (&[("I", "rf"), ("J", "bf")], false), (&[("I", "rf"), ("J", "ff")], false)]),
    (
        "bf",
        &[
            (&[("I", "lf"), ("J", "rf")], false),
            (&[("I", "bf"), ("J", "bf")], false),
            (&[("I", "ff"), ("J", "bf")], false),
            (&[("I", "bf"), ("J", "ff")], false),
        ],
    ),
    ("ff", &[(&[("I", "lf"), ("J", "rf")], true), (&[("I", "bf"), ("J", "bf")], true), (&[("I", "ff"), ("J", "ff")], false)]),
];

/// Evaluates the composition table on brute-force truncations.
pub fn compose_by_table(i: &RawFamily, j: &RawFamily, big_a: f64, cutoff: f64) -> BTreeMap<&'static str, Trunc> {
    let mut out = BTreeMap::new();
    for (face, terms) in COMPOSITION_TABLE {
        let mut acc: Option<Trunc> = None;
        for (summands, shifted) in terms {
            let mut t: Option<Trunc> = None;
            for (side, f) in *summands {
                let s = if *side == "I" { i.face(f, cutoff) } else { j.face(f, cutoff) };
                t = Some(match t {
                    None => s,
                    Some(prev) => prev.add(&s),
                });
            }
            let mut t = t.expect("nonempty term");
            if *shifted {
                t = t.shift(big_a);
            }
            acc = Some(match acc {
                None => t,
                Some(prev) => prev.ext_union(&t),
            });
        }
        out.insert(face, acc.expect("nonempty face"));
    }
    out
}
