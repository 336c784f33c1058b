mod common;

use common::{to_set, Trunc};
use phicalc::index_algebra::{Exponent, Generator, IndexSet};
use proptest::prelude::*;

const CUTOFF: f64 = 8.0;

fn gens(lo: i32, hi: i32) -> impl Strategy<Value = Vec<(f64, f64, u32)>> {
    prop::collection::vec(((lo * 4)..=(hi * 4), prop::bool::weighted(0.2), 0u32..=2), 0..4)
        .prop_map(|v| v.into_iter().map(|(r, im, k)| (f64::from(r) / 4.0, if im { 0.5 } else { 0.0 }, k)).collect())
}

fn nonneg() -> impl Strategy<Value = Vec<(f64, f64, u32)>> {
    gens(0, 3)
}

fn trunc(s: &IndexSet) -> Trunc {
    Trunc::of_set(s, CUTOFF)
}

proptest! {
    #[test]
    fn membership_matches_closure(g in gens(-2, 4)) {
        let set = to_set(&g);
        let oracle = Trunc::closure(&g, CUTOFF);
        for r in -8..=32 {
            for im in [0.0, 0.5] {
                for k in 0..=3 {
                    let re = f64::from(r) / 4.0;
                    prop_assert_eq!(set.contains(Exponent::new(re, im), k), oracle.contains(re, im, k), "({}, {}, {})", re, im, k);
                }
            }
        }
    }

    #[test]
    fn canonical_form_has_no_dominated_generator(g in gens(-2, 4)) {
        let set = to_set(&g);
        let gs = set.generators();
        for (a, x) in gs.iter().enumerate() {
            for (b, y) in gs.iter().enumerate() {
                if a != b {
                    prop_assert!(!(y.z.is_above_in_lattice(x.z) && y.k <= x.k), "{:?} dominates {:?}", x, y);
                }
            }
        }
        prop_assert_eq!(IndexSet::from_generators(gs.iter().copied()), set.clone());
    }

    #[test]
    fn add_is_commutative_and_associative(a in nonneg(), b in nonneg(), c in nonneg()) {
        let (i, j, k) = (to_set(&a), to_set(&b), to_set(&c));
        prop_assert_eq!(i.add(&j), j.add(&i));
        prop_assert_eq!(trunc(&i.add(&j).add(&k)), trunc(&i.add(&j.add(&k))));
        let oracle = Trunc::closure(&a, CUTOFF).add(&Trunc::closure(&b, CUTOFF));
        prop_assert_eq!(trunc(&i.add(&j)), oracle);
    }

    #[test]
    fn extended_union_matches_formula(a in gens(-2, 4), b in gens(-2, 4)) {
        let (i, j) = (to_set(&a), to_set(&b));
        let oracle = Trunc::closure(&a, CUTOFF).ext_union(&Trunc::closure(&b, CUTOFF));
        prop_assert_eq!(trunc(&i.extended_union(&j)), oracle);
        prop_assert_eq!(i.extended_union(&j), j.extended_union(&i));
    }

    #[test]
    fn extended_union_contains_union_with_equality_iff_disjoint(a in gens(-2, 4), b in gens(-2, 4)) {
        let (i, j) = (to_set(&a), to_set(&b));
        let u = trunc(&i.extended_union(&j));
        let (ti, tj) = (trunc(&i), trunc(&j));
        let mut plain = ti.clone();
        for (z, k) in &tj.max_k {
            let e = plain.max_k.entry(*z).or_insert(*k);
            *e = (*e).max(*k);
        }
        for (z, k) in &plain.max_k {
            prop_assert!(u.max_k.get(z).is_some_and(|m| m >= k));
        }
        let shared = ti.max_k.keys().any(|z| tj.max_k.contains_key(z));
        prop_assert_eq!(u == plain, !shared);
    }

    #[test]
    fn extended_union_associativity_is_checked(a in gens(-1, 3), b in gens(-1, 3), c in gens(-1, 3)) {
        let (i, j, k) = (to_set(&a), to_set(&b), to_set(&c));
        let left = trunc(&i.extended_union(&j).extended_union(&k));
        let right = trunc(&i.extended_union(&j.extended_union(&k)));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn canonicalization_is_idempotent(g in gens(-2, 4)) {
        let once = to_set(&g);
        let twice = IndexSet::from_generators(once.generators().iter().copied());
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn order_is_monotone_under_addition(a in gens(-2, 4), b in gens(-2, 4), alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        let (i, j) = (to_set(&a), to_set(&b));
        if i.greater_than(alpha) && j.greater_than(beta) {
            prop_assert!(i.add(&j).greater_than(alpha + beta));
        }
    }

    #[test]
    fn shift_and_scale_move_minimal_elements(g in gens(-2, 4), r in -8i32..8, s in 1u32..4) {
        let i = to_set(&g);
        let r = f64::from(r) / 4.0;
        let expected_shift: Vec<(f64, f64, u32)> = g.iter().map(|&(re, im, k)| (re + r, im, k)).collect();
        prop_assert_eq!(i.shift(r), to_set(&expected_shift));
        let expected_scale: Vec<Generator> = i
            .generators()
            .iter()
            .map(|gen| Generator::new(gen.z.re * f64::from(s), gen.z.im * f64::from(s), gen.k))
            .collect();
        prop_assert_eq!(i.scale(s), IndexSet::from_generators(expected_scale));
    }
}

#[test]
fn empty_set_rules() {
    let i = to_set(&[(0.0, 0.0, 1), (0.5, 0.0, 0)]);
    let e = IndexSet::empty();
    assert_eq!(i.extended_union(&e), i);
    assert!(i.add(&e).is_empty());
    assert!(e.add(&IndexSet::real(2.0)).is_empty());
    assert_eq!(i.add(&IndexSet::real(0.0)), i);
    assert!(e.greater_than(1e6));
}

#[test]
fn documented_examples() {
    let log = to_set(&[(0.0, 0.0, 1)]);
    for (re, k, inside) in [(0.0, 0, true), (0.0, 1, true), (1.0, 1, true), (2.0, 0, true), (-1.0, 0, false), (0.0, 2, false)] {
        assert_eq!(log.contains(Exponent::real(re), k), inside, "({re}, {k})");
    }
    assert_eq!(to_set(&[(0.0, 0.0, 0), (1.0, 0.0, 0)]).generators().len(), 1);
    let zero = IndexSet::real(0.0);
    assert_eq!(zero.extended_union(&zero), to_set(&[(0.0, 0.0, 1)]));
    assert_eq!(zero.extended_union(&IndexSet::real(1.0)), to_set(&[(0.0, 0.0, 0), (1.0, 0.0, 1)]));
    assert_eq!(IndexSet::real(-1.0).scale(2), IndexSet::real(-2.0));
    assert!(zero.geq(0.0) && !log.geq(0.0));
    assert!(IndexSet::real(0.5).greater_than(0.0) && !IndexSet::real(0.5).greater_than(0.5));
}
