//! Index-set arithmetic: closure, addition, extended union, shift and scale.
use phicalc::index_algebra::{Generator, IndexSet};

fn main() {
    let i = IndexSet::from_generators([Generator::real(0.0, 0)]);
    let j = IndexSet::from_generators([Generator::real(1.0, 0)]);
    let log = IndexSet::from_generators([Generator::real(0.0, 1)]);

    println!("I = {i}, J = {j}, L = {log}");
    println!("I + J       = {}", i.add(&j));
    println!("I ∪̄ I       = {}", i.extended_union(&i));
    println!("I ∪̄ J       = {}", i.extended_union(&j));
    println!("L + 2       = {}", log.shift(2.0));
    println!("2·(-1)      = {}", IndexSet::real(-1.0).scale(2));
    println!("I ∪̄ ∅       = {}", i.extended_union(&IndexSet::empty()));
    println!("I + ∅ empty = {}", i.add(&IndexSet::empty()).is_empty());
    println!("L ≥ 0: {}   I ≥ 0: {}   ∅ > 1e6: {}", log.geq(0.0), i.geq(0.0), IndexSet::empty().greater_than(1e6));
    println!("elements of L up to Re z ≤ 3:");
    for (z, k) in log.elements_up_to(3.0) {
        println!("  ({}, {k})", z.re);
    }
}
