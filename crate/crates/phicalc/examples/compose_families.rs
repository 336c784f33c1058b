//! Composition of operator classes: full φ index families, weight classes and
//! the mixed b∘φ rule, with every applicable rule listed.
use phicalc::calculus::{compose_alternatives, Geometry, Kind, OpClass, Spec};
use phicalc::index_algebra::{IndexFamily, IndexSet};

fn main() -> phicalc::Result<()> {
    let geo = Geometry::new(1, 1)?;
    let fam = |lf: f64, rf: f64, bf: f64, ff: f64| {
        IndexFamily::phi(IndexSet::real(lf), IndexSet::real(rf), IndexSet::real(bf), IndexSet::real(ff))
    };
    let p = OpClass::new(Kind::Phi, -1.0, Spec::Family(fam(1.0, 0.5, 0.0, 0.0)));
    let q = OpClass::new(Kind::Phi, -2.0, Spec::Family(fam(0.5, 1.0, 0.0, 1.0)));
    let pairs = [
        ("full families", p.clone(), q.clone()),
        ("small ∘ full", OpClass::small(Kind::Phi, 1.0), q),
        ("φ weight ∘ φ weight", OpClass::weight(Kind::Phi, -1.0, 0.5), OpClass::weight(Kind::Phi, 0.0, 0.5)),
        ("b weight ∘ x φ weight", OpClass::weight(Kind::B, -1.0, 0.0), OpClass::weight(Kind::Phi, 0.0, 0.0).with_left(1.0)),
    ];
    for (label, l, r) in pairs {
        println!("{label}: {l} ∘ {r}");
        for c in compose_alternatives(&l, &r, Some(geo))? {
            println!("    = {c}");
        }
    }
    Ok(())
}
