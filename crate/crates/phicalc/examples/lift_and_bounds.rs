//! Lifting a b-class to the φ-calculus, then testing weighted L² boundedness
//! and polyhomogeneous mapping.
use phicalc::calculus::{is_bounded, is_compact, lift_b_to_phi, map_phg, Geometry, Kind, OpClass, Spec};
use phicalc::index_algebra::{IndexFamily, IndexSet};

fn main() -> phicalc::Result<()> {
    let fam = IndexFamily::b(IndexSet::real(1.0), IndexSet::real(1.0), IndexSet::real(0.0));
    let t = OpClass::new(Kind::B, -2.0, Spec::Family(fam));
    for a in [1, 2] {
        let lifted = lift_b_to_phi(&t, Geometry::new(a, 1)?)?;
        println!("a = {a}: {t} lifts to {} + {}", lifted.main, lifted.residual);
    }
    for (alpha, beta) in [(0.0, 0.0), (0.5, 0.5), (-1.5, 0.0), (0.0, 1.0)] {
        println!(
            "x^{alpha}L² → x^{beta}L²: bounded {}, compact {}",
            is_bounded(&t, alpha, beta, 0.0)?,
            is_compact(&t, alpha, beta, 0.0)?
        );
    }
    println!("image of phg(0): {}", map_phg(&t, &IndexSet::real(0.0))?);
    Ok(())
}
