//! Sweeps weights through the Fredholm gates of a split operator whose
//! indicial spectrum comes from the torus model.
use std::f64::consts::PI;

use phicalc::model::{imspec, Component, Convention, ImspecConfig, ModelGeometry};
use phicalc::split::{fredholm_report, regularity_predict, RegularityStatement, SplitOperator};

fn main() -> phicalc::Result<()> {
    let model = ModelGeometry::torus(1, vec![2.0 * PI], vec![2.0 * PI]);
    let res = imspec(&model, &ImspecConfig::new((-5.5, 5.5), 5, Convention::Flat, Component::Scalar))?;
    let op = SplitOperator::differential(1, 1, 1, res.roots.clone()).with_spec_b(res.spec_b());
    for i in -6..=6 {
        let alpha = f64::from(i) / 2.0;
        let rep = fredholm_report(&op, alpha)?;
        let marks: Vec<&str> = rep.maps.iter().map(|m| if m.admissible { "Fredholm" } else { "gated" }).collect();
        println!("α = {alpha:>5}: {}", marks.join(" | "));
    }
    let pred = regularity_predict(&op, 0.5, RegularityStatement::SplitSobolev)?;
    println!("regularity at α = 0.5: Π part {}, Π⊥ part {}", pred.pi.index_set, pred.perp.index_set);
    Ok(())
}
