//! Indicial roots of the b = f = 1 torus model in both conventions, per mode.
use std::f64::consts::PI;

use phicalc::model::{imspec, Component, Convention, ImspecConfig, ModelGeometry};

fn main() -> phicalc::Result<()> {
    let model = ModelGeometry::torus(1, vec![2.0 * PI], vec![2.0 * PI]);
    let runs = [
        (Convention::Flat, Component::Scalar),
        (Convention::Flat, Component::Full),
        (Convention::Geometric, Component::FibreDegree(0)),
        (Convention::Geometric, Component::FibreDegree(1)),
    ];
    for (conv, comp) in runs {
        let res = imspec(&model, &ImspecConfig::new((-2.5, 2.5), 2, conv, comp))?;
        println!("{conv:?} {comp:?}");
        for p in &res.points {
            println!(
                "  mode {:?}  root {:>12.9}  k = {}  det order {}{}",
                p.fourier_mode,
                p.lambda_root,
                p.pole_order_k,
                p.det_order,
                if p.order_mismatch { "  (orders differ)" } else { "" }
            );
        }
        for w in &res.warnings {
            println!("  warning: {w}");
        }
    }
    Ok(())
}
