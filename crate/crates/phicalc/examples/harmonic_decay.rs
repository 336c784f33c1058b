//! Solves the separated harmonic equation mode by mode on the b = f = a = 1
//! torus model and checks the fitted decay against indicial predictions.
use std::f64::consts::PI;

use phicalc::model::{verify_predictions, ModelGeometry, VerifyConfig};

fn main() -> phicalc::Result<()> {
    let model = ModelGeometry::torus(1, vec![2.0 * PI], vec![2.0 * PI]);
    let report = verify_predictions(&model, &VerifyConfig::default())?;
    for v in &report.modes {
        let fit = v.fit.as_ref().map_or("rejected".to_string(), |f| {
            format!("w = {:>10.6} k = {} superpoly = {}", f.fitted_exponent, f.fitted_log_power, f.superpolynomial_flag)
        });
        println!(
            "[{}] {} L={}  {}  predicted L² {}  cond {:.2e}",
            if v.pass { "PASS" } else { "FAIL" },
            v.mode,
            v.fibre_degree,
            fit,
            v.predicted_l2,
            v.condition
        );
    }
    println!("convergence ratios {:?}", report.convergence.ratios);
    for n in &report.convention_notes {
        println!("mode {:?} L={}: flat roots {:?}, geometric exponent {:.6}", n.base_mode, n.fibre_degree, n.flat_roots, n.geometric_exponent);
    }
    println!("overall: {}", if report.pass { "PASS" } else { "FAIL" });
    Ok(())
}
