//! Smallest singular value of the normal family against √(λ₁ + τ² + η²).
use std::f64::consts::PI;

use phicalc::model::{linspace, normal_family_gap, ModelGeometry};

fn main() -> phicalc::Result<()> {
    for fiber in [2.0 * PI, PI] {
        let model = ModelGeometry::torus(1, vec![2.0 * PI], vec![fiber]);
        let grid = linspace(-5.0, 5.0, 21);
        let rep = normal_family_gap(&model, &grid, &grid, 2)?;
        let worst = rep.samples.iter().map(|s| (s.gap - s.expected).abs()).fold(0.0, f64::max);
        println!(
            "fibre circumference {fiber:.4}: λ₁ = {:?}, min gap {:.6}, max deviation {worst:.2e}, invertible {}",
            rep.lambda_one, rep.min_gap, rep.normal_invertible
        );
    }
    Ok(())
}
