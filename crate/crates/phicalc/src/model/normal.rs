use nalgebra::{Complex, DMatrix};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::geometry::{clifford, lattice, ModelGeometry};
use crate::error::{PhiError, Result};

/// Gap tolerance below which the normal operator counts as non-invertible.
pub const GAP_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapSample {
    pub tau: f64,
    pub eta: f64,
    pub gap: f64,
    /// `√(λ₁ + τ² + η²)`.
    pub expected: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub lambda_one: Option<f64>,
    pub min_gap: f64,
    pub samples: Vec<GapSample>,
    pub normal_invertible: bool,
}

/// Smallest singular value of the symbol of the Gauss–Bonnet operator on
/// `F × W` at `(τ, η)`, over fibre-perpendicular Fourier modes.
///
/// `η` points along the first base direction.
pub fn normal_symbol_gap(model: &ModelGeometry, tau: f64, eta: f64, mode_cutoff: u32) -> Result<f64> {
    model.validate()?;
    let (b, f) = (model.b(), model.f());
    let cliff = clifford(1 + b + f);
    let dim = 1usize << (1 + b + f);
    let mut best = f64::INFINITY;
    for m in lattice(f, mode_cutoff.max(1)) {
        if m.iter().all(|j| *j == 0) {
            continue;
        }
        let zeta = model.zeta(&m);
        let mut coeffs = vec![tau];
        coeffs.extend((0..b).map(|i| if i == 0 { eta } else { 0.0 }));
        coeffs.extend(zeta);
        let mut sym = DMatrix::<Complex<f64>>::zeros(dim, dim);
        for (c, v) in cliff.iter().zip(&coeffs) {
            sym += c.map(|e| Complex::new(0.0, e * v));
        }
        best = best.min(sym.singular_values().min());
    }
    Ok(best)
}

/// Minimum gap over a grid of `(τ, η)` values.
pub fn normal_family_gap(model: &ModelGeometry, taus: &[f64], etas: &[f64], mode_cutoff: u32) -> Result<GapReport> {
    if taus.is_empty() || etas.is_empty() {
        return Err(PhiError::InvalidInput("gap grid must be nonempty".into()));
    }
    let lambda_one = model.lambda_one();
    let pts: Vec<(f64, f64)> = taus.iter().flat_map(|t| etas.iter().map(move |e| (*t, *e))).collect();
    let samples: Vec<GapSample> = pts
        .par_iter()
        .map(|(tau, eta)| {
            let gap = normal_symbol_gap(model, *tau, *eta, mode_cutoff)?;
            let expected = lambda_one.map_or(f64::INFINITY, |l| (l + tau * tau + eta * eta).sqrt());
            Ok(GapSample { tau: *tau, eta: *eta, gap, expected })
        })
        .collect::<Result<_>>()?;
    let min_gap = samples.iter().map(|s| s.gap).fold(f64::INFINITY, f64::min);
    Ok(GapReport { lambda_one, min_gap, normal_invertible: min_gap > GAP_TOL, samples })
}

/// `n` equally spaced points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}
