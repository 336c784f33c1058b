use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::geometry::FourierMode;
use crate::error::{PhiError, Result};
use crate::extreal;

/// Local slope above which decay counts as faster than any power.
pub const SUPERPOLY_SLOPE: f64 = 10.0;
/// Margin on exponents when deciding `w > γ` from a fit.
pub const L2_MARGIN: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitWindow {
    pub lo: f64,
    pub hi: f64,
}

impl Default for FitWindow {
    fn default() -> Self {
        FitWindow { lo: 1e-4, hi: 1e-2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicFit {
    pub mode: FourierMode,
    pub fibre_degree: u32,
    /// Exponent of the pointwise norm; `inf` when superpolynomial.
    #[serde(with = "extreal")]
    pub fitted_exponent: f64,
    pub fitted_log_power: u32,
    pub residual: f64,
    pub superpolynomial_flag: bool,
}

/// Raw outcome of fitting samples, before mode bookkeeping.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    #[serde(with = "extreal")]
    pub exponent: f64,
    pub log_power: u32,
    pub residual: f64,
    pub superpolynomial: bool,
}

fn least_squares(cols: &[Vec<f64>], y: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = y.len();
    let a = DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i]);
    let b = DVector::from_column_slice(y);
    let sol = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| PhiError::Numerics(format!("least squares failed: {e}")))?;
    let r = &a * &sol - b;
    Ok((sol.iter().copied().collect(), (r.norm_squared() / n as f64).sqrt()))
}

/// Fits `|u| ≈ C x^w |log x|^k` on the window.
pub fn fit_samples(x: &[f64], u: &[f64], window: FitWindow) -> Result<PowerFit> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(u)
        .filter(|(x, _)| **x >= window.lo && **x <= window.hi)
        .map(|(x, u)| (*x, u.abs()))
        .collect();
    if pts.len() < 8 {
        return Err(PhiError::Numerics("fewer than 8 samples in the fit window".into()));
    }
    if pts.iter().any(|(_, u)| *u == 0.0 || !u.is_normal()) {
        return Ok(PowerFit { exponent: f64::INFINITY, log_power: 0, residual: 0.0, superpolynomial: true });
    }
    let mut sorted = pts.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let rel = 1e-12;
    let increasing = sorted.windows(2).all(|w| w[1].1 >= w[0].1 * (1.0 - rel));
    let decreasing = sorted.windows(2).all(|w| w[1].1 <= w[0].1 * (1.0 + rel));
    if !(increasing || decreasing) {
        return Err(PhiError::Numerics("|u| is not monotone in the fit window".into()));
    }
    let lx: Vec<f64> = sorted.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = sorted.iter().map(|p| p.1.ln()).collect();

    let quarter = lx.len() / 4;
    let slopes: Vec<f64> = (0..4)
        .map(|q| {
            let r = q * quarter..if q == 3 { lx.len() } else { (q + 1) * quarter };
            let ones = vec![1.0; r.len()];
            least_squares(&[ones, lx[r.clone()].to_vec()], &ly[r]).map(|(c, _)| c[1])
        })
        .collect::<Result<_>>()?;
    // Sub-windows run from small x outwards, so inward growth means decreasing index order.
    let inward_growth = slopes.windows(2).all(|w| w[0] > w[1] * (1.0 + 1e-6));
    if slopes.iter().all(|s| *s > SUPERPOLY_SLOPE) && inward_growth {
        return Ok(PowerFit { exponent: f64::INFINITY, log_power: 0, residual: 0.0, superpolynomial: true });
    }

    let ones = vec![1.0; lx.len()];
    let llx: Vec<f64> = lx.iter().map(|l| l.abs().ln()).collect();
    let (joint, _) = least_squares(&[ones.clone(), lx.clone(), llx.clone()], &ly)?;
    let k = joint[2].round().max(0.0) as u32;
    let y: Vec<f64> = ly.iter().zip(&llx).map(|(y, l)| y - f64::from(k) * l).collect();
    let (c, residual) = least_squares(&[ones, lx], &y)?;
    Ok(PowerFit { exponent: c[1], log_power: k, residual, superpolynomial: false })
}

/// `x^w (log x)^k ∈ x^γ L²(dx/x)` near `x = 0` iff `w > γ`.
pub fn l2_admissible(w: f64, gamma: f64) -> bool {
    w > gamma
}

/// L² membership decided from a fit.
pub fn check_l2(fit: &PowerFit, gamma: f64) -> bool {
    fit.superpolynomial || fit.exponent > gamma + L2_MARGIN
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<f64> {
        (0..=2048).map(|i| (-12.0 * i as f64 / 2048.0).exp()).collect()
    }

    #[test]
    fn pure_power() {
        let x = grid();
        let u: Vec<f64> = x.iter().map(|x| x.powf(0.618034)).collect();
        let f = fit_samples(&x, &u, FitWindow::default()).unwrap();
        assert!((f.exponent - 0.618034).abs() < 1e-6);
        assert_eq!(f.log_power, 0);
    }

    #[test]
    fn power_with_log() {
        let x = grid();
        let u: Vec<f64> = x.iter().map(|x| x * x.ln()).collect();
        let f = fit_samples(&x, &u, FitWindow::default()).unwrap();
        assert!((f.exponent - 1.0).abs() < 1e-6);
        assert_eq!(f.log_power, 1);
    }

    #[test]
    fn constants_and_superpolynomial() {
        let x = grid();
        let f = fit_samples(&x, &vec![3.0; x.len()], FitWindow::default()).unwrap();
        assert!(f.exponent.abs() < 1e-9);
        let u: Vec<f64> = x.iter().map(|x| (-1.0 / x).exp()).collect();
        assert!(fit_samples(&x, &u, FitWindow::default()).unwrap().superpolynomial);
        let u: Vec<f64> = x.iter().map(|x| (-0.2 / x).exp()).collect();
        assert!(fit_samples(&x, &u, FitWindow::default()).unwrap().superpolynomial);
        let u: Vec<f64> = x.iter().map(|x| x.powi(12)).collect();
        assert!(!fit_samples(&x, &u, FitWindow::default()).unwrap().superpolynomial);
    }

    #[test]
    fn oscillation_is_rejected() {
        let x = grid();
        let u: Vec<f64> = x.iter().map(|x| x * (2.0 + (40.0 * x.ln()).sin())).collect();
        assert!(fit_samples(&x, &u, FitWindow::default()).is_err());
    }

    #[test]
    fn l2_rule() {
        for w in [-1.0, -0.25, 0.25, 2.0] {
            let f = PowerFit { exponent: w, log_power: 0, residual: 0.0, superpolynomial: false };
            assert_eq!(check_l2(&f, 0.0), l2_admissible(w, 0.0));
        }
    }
}
