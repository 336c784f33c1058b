//! Numerics for flat torus-bundle models `[0,1)_x × T^b × T^f`.
//!
//! Fourier reduction turns every question into per-mode problems: indicial
//! roots come from small dense matrices, the normal-family gap from Clifford
//! symbols, and decay rates from a second-order ODE in `t = −log x`.

pub mod fit;
pub mod geometry;
pub mod indicial;
pub mod normal;
pub mod ode;
pub mod verify;

use std::io::Write;

use crate::error::{PhiError, Result};

pub use fit::{check_l2, fit_samples, l2_admissible, FitWindow, HarmonicFit, PowerFit};
pub use geometry::{fibre_harmonic_basis, lattice, FibreForm, FourierMode, ModelGeometry, Torus};
pub use indicial::{imspec, Component, Convention, ImspecConfig, ImspecResult, IndicialFamily, SpectrumPoint};
pub use normal::{linspace, normal_family_gap, normal_symbol_gap, GapReport, GapSample};
pub use ode::{convergence_ratios, solve_harmonic, Grid, HarmonicSolution, SeparatedEquation};
pub use verify::{verify_predictions, ModeVerdict, VerifyConfig, VerifyReport};

fn csv_err(e: csv::Error) -> PhiError {
    PhiError::InvalidInput(format!("csv: {e}"))
}

fn mode_str(v: &[i32]) -> String {
    v.iter().map(i32::to_string).collect::<Vec<_>>().join(";")
}

/// Spectra CSV: `mode, lambda_root, pole_order_k`.
pub fn write_spectrum_csv<W: Write>(points: &[SpectrumPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["mode", "lambda_root", "pole_order_k"]).map_err(csv_err)?;
    for p in points {
        w.write_record([mode_str(&p.fourier_mode), format!("{}", p.lambda_root), p.pole_order_k.to_string()])
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| PhiError::InvalidInput(e.to_string()))
}

/// Fits CSV: `mode, exponent, log_power, residual, superpoly`.
pub fn write_fits_csv<W: Write>(fits: &[HarmonicFit], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["mode", "exponent", "log_power", "residual", "superpoly"]).map_err(csv_err)?;
    for f in fits {
        let mode = format!("b={} f={} L={}", mode_str(&f.mode.base), mode_str(&f.mode.fiber), f.fibre_degree);
        w.write_record([
            mode,
            if f.fitted_exponent.is_infinite() { "inf".into() } else { format!("{}", f.fitted_exponent) },
            f.fitted_log_power.to_string(),
            format!("{}", f.residual),
            f.superpolynomial_flag.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| PhiError::InvalidInput(e.to_string()))
}

/// Solution samples CSV: `x, u`.
pub fn write_solution_csv<W: Write>(sol: &HarmonicSolution, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "u"]).map_err(csv_err)?;
    for (x, u) in sol.x.iter().zip(&sol.u) {
        w.write_record([format!("{x}"), format!("{u}")]).map_err(csv_err)?;
    }
    w.flush().map_err(|e| PhiError::InvalidInput(e.to_string()))
}
