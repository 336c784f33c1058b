use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{check_l2, fit_samples, FitWindow, HarmonicFit};
use super::geometry::{lattice, FourierMode, ModelGeometry};
use super::indicial::{imspec, Component, Convention, ImspecConfig, ImspecResult};
use super::ode::{convergence_ratios, solve_harmonic, Grid, SeparatedEquation};
use crate::error::{PhiError, Result};

/// Relative agreement required between a fitted and a predicted exponent.
pub const EXPONENT_REL_TOL: f64 = 0.02;
/// Absolute slack used when the predicted exponent is zero.
pub const EXPONENT_ABS_TOL: f64 = 1e-4;
pub const RATIO_RANGE: (f64, f64) = (3.6, 4.4);
/// Power against which fibre-perpendicular decay is tested.
pub const DECAY_POWER: i32 = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub alpha: f64,
    pub mode_cutoff: u32,
    pub fiber_cutoff: u32,
    pub grid: Grid,
    pub window: FitWindow,
    pub imspec_window: (f64, f64),
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            alpha: 0.0,
            mode_cutoff: 2,
            fiber_cutoff: 1,
            grid: Grid::default(),
            window: FitWindow::default(),
            imspec_window: (-8.0, 8.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeVerdict {
    pub fit: Option<HarmonicFit>,
    pub mode: FourierMode,
    pub fibre_degree: u32,
    /// Roots of the geometric indicial polynomial in this mode.
    pub predicted_roots: Vec<f64>,
    pub predicted_l2: bool,
    pub fitted_l2: bool,
    /// `sup |u|/x^10` over the grid for fibre-perpendicular modes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay_constant: Option<f64>,
    pub condition: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceCheck {
    pub mode: FourierMode,
    pub root: f64,
    pub ratios: [f64; 2],
    pub pass: bool,
}

/// Flat `D_V` roots next to the geometric decaying exponent of one mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConventionNote {
    pub base_mode: Vec<i32>,
    pub fibre_degree: u32,
    pub flat_roots: Vec<f64>,
    pub geometric_exponent: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub alpha: f64,
    pub gamma: f64,
    pub modes: Vec<ModeVerdict>,
    pub convergence: ConvergenceCheck,
    pub convention_notes: Vec<ConventionNote>,
    pub mismatches: Vec<String>,
    pub pass: bool,
}

fn close(fit: f64, target: f64) -> bool {
    (fit - target).abs() <= (EXPONENT_REL_TOL * target.abs()).max(EXPONENT_ABS_TOL)
}

/// `sup |u|/x^N` over the grid, provided the ratio decays inward on the fit window.
fn decay_bound(x: &[f64], u: &[f64], window: FitWindow) -> Option<f64> {
    let ratio: Vec<(f64, f64)> = x.iter().zip(u).map(|(x, u)| (*x, u.abs() / x.powi(DECAY_POWER))).collect();
    let inner: Vec<f64> = ratio.iter().filter(|(x, _)| *x >= window.lo && *x <= window.hi).map(|r| r.1).collect();
    let monotone = inner.windows(2).all(|w| w[1] <= w[0]);
    let sup = ratio.iter().map(|r| r.1).fold(0.0, f64::max);
    (monotone && sup.is_finite()).then_some(sup)
}

fn verdict_for(
    model: &ModelGeometry,
    cfg: &VerifyConfig,
    geometric: &[ImspecResult],
    mode: &FourierMode,
    l: u32,
) -> Result<ModeVerdict> {
    let gamma = model.l2_gamma();
    let sol = solve_harmonic(model, l, mode, 1.0, cfg.grid)?;
    let mut notes = Vec::new();
    if sol.ill_conditioned {
        notes.push(format!("condition estimate {:.3e} exceeds the threshold", sol.condition));
    }
    let shift = f64::from(model.a * l);
    let fit = match fit_samples(&sol.x, &sol.u, cfg.window) {
        Ok(p) => Some(HarmonicFit {
            mode: mode.clone(),
            fibre_degree: l,
            fitted_exponent: if p.superpolynomial { p.exponent } else { p.exponent - shift },
            fitted_log_power: p.log_power,
            residual: p.residual,
            superpolynomial_flag: p.superpolynomial,
        }),
        Err(e) => {
            notes.push(format!("fit rejected: {e}"));
            None
        }
    };
    let mut v = ModeVerdict {
        fit: fit.clone(),
        mode: mode.clone(),
        fibre_degree: l,
        predicted_roots: Vec::new(),
        predicted_l2: false,
        fitted_l2: false,
        decay_constant: None,
        condition: sol.condition,
        pass: false,
        notes,
    };
    let Some(fit) = fit else {
        return Ok(v);
    };
    let as_power = super::fit::PowerFit {
        exponent: fit.fitted_exponent,
        log_power: fit.fitted_log_power,
        residual: fit.residual,
        superpolynomial: fit.superpolynomial_flag,
    };
    v.fitted_l2 = check_l2(&as_power, gamma);
    if mode.is_fibre_harmonic() {
        v.predicted_roots = geometric[l as usize].points_in_mode(&mode.base).map(|p| p.lambda_root).collect();
        let Some(decaying) = v.predicted_roots.iter().copied().reduce(f64::max) else {
            v.notes.push("no indicial root found in this mode".into());
            return Ok(v);
        };
        v.predicted_l2 = decaying > gamma + super::fit::L2_MARGIN;
        let mut ok = !fit.superpolynomial_flag && v.fitted_l2 == v.predicted_l2;
        if !close(fit.fitted_exponent, decaying) {
            ok = false;
            v.notes.push(format!("fitted {} vs predicted {decaying}", fit.fitted_exponent));
        }
        let in_k = v.predicted_roots.iter().any(|r| *r > cfg.alpha && close(fit.fitted_exponent, *r));
        if v.fitted_l2 && !(fit.fitted_exponent > 0.0 && in_k) {
            ok = false;
            v.notes.push("L² exponent outside the predicted set {w > α}".into());
        }
        v.pass = ok && !sol.ill_conditioned;
    } else {
        v.predicted_l2 = true;
        v.decay_constant = decay_bound(&sol.x, &sol.u, cfg.window);
        if !fit.superpolynomial_flag {
            v.notes.push("fibre-perpendicular mode not classified superpolynomial".into());
        }
        if v.decay_constant.is_none() {
            v.notes.push(format!("|u|/x^{DECAY_POWER} does not decay inward"));
        }
        v.pass = fit.superpolynomial_flag && v.decay_constant.is_some() && v.fitted_l2 && !sol.ill_conditioned;
    }
    Ok(v)
}

/// Cross-checks solved harmonic modes against the indicial predictions.
pub fn verify_predictions(model: &ModelGeometry, cfg: &VerifyConfig) -> Result<VerifyReport> {
    model.validate()?;
    let f = model.f() as u32;
    let geometric: Vec<ImspecResult> = (0..=f)
        .map(|l| {
            imspec(
                model,
                &ImspecConfig::new(cfg.imspec_window, cfg.mode_cutoff, Convention::Geometric, Component::FibreDegree(l)),
            )
        })
        .collect::<Result<_>>()?;
    let flat = imspec(model, &ImspecConfig::new(cfg.imspec_window, cfg.mode_cutoff, Convention::Flat, Component::Scalar))?;

    let base_modes = lattice(model.b(), cfg.mode_cutoff);
    let fibre_modes = lattice(model.f(), cfg.fiber_cutoff);
    let jobs: Vec<(FourierMode, u32)> = base_modes
        .iter()
        .flat_map(|b| fibre_modes.iter().map(move |m| FourierMode { base: b.clone(), fiber: m.clone() }))
        .flat_map(|m| (0..=f).map(move |l| (m.clone(), l)))
        .collect();
    let modes: Vec<ModeVerdict> =
        jobs.par_iter().map(|(m, l)| verdict_for(model, cfg, &geometric, m, *l)).collect::<Result<_>>()?;

    let conv_mode = FourierMode {
        base: (0..model.b()).map(|i| i32::from(i == 0)).collect(),
        fiber: vec![0; model.f()],
    };
    let root = geometric[0]
        .points_in_mode(&conv_mode.base)
        .map(|p| p.lambda_root)
        .reduce(f64::max)
        .ok_or_else(|| PhiError::Numerics("no geometric root for the convergence mode".into()))?;
    let eq = SeparatedEquation::new(model, 0, &conv_mode)?;
    let ratios = convergence_ratios(&eq, root, cfg.grid);
    let convergence = ConvergenceCheck {
        mode: conv_mode,
        root,
        ratios,
        pass: ratios.iter().all(|r| (RATIO_RANGE.0..=RATIO_RANGE.1).contains(r)),
    };

    let convention_notes = base_modes
        .iter()
        .flat_map(|b| {
            let flat_roots: Vec<f64> = flat.points_in_mode(b).map(|p| p.lambda_root).collect();
            let geometric = &geometric;
            (0..=f).filter_map(move |l| {
                let g = geometric[l as usize].points_in_mode(b).map(|p| p.lambda_root).reduce(f64::max)?;
                Some(ConventionNote { base_mode: b.clone(), fibre_degree: l, flat_roots: flat_roots.clone(), geometric_exponent: g })
            })
        })
        .collect();

    let mut mismatches: Vec<String> = modes
        .iter()
        .filter(|v| !v.pass)
        .map(|v| format!("mode {} degree {}: {}", v.mode, v.fibre_degree, v.notes.join("; ")))
        .collect();
    if !convergence.pass {
        mismatches.push(format!("convergence ratios {:?} outside {:?}", convergence.ratios, RATIO_RANGE));
    }
    let pass = mismatches.is_empty();
    Ok(VerifyReport { alpha: cfg.alpha, gamma: model.l2_gamma(), modes, convergence, convention_notes, mismatches, pass })
}
