//! The composite run behind `verify-paper`: index identities, indicial
//! spectrum, normal gap, harmonic decay, parametrix grid and Fredholm gates,
//! each checked against a closed-form expectation for the given model.

use serde::{Deserialize, Serialize};

use crate::error::{PhiError, Result};
use crate::index_algebra::{Generator, IndexSet, EXP_TOL};
use crate::model::{
    imspec, lattice, linspace, normal_family_gap, verify_predictions, Component, Convention, ImspecConfig, ModelGeometry,
    VerifyConfig,
};
use crate::split::{check_weight, fredholm_report, split_parametrix, SplitOperator};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteTolerances {
    pub root: f64,
    pub gap: f64,
}

impl Default for SuiteTolerances {
    fn default() -> Self {
        SuiteTolerances { root: 1e-8, gap: 1e-6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub model: ModelGeometry,
    pub tolerances: SuiteTolerances,
    pub checks: Vec<SuiteCheck>,
    pub pass: bool,
}

pub const SPECTRUM_WINDOW: (f64, f64) = (-2.5, 2.5);
pub const GATE_WINDOW: (f64, f64) = (-8.0, 8.0);
pub const GRID_ALPHAS: [f64; 4] = [-0.5, 0.0, 0.5, 1.3];

fn check(name: &str, pass: bool, detail: impl Into<String>) -> SuiteCheck {
    SuiteCheck { name: name.into(), pass, detail: detail.into() }
}

fn empty_set_identities() -> SuiteCheck {
    let i = IndexSet::from_generators([Generator::real(0.0, 0), Generator::new(1.5, 0.25, 2)]);
    let e = IndexSet::empty();
    let ok = [
        i.extended_union(&e) == i,
        e.extended_union(&i) == i,
        i.add(&e).is_empty(),
        e.add(&IndexSet::real(3.0)).is_empty(),
        i.add(&IndexSet::real(0.0)) == i,
    ];
    check("index-empty-identities", ok.iter().all(|b| *b), format!("{ok:?}"))
}

/// Flat scalar roots in mode `j` are `±|ξ_j|`, with a double root at 0 for `ξ = 0`.
fn spectrum_check(model: &ModelGeometry, cutoff: u32, tol: f64) -> Result<SuiteCheck> {
    let res = imspec(model, &ImspecConfig::new(SPECTRUM_WINDOW, cutoff, Convention::Flat, Component::Scalar))?;
    let mut problems = Vec::new();
    for mode in lattice(model.b(), cutoff) {
        let r = crate::model::geometry::norm2(&model.xi(&mode)).sqrt();
        let mut expected: Vec<(f64, u32)> =
            if r == 0.0 { vec![(0.0, 1)] } else { vec![(-r, 0), (r, 0)] };
        expected.retain(|(w, _)| *w > SPECTRUM_WINDOW.0 && *w < SPECTRUM_WINDOW.1);
        let found: Vec<(f64, u32)> = res.points_in_mode(&mode).map(|p| (p.lambda_root, p.pole_order_k)).collect();
        let matches = found.len() == expected.len()
            && found.iter().zip(&expected).all(|(f, e)| (f.0 - e.0).abs() <= tol && f.1 == e.1);
        if !matches {
            problems.push(format!("mode {mode:?}: found {found:?}, expected {expected:?}"));
        }
    }
    let detail = if problems.is_empty() { format!("distinct roots {:?}", res.roots) } else { problems.join("; ") };
    Ok(check("indicial-spectrum", problems.is_empty(), detail))
}

fn gap_check(model: &ModelGeometry, tol: f64) -> Result<SuiteCheck> {
    if model.f() == 0 {
        return Ok(check("normal-gap", true, "no fibre directions; the gap is infinite"));
    }
    let grid = linspace(-5.0, 5.0, 21);
    let rep = normal_family_gap(model, &grid, &grid, 2)?;
    let worst = rep.samples.iter().map(|s| (s.gap - s.expected).abs()).fold(0.0, f64::max);
    Ok(check(
        "normal-gap",
        worst <= tol && rep.normal_invertible,
        format!("max deviation {worst:.3e} over {} samples, min gap {}", rep.samples.len(), rep.min_gap),
    ))
}

fn decay_check(model: &ModelGeometry) -> Result<SuiteCheck> {
    let rep = verify_predictions(model, &VerifyConfig::default())?;
    let detail = if rep.pass {
        format!("{} modes, convergence ratios {:?}", rep.modes.len(), rep.convergence.ratios)
    } else {
        rep.mismatches.join("; ")
    };
    Ok(check("harmonic-decay", rep.pass, detail))
}

fn model_spectrum(model: &ModelGeometry) -> Result<Vec<f64>> {
    Ok(imspec(model, &ImspecConfig::new(GATE_WINDOW, 3, Convention::Flat, Component::Scalar))?.roots)
}

fn parametrix_grid(model: &ModelGeometry, spectrum: &[f64]) -> Result<SuiteCheck> {
    let (mut ran, mut gated, mut failures) = (0, 0, Vec::new());
    for a in [1, 2] {
        for m in [1, 2] {
            let op = SplitOperator::differential(a, m, model.b() as u32, spectrum.to_vec());
            for alpha in GRID_ALPHAS {
                match (check_weight(&op, alpha)?, split_parametrix(&op, alpha)) {
                    (true, Ok(r)) if r.pass => ran += 1,
                    (true, Ok(r)) => failures.push(format!(
                        "a={a} m={m} α={alpha}: {}",
                        r.failures().join(", ")
                    )),
                    (false, Err(PhiError::WeightGate(_))) => gated += 1,
                    (ok, other) => failures.push(format!("a={a} m={m} α={alpha}: admissible={ok}, got {:?}", other.err())),
                }
            }
        }
    }
    let detail = if failures.is_empty() { format!("{ran} replays passed, {gated} weights gated") } else { failures.join("; ") };
    Ok(check("parametrix-grid", failures.is_empty(), detail))
}

fn fredholm_sweep(model: &ModelGeometry, spectrum: &[f64]) -> Result<SuiteCheck> {
    let in_spec = |v: f64| spectrum.iter().any(|s| (v - s).abs() <= EXP_TOL);
    let mut bad = Vec::new();
    for m in [1, 2] {
        let op = SplitOperator::differential(model.a, m, model.b() as u32, spectrum.to_vec());
        for i in 0..=60 {
            let alpha = f64::from(i - 30) / 10.0;
            let rep = fredholm_report(&op, alpha)?;
            if rep.maps[0].admissible == in_spec(alpha - op.am()) || rep.maps[1].admissible == in_spec(alpha) {
                bad.push(format!("m={m} α={alpha}"));
            }
        }
    }
    Ok(check("fredholm-gates", bad.is_empty(), if bad.is_empty() { "122 weights agree".to_string() } else { bad.join(", ") }))
}

/// Runs every check on `model`; individual failures are reported, not raised.
pub fn run_suite(model: &ModelGeometry, tol: SuiteTolerances) -> Result<SuiteReport> {
    model.validate()?;
    let spectrum = model_spectrum(model)?;
    let checks = vec![
        empty_set_identities(),
        spectrum_check(model, 2, tol.root)?,
        gap_check(model, tol.gap)?,
        decay_check(model)?,
        parametrix_grid(model, &spectrum)?,
        fredholm_sweep(model, &spectrum)?,
    ];
    let pass = checks.iter().all(|c| c.pass);
    Ok(SuiteReport { model: model.clone(), tolerances: tol, checks, pass })
}
