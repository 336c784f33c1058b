use std::f64::consts::PI;

use phicalc::model::{
    check_l2, convergence_ratios, fit_samples, imspec, l2_admissible, lattice, normal_symbol_gap, solve_harmonic, Component,
    Convention, FitWindow, FourierMode, Grid, ImspecConfig, ModelGeometry, SeparatedEquation,
};
use proptest::prelude::*;

fn torus11() -> ModelGeometry {
    ModelGeometry::torus(1, vec![2.0 * PI], vec![2.0 * PI])
}

fn roots_in_mode(res: &phicalc::model::ImspecResult, mode: &[i32]) -> Vec<f64> {
    res.points_in_mode(mode).map(|p| p.lambda_root).collect()
}

#[test]
fn flat_roots_are_reflection_symmetric_per_mode() {
    for comp in [Component::Scalar, Component::Full] {
        let res = imspec(&torus11(), &ImspecConfig::new((-3.5, 3.5), 3, Convention::Flat, comp)).unwrap();
        for mode in lattice(1, 3) {
            let mut r = roots_in_mode(&res, &mode);
            let mut neg: Vec<f64> = r.iter().map(|x| -x).collect();
            r.sort_by(f64::total_cmp);
            neg.sort_by(f64::total_cmp);
            assert_eq!(r.len(), neg.len());
            for (a, b) in r.iter().zip(&neg) {
                assert!((a - b).abs() < 1e-8, "{comp:?} mode {mode:?}: {r:?}");
            }
            let mirrored: Vec<i32> = mode.iter().map(|j| -j).collect();
            assert_eq!(roots_in_mode(&res, &mirrored), roots_in_mode(&res, &mode));
        }
    }
}

#[test]
fn halving_the_scan_step_moves_no_root() {
    let model = ModelGeometry::torus(1, vec![2.0 * PI, 3.0], vec![2.0 * PI]);
    for (conv, comp) in [(Convention::Flat, Component::Scalar), (Convention::Geometric, Component::FibreDegree(1))] {
        let coarse = ImspecConfig::new((-3.0, 3.0), 2, conv, comp);
        let fine = ImspecConfig { step: coarse.step / 2.0, ..coarse.clone() };
        let a = imspec(&model, &coarse).unwrap();
        let b = imspec(&model, &fine).unwrap();
        assert_eq!(a.points.len(), b.points.len(), "{conv:?}");
        for (p, q) in a.points.iter().zip(&b.points) {
            assert_eq!(p.fourier_mode, q.fourier_mode);
            assert!((p.lambda_root - q.lambda_root).abs() <= 1e-8, "{} vs {}", p.lambda_root, q.lambda_root);
            assert_eq!(p.pole_order_k, q.pole_order_k);
        }
    }
}

#[test]
fn geometric_roots_solve_the_characteristic_equation() {
    let model = ModelGeometry::torus(2, vec![2.0 * PI], vec![2.0 * PI, 4.0]);
    let (a, f) = (2.0, 2.0);
    for l in 0..=2u32 {
        let res = imspec(&model, &ImspecConfig::new((-6.0, 6.0), 2, Convention::Geometric, Component::FibreDegree(l))).unwrap();
        for mode in lattice(1, 2) {
            let xi = 2.0 * PI * f64::from(mode[0]) / (2.0 * PI);
            let p = a * (f - 2.0 * f64::from(l));
            let disc = (p * p / 4.0 + xi * xi).sqrt();
            let mut expected = vec![-p / 2.0 - disc - a * f64::from(l), -p / 2.0 + disc - a * f64::from(l)];
            expected.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
            expected.retain(|w| w.abs() < 6.0);
            let got = roots_in_mode(&res, &mode);
            assert_eq!(got.len(), expected.len(), "L={l} mode {mode:?}: {got:?} vs {expected:?}");
            for (g, e) in got.iter().zip(&expected) {
                assert!((g - e).abs() < 1e-8, "L={l} mode {mode:?}: {g} vs {e}");
            }
        }
    }
}

#[test]
fn discretisation_is_second_order() {
    let model = torus11();
    for j in 1..=3 {
        let mode = FourierMode { base: vec![j], fiber: vec![0] };
        let eq = SeparatedEquation::new(&model, 0, &mode).unwrap();
        let xi = f64::from(j);
        let s = -0.5 + (0.25 + xi * xi).sqrt();
        for r in convergence_ratios(&eq, s, Grid::default()) {
            assert!((3.6..=4.4).contains(&r), "mode {j}: ratio {r}");
        }
    }
}

#[test]
fn solution_csv_and_spectrum_csv_have_the_documented_columns() {
    let model = torus11();
    let sol = solve_harmonic(&model, 0, &FourierMode { base: vec![1], fiber: vec![0] }, 1.0, Grid { t_max: 4.0, n: 64 }).unwrap();
    let mut buf = Vec::new();
    phicalc::model::write_solution_csv(&sol, &mut buf).unwrap();
    assert!(String::from_utf8(buf).unwrap().starts_with("x,u\n"));
    let res = imspec(&model, &ImspecConfig::new((-2.5, 2.5), 2, Convention::Flat, Component::Scalar)).unwrap();
    let mut buf = Vec::new();
    phicalc::model::write_spectrum_csv(&res.points, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("mode,lambda_root,pole_order_k\n"));
    assert_eq!(text.lines().count(), res.points.len() + 1);
}

#[test]
fn model_json_is_strict() {
    let good = r#"{"a":1,"base":{"circumferences":[6.283185307179586]},"fiber":{"circumferences":[6.283185307179586]}}"#;
    let m: ModelGeometry = phicalc::json::parse_str(good, "m").unwrap();
    assert_eq!(m, torus11());
    let bad = good.replace("\"a\":1", "\"a\":1,\"b\":2");
    assert!(phicalc::json::parse_str::<ModelGeometry>(&bad, "m").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn normal_gap_matches_product_formula(
        base in prop::collection::vec(1.0f64..8.0, 1..=2),
        fiber in prop::collection::vec(1.0f64..8.0, 1..=2),
        tau in -5.0f64..5.0,
        eta in -5.0f64..5.0,
    ) {
        let model = ModelGeometry::torus(1, base, fiber);
        let lambda = model.lambda_one().unwrap();
        let gap = normal_symbol_gap(&model, tau, eta, 2).unwrap();
        prop_assert!((gap - (lambda + tau * tau + eta * eta).sqrt()).abs() < 1e-6);
    }

    #[test]
    fn l2_decision_from_fit_matches_the_rule(w4 in -12i32..=12, dvol_b in any::<bool>()) {
        let w = f64::from(w4) / 4.0;
        let gamma = if dvol_b { 0.0 } else { -0.5 };
        let x: Vec<f64> = (0..=2048).map(|i| (-12.0 * f64::from(i) / 2048.0).exp()).collect();
        let u: Vec<f64> = x.iter().map(|x| 2.0 * x.powf(w)).collect();
        let fit = fit_samples(&x, &u, FitWindow::default()).unwrap();
        prop_assert!((fit.exponent - w).abs() < 1e-8);
        prop_assert_eq!(check_l2(&fit, gamma), l2_admissible(w, gamma));
        prop_assert_eq!(l2_admissible(w, gamma), w > gamma);
    }
}
