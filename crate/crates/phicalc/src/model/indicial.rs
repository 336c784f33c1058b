use nalgebra::{Complex, DMatrix};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::geometry::{clifford, lattice, norm2, ModelGeometry};
use crate::error::{PhiError, Result};
use crate::split::SpecBPoint;

/// Smallest singular value below which a refined point counts as a root.
pub const ROOT_TOL: f64 = 1e-8;
/// Bracket width at which golden-section refinement stops.
pub const REFINE_WIDTH: f64 = 1e-10;
pub const DEFAULT_STEP: f64 = 0.01;

/// Which boundary model the indicial family is taken from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `D_V = 𝔡 + 𝔡* + xD_x` on 𝒦̄-valued forms; volume factors removed.
    Flat,
    /// Hodge Laplacian of the warped metric, exponents of pointwise norms.
    Geometric,
}

/// Which block of the indicial family is scanned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    Scalar,
    FibreDegree(u32),
    Full,
}

impl std::str::FromStr for Component {
    type Err = PhiError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scalar" => Ok(Component::Scalar),
            "full" => Ok(Component::Full),
            _ => s
                .strip_prefix("degree:")
                .and_then(|d| d.parse().ok())
                .map(Component::FibreDegree)
                .ok_or_else(|| PhiError::InvalidInput(format!("unknown component `{s}`; use scalar, full or degree:L"))),
        }
    }
}

/// Geometric indicial polynomial of fibre degree `l` at pointwise exponent `w`.
///
/// The separated equation is `u'' − a(f−2L)u' − |ξ|²u = 0` in `t = −log x`
/// for the coordinate coefficient `u = x^s`, and `w = s − aL`.
pub fn geometric_polynomial(model: &ModelGeometry, l: u32, xi2: f64, w: f64) -> f64 {
    let a = f64::from(model.a);
    let s = w + a * f64::from(l);
    let c = a * (model.f() as f64 - 2.0 * f64::from(l));
    s * s + c * s - xi2
}

/// Builds `I(λ)` at `λ = −iw` for a base mode.
pub struct IndicialFamily<'a> {
    model: &'a ModelGeometry,
    convention: Convention,
    component: Component,
    xi: Vec<f64>,
    cliff: Vec<DMatrix<f64>>,
}

impl<'a> IndicialFamily<'a> {
    pub fn new(model: &'a ModelGeometry, convention: Convention, component: Component, mode: &[i32]) -> Result<Self> {
        model.validate()?;
        if let Component::FibreDegree(l) = component {
            if l as usize > model.f() {
                return Err(PhiError::InvalidInput(format!("fibre degree {l} exceeds fibre dimension {}", model.f())));
            }
        }
        let cliff = if component == Component::Full { clifford(1 + model.b()) } else { Vec::new() };
        Ok(IndicialFamily { model, convention, component, xi: model.xi(mode), cliff })
    }

    pub fn matrix(&self, w: f64) -> DMatrix<Complex<f64>> {
        let xi2 = norm2(&self.xi);
        let f = self.model.f();
        let scalar = |v: f64| DMatrix::from_element(1, 1, Complex::new(v, 0.0));
        match (self.convention, self.component) {
            (Convention::Flat, Component::Scalar | Component::FibreDegree(_)) => scalar(xi2 - w * w),
            (Convention::Geometric, Component::Scalar) => scalar(geometric_polynomial(self.model, 0, xi2, w)),
            (Convention::Geometric, Component::FibreDegree(l)) => scalar(geometric_polynomial(self.model, l, xi2, w)),
            (Convention::Flat, Component::Full) => {
                let base = self.cliff[0].map(|v| Complex::new(w * v, 0.0))
                    + self.cliff[1..]
                        .iter()
                        .zip(&self.xi)
                        .map(|(c, x)| c.map(|v| Complex::new(0.0, x * v)))
                        .fold(DMatrix::zeros(self.cliff[0].nrows(), self.cliff[0].ncols()), |acc, m| acc + m);
                base.kronecker(&DMatrix::identity(1 << f, 1 << f))
            }
            (Convention::Geometric, Component::Full) => {
                let nb = 1usize << (1 + self.model.b());
                let diag: Vec<Complex<f64>> = (0..1usize << f)
                    .flat_map(|mask| {
                        let v = geometric_polynomial(self.model, mask.count_ones(), xi2, w);
                        std::iter::repeat_n(Complex::new(v, 0.0), nb)
                    })
                    .collect();
                DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag))
            }
        }
    }

    pub fn sigma_min(&self, w: f64) -> f64 {
        self.matrix(w).singular_values().min()
    }

    pub fn abs_det(&self, w: f64) -> f64 {
        self.matrix(w).determinant().norm()
    }
}

/// A point of `−Im spec_b` found in one Fourier mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub lambda_root: f64,
    pub fourier_mode: Vec<i32>,
    /// The inverse has a pole of order `pole_order_k + 1`.
    pub pole_order_k: u32,
    /// Vanishing order of `det I` at the root.
    pub det_order: u32,
    /// Set when the determinant order disagrees with the inverse's pole order.
    pub order_mismatch: bool,
    pub window_edge: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImspecConfig {
    pub window: (f64, f64),
    pub mode_cutoff: u32,
    #[serde(default = "default_step")]
    pub step: f64,
    pub convention: Convention,
    pub component: Component,
}

fn default_step() -> f64 {
    DEFAULT_STEP
}

impl ImspecConfig {
    pub fn new(window: (f64, f64), mode_cutoff: u32, convention: Convention, component: Component) -> Self {
        ImspecConfig { window, mode_cutoff, step: DEFAULT_STEP, convention, component }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImspecResult {
    pub config: ImspecConfig,
    /// Per-mode roots, sorted by root then mode.
    pub points: Vec<SpectrumPoint>,
    /// Distinct roots across all modes.
    pub roots: Vec<f64>,
    pub warnings: Vec<String>,
}

impl ImspecResult {
    /// Distinct roots with the largest `k` seen across modes.
    pub fn spec_b(&self) -> Vec<SpecBPoint> {
        let mut out: Vec<SpecBPoint> = Vec::new();
        for p in &self.points {
            match out.iter_mut().find(|q| (q.lambda_root - p.lambda_root).abs() < 1e-7) {
                Some(q) => q.pole_order_k = q.pole_order_k.max(Some(p.pole_order_k)),
                None => out.push(SpecBPoint { lambda_root: p.lambda_root, pole_order_k: Some(p.pole_order_k) }),
            }
        }
        out
    }

    pub fn points_in_mode(&self, mode: &[i32]) -> impl Iterator<Item = &SpectrumPoint> {
        let mode = mode.to_vec();
        self.points.iter().filter(move |p| p.fourier_mode == mode)
    }
}

fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > REFINE_WIDTH {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    let mid = 0.5 * (lo + hi);
    [lo, mid, hi].into_iter().min_by(|x, y| f(*x).total_cmp(&f(*y))).unwrap_or(mid)
}

/// Vanishing order of `g` at `w0` from its log–log slope on both sides.
pub fn vanishing_order(g: impl Fn(f64) -> f64, w0: f64) -> u32 {
    let (d1, d2) = (1e-3, 1e-4);
    let slope = |s: f64| {
        let (a, b) = (g(w0 + s * d1), g(w0 + s * d2));
        if a <= 0.0 || b <= 0.0 {
            return f64::NAN;
        }
        (a / b).ln() / (d1 / d2).ln()
    };
    let s: Vec<f64> = [slope(1.0), slope(-1.0)].into_iter().filter(|v| v.is_finite()).collect();
    if s.is_empty() {
        return 0;
    }
    (s.iter().sum::<f64>() / s.len() as f64).round().max(0.0) as u32
}

fn scan_mode(fam: &IndicialFamily, mode: &[i32], cfg: &ImspecConfig) -> (Vec<SpectrumPoint>, Vec<String>) {
    let (lo, hi) = cfg.window;
    let n = ((hi - lo) / cfg.step).ceil().max(1.0) as usize;
    let grid: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let sig: Vec<f64> = grid.iter().map(|w| fam.sigma_min(*w)).collect();
    let mut roots: Vec<f64> = Vec::new();
    let mut warnings = Vec::new();
    for i in 0..=n {
        let left = if i > 0 { sig[i - 1] } else { f64::INFINITY };
        let right = if i < n { sig[i + 1] } else { f64::INFINITY };
        if !(sig[i] <= left && sig[i] <= right) {
            continue;
        }
        let w = golden_section(|w| fam.sigma_min(w), grid[i.saturating_sub(1)], grid[(i + 1).min(n)]);
        let s = fam.sigma_min(w);
        if s < ROOT_TOL {
            if !roots.iter().any(|r| (r - w).abs() < 1e-6) {
                roots.push(w);
            }
        } else if s < 1e-3 {
            warnings.push(format!("mode {mode:?}: near-root at {w:.6} with σ_min = {s:.3e} did not converge"));
        }
    }
    let points = roots
        .into_iter()
        .map(|w| {
            let k_order = vanishing_order(|v| fam.sigma_min(v), w);
            let det_order = vanishing_order(|v| fam.abs_det(v), w);
            SpectrumPoint {
                lambda_root: w,
                fourier_mode: mode.to_vec(),
                pole_order_k: k_order.saturating_sub(1),
                det_order,
                order_mismatch: det_order != k_order,
                window_edge: (w - lo).abs() < 1e-6 || (w - hi).abs() < 1e-6,
            }
        })
        .collect();
    (points, warnings)
}

/// `−Im spec_b` of the model indicial family over all base modes up to the cutoff.
pub fn imspec(model: &ModelGeometry, cfg: &ImspecConfig) -> Result<ImspecResult> {
    let (lo, hi) = cfg.window;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(PhiError::InvalidInput("window must be finite with lo ≤ hi".into()));
    }
    if cfg.step.is_nan() || cfg.step <= 0.0 {
        return Err(PhiError::InvalidInput("scan step must be positive".into()));
    }
    let modes = lattice(model.b(), cfg.mode_cutoff);
    let per_mode: Vec<(Vec<SpectrumPoint>, Vec<String>)> = modes
        .par_iter()
        .map(|m| {
            let fam = IndicialFamily::new(model, cfg.convention, cfg.component, m)?;
            Ok(scan_mode(&fam, m, cfg))
        })
        .collect::<Result<_>>()?;
    let mut points = Vec::new();
    let mut warnings = Vec::new();
    for (p, w) in per_mode {
        points.extend(p);
        warnings.extend(w);
    }
    points.sort_by(|a, b| a.lambda_root.total_cmp(&b.lambda_root).then_with(|| a.fourier_mode.cmp(&b.fourier_mode)));
    for p in points.iter().filter(|p| p.order_mismatch) {
        warnings.push(format!(
            "mode {:?}, root {:.6}: det vanishes to order {} but the inverse has a pole of order {}",
            p.fourier_mode,
            p.lambda_root,
            p.det_order,
            p.pole_order_k + 1
        ));
    }
    for p in points.iter().filter(|p| p.window_edge) {
        warnings.push(format!("mode {:?}: root {:.6} lies on the window edge", p.fourier_mode, p.lambda_root));
    }
    let mut roots: Vec<f64> = Vec::new();
    for p in &points {
        if roots.last().is_none_or(|r| (p.lambda_root - r).abs() > 1e-7) {
            roots.push(p.lambda_root);
        }
    }
    Ok(ImspecResult { config: cfg.clone(), points, roots, warnings })
}
