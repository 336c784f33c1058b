use serde::{Deserialize, Serialize};

use super::geometry::{norm2, FourierMode, ModelGeometry};
use crate::error::{PhiError, Result};

/// Condition estimates above this mark a solve as ill-conditioned.
pub const ILL_CONDITIONED: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub t_max: f64,
    pub n: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { t_max: 12.0, n: 2048 }
    }
}

impl Grid {
    pub fn h(&self) -> f64 {
        self.t_max / self.n as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_max.is_finite() && self.t_max > 0.0) || self.n < 8 {
            return Err(PhiError::InvalidInput("grid needs T > 0 and at least 8 intervals".into()));
        }
        Ok(())
    }
}

/// Tridiagonal matrix stored by diagonals.
#[derive(Clone, Debug)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    fn transpose(&self) -> Tridiagonal {
        Tridiagonal { lower: self.upper.clone(), diag: self.diag.clone(), upper: self.lower.clone() }
    }

    /// Thomas algorithm; the systems assembled here are diagonally dominant.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut denom = self.diag[0];
        c[0] = if n > 1 { self.upper[0] / denom } else { 0.0 };
        d[0] = rhs[0] / denom;
        for i in 1..n {
            denom = self.diag[i] - self.lower[i - 1] * c[i - 1];
            c[i] = if i + 1 < n { self.upper[i] / denom } else { 0.0 };
            d[i] = (rhs[i] - self.lower[i - 1] * d[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        d
    }

    pub fn norm1(&self) -> f64 {
        let n = self.diag.len();
        (0..n)
            .map(|j| {
                self.diag[j].abs()
                    + if j > 0 { self.upper[j - 1].abs() } else { 0.0 }
                    + if j + 1 < n { self.lower[j].abs() } else { 0.0 }
            })
            .fold(0.0, f64::max)
    }

    /// Hager's estimate of `‖A⁻¹‖₁`.
    pub fn inverse_norm1_estimate(&self) -> f64 {
        let n = self.diag.len();
        let t = self.transpose();
        let mut x = vec![1.0 / n as f64; n];
        let mut est = 0.0;
        for _ in 0..5 {
            let y = self.solve(&x);
            let norm: f64 = y.iter().map(|v| v.abs()).sum();
            if norm <= est {
                break;
            }
            est = norm;
            let xi: Vec<f64> = y.iter().map(|v| if *v >= 0.0 { 1.0 } else { -1.0 }).collect();
            let z = t.solve(&xi);
            let (j, zmax) = z.iter().enumerate().fold((0, 0.0), |(bj, bv), (j, v)| if v.abs() > bv { (j, v.abs()) } else { (bj, bv) });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
            if zmax <= ztx {
                break;
            }
            x = vec![0.0; n];
            x[j] = 1.0;
        }
        est
    }
}

/// Coefficients of the separated equation `u'' − p u' − V(t) u = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparatedEquation {
    pub p: f64,
    pub xi2: f64,
    pub zeta2: f64,
    pub a: f64,
    pub x_max: f64,
}

impl SeparatedEquation {
    pub fn new(model: &ModelGeometry, fibre_degree: u32, mode: &FourierMode) -> Result<Self> {
        model.validate()?;
        if fibre_degree as usize > model.f() {
            return Err(PhiError::InvalidInput(format!("fibre degree {fibre_degree} exceeds f = {}", model.f())));
        }
        if mode.base.len() != model.b() || mode.fiber.len() != model.f() {
            return Err(PhiError::InvalidInput("mode length does not match base/fibre dimensions".into()));
        }
        let a = f64::from(model.a);
        Ok(SeparatedEquation {
            p: a * (model.f() as f64 - 2.0 * f64::from(fibre_degree)),
            xi2: norm2(&model.xi(&mode.base)),
            zeta2: norm2(&model.zeta(&mode.fiber)),
            a,
            x_max: model.x_max,
        })
    }

    pub fn potential(&self, t: f64) -> f64 {
        self.xi2 + self.zeta2 * (self.x_max.powf(-2.0 * self.a)) * (2.0 * self.a * t).exp()
    }

    /// Decaying root `s` of `s² + p s − V = 0` with frozen coefficients.
    pub fn decay_rate(&self, t: f64) -> f64 {
        let v = self.potential(t);
        0.5 * (-self.p + (self.p * self.p + 4.0 * v).sqrt())
    }

    /// Discrete residual of `e^{−st}` on the interior nodes (max norm).
    pub fn residual_of_power(&self, s: f64, grid: Grid) -> f64 {
        let h = grid.h();
        let u = |i: usize| (-s * h * i as f64).exp();
        (1..grid.n)
            .map(|i| {
                let t = h * i as f64;
                let r = (u(i + 1) - 2.0 * u(i) + u(i - 1)) / (h * h) - self.p * (u(i + 1) - u(i - 1)) / (2.0 * h)
                    - self.potential(t) * u(i);
                r.abs()
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicSolution {
    pub mode: FourierMode,
    pub fibre_degree: u32,
    pub equation: SeparatedEquation,
    pub grid: Grid,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub condition: f64,
    pub ill_conditioned: bool,
}

/// Solves the separated harmonic equation on `t = −log(x/x_max) ∈ [0, T]`
/// with `u(0) = boundary` and the decaying-solution condition `u' = −s(T) u` at `T`.
pub fn solve_harmonic(
    model: &ModelGeometry,
    fibre_degree: u32,
    mode: &FourierMode,
    boundary: f64,
    grid: Grid,
) -> Result<HarmonicSolution> {
    grid.validate()?;
    let eq = SeparatedEquation::new(model, fibre_degree, mode)?;
    let (n, h) = (grid.n, grid.h());
    let lo = 1.0 + eq.p * h / 2.0;
    let up = 1.0 - eq.p * h / 2.0;
    if lo <= 0.0 || up <= 0.0 {
        return Err(PhiError::Numerics("grid too coarse for the first-order term; increase n".into()));
    }
    // Unknowns u_1..u_n; the ghost node beyond T carries the Robin condition.
    let mut m = Tridiagonal { lower: vec![lo; n - 1], diag: Vec::with_capacity(n), upper: vec![up; n - 1] };
    for i in 1..=n {
        m.diag.push(-2.0 - h * h * eq.potential(h * i as f64));
    }
    let s_t = eq.decay_rate(grid.t_max);
    m.lower[n - 2] = lo + up;
    m.diag[n - 1] -= 2.0 * h * s_t * up;
    let mut rhs = vec![0.0; n];
    rhs[0] = -lo * boundary;
    let sol = m.solve(&rhs);
    let condition = m.norm1() * m.inverse_norm1_estimate();
    let mut u = Vec::with_capacity(n + 1);
    u.push(boundary);
    u.extend(sol);
    let x = (0..=n).map(|i| model.x_max * (-(h * i as f64)).exp()).collect();
    if u.iter().any(|v| !v.is_finite()) {
        return Err(PhiError::Numerics(format!("non-finite solution in mode {mode}")));
    }
    Ok(HarmonicSolution {
        mode: mode.clone(),
        fibre_degree,
        equation: eq,
        grid,
        x,
        u,
        condition,
        ill_conditioned: condition.is_nan() || condition >= ILL_CONDITIONED,
    })
}

/// Residual ratios `r(n)/r(2n)` and `r(2n)/r(4n)` for the exact power `x^s`.
pub fn convergence_ratios(eq: &SeparatedEquation, s: f64, grid: Grid) -> [f64; 2] {
    let r: Vec<f64> = [1, 2, 4]
        .iter()
        .map(|k| eq.residual_of_power(s, Grid { t_max: grid.t_max, n: grid.n * k }))
        .collect();
    [r[0] / r[1], r[1] / r[2]]
}
