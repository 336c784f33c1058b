use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{PhiError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Torus {
    pub circumferences: Vec<f64>,
}

/// Flat product model `dx²/x² + g_B + x^{2a} g_F` with torus base and fibre.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelGeometry {
    pub a: u32,
    pub base: Torus,
    pub fiber: Torus,
    #[serde(default = "one")]
    pub x_max: f64,
    /// Measure `dx/x · dvol_B · dvol_F` when true, the metric volume otherwise.
    #[serde(default = "yes")]
    pub dvol_b: bool,
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

impl ModelGeometry {
    pub fn torus(a: u32, base: Vec<f64>, fiber: Vec<f64>) -> Self {
        ModelGeometry {
            a,
            base: Torus { circumferences: base },
            fiber: Torus { circumferences: fiber },
            x_max: 1.0,
            dvol_b: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.a == 0 {
            return Err(PhiError::InvalidInput("degeneracy order a must be positive".into()));
        }
        let circ = self.base.circumferences.iter().chain(&self.fiber.circumferences);
        if circ.clone().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(PhiError::InvalidInput("circumferences must be positive and finite".into()));
        }
        if !(self.x_max.is_finite() && self.x_max > 0.0) {
            return Err(PhiError::InvalidInput("x_max must be positive".into()));
        }
        if self.b() + self.f() > 6 {
            return Err(PhiError::InvalidInput("b + f > 6 is too large for dense Clifford matrices".into()));
        }
        Ok(())
    }

    pub fn b(&self) -> usize {
        self.base.circumferences.len()
    }

    pub fn f(&self) -> usize {
        self.fiber.circumferences.len()
    }

    pub fn af(&self) -> f64 {
        f64::from(self.a) * self.f() as f64
    }

    /// Base frequency vector of a Fourier mode.
    pub fn xi(&self, mode: &[i32]) -> Vec<f64> {
        frequencies(mode, &self.base.circumferences)
    }

    pub fn zeta(&self, mode: &[i32]) -> Vec<f64> {
        frequencies(mode, &self.fiber.circumferences)
    }

    /// Smallest positive eigenvalue of the fibre Laplacian on functions.
    pub fn lambda_one(&self) -> Option<f64> {
        self.fiber.circumferences.iter().map(|l| (2.0 * PI / l).powi(2)).reduce(f64::min)
    }

    /// L² threshold on pointwise exponents under the chosen measure.
    pub fn l2_gamma(&self) -> f64 {
        if self.dvol_b {
            0.0
        } else {
            -self.af() / 2.0
        }
    }
}

fn frequencies(mode: &[i32], circ: &[f64]) -> Vec<f64> {
    mode.iter().zip(circ).map(|(j, l)| 2.0 * PI * f64::from(*j) / l).collect()
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// A Fourier mode on base × fibre.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FourierMode {
    pub base: Vec<i32>,
    pub fiber: Vec<i32>,
}

impl FourierMode {
    pub fn is_fibre_harmonic(&self) -> bool {
        self.fiber.iter().all(|m| *m == 0)
    }
}

fn join(v: &[i32]) -> String {
    v.iter().map(i32::to_string).collect::<Vec<_>>().join(";")
}

impl fmt::Display for FourierMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b={} f={}", join(&self.base), join(&self.fiber))
    }
}

/// All integer vectors of length `dim` with entries in `[-cutoff, cutoff]`, lexicographic.
pub fn lattice(dim: usize, cutoff: u32) -> Vec<Vec<i32>> {
    let c = cutoff as i32;
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-c..=c).map(move |j| {
                    let mut w = v.clone();
                    w.push(j);
                    w
                })
            })
            .collect();
    }
    out
}

/// Clifford generators `c(e_k) = e_k∧ − ι_{e_k}` on `Λℝⁿ`, basis indexed by bitmask.
pub fn clifford(n: usize) -> Vec<DMatrix<f64>> {
    let dim = 1usize << n;
    (0..n)
        .map(|k| {
            let bit = 1usize << k;
            let mut c = DMatrix::zeros(dim, dim);
            for mask in 0..dim {
                let sign = if (mask & (bit - 1)).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
                if mask & bit == 0 {
                    c[(mask | bit, mask)] += sign;
                } else {
                    c[(mask ^ bit, mask)] -= sign;
                }
            }
            c
        })
        .collect()
}

/// A constant-coefficient form on the fibre torus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FibreForm {
    pub degree: u32,
    pub name: String,
    /// Unit-length representative is `x^{rescale}` times the coordinate form.
    pub rescale: f64,
}

/// Basis of fibre-harmonic forms on a flat torus fibre.
pub fn fibre_harmonic_basis(model: &ModelGeometry) -> Vec<FibreForm> {
    let f = model.f();
    (0..1usize << f)
        .map(|mask| {
            let degree = mask.count_ones();
            let name = if mask == 0 {
                "1".to_string()
            } else {
                (0..f).filter(|i| mask & (1 << i) != 0).map(|i| format!("dz{}", i + 1)).collect::<Vec<_>>().join("∧")
            };
            FibreForm { degree, name, rescale: f64::from(model.a * degree) }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clifford_relations() {
        let c = clifford(3);
        for i in 0..3 {
            for j in 0..3 {
                let anti = &c[i] * &c[j] + &c[j] * &c[i];
                let want = if i == j { -2.0 } else { 0.0 } * DMatrix::<f64>::identity(8, 8);
                assert!((anti - want).abs().max() < 1e-12);
            }
            assert!((c[i].transpose() + &c[i]).abs().max() < 1e-12);
        }
    }

    #[test]
    fn basis_dimensions() {
        for f in 0..4 {
            let m = ModelGeometry::torus(1, vec![2.0 * PI], vec![2.0 * PI; f]);
            assert_eq!(fibre_harmonic_basis(&m).len(), 1 << f);
        }
        let m = ModelGeometry::torus(2, vec![], vec![1.0]);
        let b = fibre_harmonic_basis(&m);
        assert_eq!(b[1].name, "dz1");
        assert_eq!(b[1].rescale, 2.0);
    }

    #[test]
    fn lattice_size() {
        assert_eq!(lattice(2, 1).len(), 9);
        assert_eq!(lattice(0, 3), vec![Vec::<i32>::new()]);
    }
}
