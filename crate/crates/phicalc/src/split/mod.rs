//! Split parametrices for φ-operators in `(Π, Π⊥)` block form.
//!
//! The construction is replayed symbolically: every product is composed in the
//! calculus and compared entrywise with the class asserted for it. Weight
//! conditions, Fredholm admissibility and polyhomogeneous regularity follow
//! from the indicial data of `P00`.

pub mod matrix;
pub mod parametrix;

use serde::{Deserialize, Serialize};

use crate::calculus::{Kind, OpClass, RegularityKind, SobolevSpaceSpec};
use crate::error::{PhiError, Result};
use crate::index_algebra::{Generator, IndexSet, EXP_TOL};

pub use matrix::{check_entries, products_against, ClassMatrix, EntryCheck};
pub use parametrix::{split_parametrix, ParametrixClasses, ParametrixReport, StepCheck};

/// A root of the indicial family of `P00` with its pole order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecBPoint {
    /// `−Im λ`, the real exponent of the corresponding term.
    pub lambda_root: f64,
    /// `k` for a pole of order `k + 1`; this is the log power carried by the root.
    #[serde(default)]
    pub pole_order_k: Option<u32>,
}

/// A φ-operator of order `m` written as `P = [[x^{am}P00, x^{am}P01], [x^{am}P10, P11]]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitOperator {
    pub a: u32,
    pub m: u32,
    #[serde(default = "default_b_dim")]
    pub b_dim: u32,
    pub p00: OpClass,
    pub p01: OpClass,
    pub p10: OpClass,
    pub p11: OpClass,
    /// `−Im spec_b(P00)`.
    pub imspec_p00: Vec<f64>,
    #[serde(default)]
    pub spec_b: Option<Vec<SpecBPoint>>,
    pub elliptic_p00: bool,
    pub normal_invertible: bool,
    #[serde(default = "yes")]
    pub phi_elliptic: bool,
}

fn default_b_dim() -> u32 {
    1
}

fn yes() -> bool {
    true
}

impl SplitOperator {
    /// A differential operator of order `m` satisfying the standing hypotheses.
    pub fn differential(a: u32, m: u32, b_dim: u32, imspec_p00: Vec<f64>) -> Self {
        let ord = f64::from(m);
        SplitOperator {
            a,
            m,
            b_dim,
            p00: OpClass::small(Kind::B, ord),
            p01: OpClass::small(Kind::PhiExt, ord),
            p10: OpClass::small(Kind::PhiExt, ord),
            p11: OpClass::small(Kind::PhiExt, ord),
            imspec_p00,
            spec_b: None,
            elliptic_p00: true,
            normal_invertible: true,
            phi_elliptic: true,
        }
    }

    pub fn with_spec_b(mut self, points: Vec<SpecBPoint>) -> Self {
        self.spec_b = Some(points);
        self
    }

    /// `a·m`.
    pub fn am(&self) -> f64 {
        f64::from(self.a * self.m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.a == 0 || self.m == 0 {
            return Err(PhiError::InvalidInput("a and m must be positive".into()));
        }
        for c in [&self.p00, &self.p01, &self.p10, &self.p11] {
            c.validate()?;
        }
        if self.imspec_p00.iter().any(|s| !s.is_finite()) {
            return Err(PhiError::InvalidInput("imspec_p00 entries must be finite".into()));
        }
        Ok(())
    }

    /// Block data of the formal adjoint, rewritten in the same block form.
    pub fn adjoint(&self) -> SplitOperator {
        let am = self.am();
        SplitOperator {
            p00: self.p00.adjoint().conjugate_by_power(am),
            p01: self.p10.adjoint().conjugate_by_power(am),
            p10: self.p01.adjoint().conjugate_by_power(am),
            p11: self.p11.adjoint(),
            imspec_p00: self.imspec_p00.iter().map(|s| -s - am).collect(),
            spec_b: self.spec_b.as_ref().map(|pts| {
                pts.iter().map(|p| SpecBPoint { lambda_root: -p.lambda_root - am, ..*p }).collect()
            }),
            ..self.clone()
        }
    }
}

/// The weight condition `α − am ∉ −Im spec_b(P00)`.
pub fn check_weight(op: &SplitOperator, alpha: f64) -> Result<bool> {
    weight_admissible(&op.imspec_p00, alpha - op.am())
}

fn weight_admissible(spec: &[f64], value: f64) -> Result<bool> {
    if spec.is_empty() {
        return Err(PhiError::InvalidInput("indicial spectrum unknown; weight condition unverifiable".into()));
    }
    Ok(spec.iter().all(|s| (value - s).abs() > EXP_TOL))
}

/// One mapping of the Fredholm statement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FredholmMap {
    pub domain: String,
    pub codomain: String,
    pub condition: String,
    pub admissible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FredholmReport {
    pub alpha: f64,
    pub am: f64,
    pub maps: Vec<FredholmMap>,
}

pub fn fredholm_report(op: &SplitOperator, alpha: f64) -> Result<FredholmReport> {
    op.validate()?;
    let m = f64::from(op.m);
    let space = |weight, order| SobolevSpaceSpec { weight, order, kind: RegularityKind::Split };
    let maps = vec![
        FredholmMap {
            domain: space(alpha, m).describe(),
            codomain: space(alpha, 0.0).describe(),
            condition: "α − am ∉ −Im spec_b(P00)".into(),
            admissible: weight_admissible(&op.imspec_p00, alpha - op.am())?,
        },
        FredholmMap {
            domain: space(alpha, 0.0).describe(),
            codomain: space(alpha, -m).describe(),
            condition: "α ∉ −Im spec_b(P00)".into(),
            admissible: weight_admissible(&op.imspec_p00, alpha)?,
        },
    ];
    Ok(FredholmReport { alpha, am: op.am(), maps })
}

/// Which regularity statement to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegularityStatement {
    /// `Pu ∈ ẋ^∞C^∞`, `u ∈ x^α H^m_split`.
    SplitSobolev,
    /// `Pu ∈ ẋ^∞C^∞`, `u ∈ x^α L²`.
    L2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentPrediction {
    pub prefactor: f64,
    /// Exponents of the component with the prefactor applied.
    pub index_set: IndexSet,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityPrediction {
    pub statement: RegularityStatement,
    pub alpha: f64,
    pub k: IndexSet,
    pub pi: ComponentPrediction,
    pub perp: ComponentPrediction,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Expansion sets of `Πu` and `Π⊥u` for a solution of `Pu ∈ ẋ^∞C^∞`.
pub fn regularity_predict(op: &SplitOperator, alpha: f64, statement: RegularityStatement) -> Result<RegularityPrediction> {
    op.validate()?;
    let mut warnings = Vec::new();
    let gens: Vec<Generator> = match &op.spec_b {
        Some(points) => points
            .iter()
            .filter(|p| p.lambda_root > alpha + EXP_TOL)
            .map(|p| {
                let k = p.pole_order_k.unwrap_or_else(|| {
                    warnings.push(format!("pole order missing at {}; log power 0 assumed", p.lambda_root));
                    0
                });
                Generator::real(p.lambda_root, k)
            })
            .collect(),
        None => {
            warnings.push("spec_b missing; pole orders taken as simple".into());
            op.imspec_p00.iter().filter(|s| **s > alpha + EXP_TOL).map(|s| Generator::real(*s, 0)).collect()
        }
    };
    let k = IndexSet::from_generators(gens);
    let am = op.am();
    let (pi, perp) = match statement {
        RegularityStatement::SplitSobolev => (
            ComponentPrediction { prefactor: -am, index_set: k.shift(-am) },
            ComponentPrediction { prefactor: 0.0, index_set: k.clone() },
        ),
        RegularityStatement::L2 => (
            ComponentPrediction { prefactor: 0.0, index_set: k.clone() },
            ComponentPrediction { prefactor: am, index_set: k.shift(am) },
        ),
    };
    Ok(RegularityPrediction { statement, alpha, k, pi, perp, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gb() -> SplitOperator {
        SplitOperator::differential(1, 1, 1, (-5..=5).map(f64::from).collect())
    }

    #[test]
    fn gate_and_fredholm() {
        let op = gb();
        assert!(!check_weight(&op, 1.0).unwrap());
        assert!(check_weight(&op, 0.5).unwrap());
        let f = fredholm_report(&op, 0.5).unwrap();
        assert!(f.maps.iter().all(|m| m.admissible));
        let empty = SplitOperator::differential(1, 1, 1, vec![]);
        assert!(check_weight(&empty, 0.5).is_err());
    }

    #[test]
    fn adjoint_is_an_involution() {
        let op = gb();
        assert_eq!(op.adjoint().adjoint(), op);
        let adj = op.adjoint();
        for alpha in [-1.5, 0.5, 2.25] {
            assert_eq!(check_weight(&op, alpha).unwrap(), check_weight(&adj, op.am() - alpha).unwrap());
        }
    }

    #[test]
    fn regularity_shifts() {
        let op = gb().with_spec_b(vec![
            SpecBPoint { lambda_root: 1.0, pole_order_k: Some(2) },
            SpecBPoint { lambda_root: -1.0, pole_order_k: Some(1) },
            SpecBPoint { lambda_root: 3.0, pole_order_k: None },
        ]);
        let r = regularity_predict(&op, 0.5, RegularityStatement::SplitSobolev).unwrap();
        assert!(r.k.contains(crate::index_algebra::Exponent::real(1.0), 1));
        assert!(!r.k.contains(crate::index_algebra::Exponent::real(-1.0), 0));
        assert_eq!(r.pi.index_set, r.k.shift(-1.0));
        assert_eq!(r.warnings.len(), 1);
        let l = regularity_predict(&op, 0.5, RegularityStatement::L2).unwrap();
        assert_eq!(l.perp.index_set, l.k.shift(1.0));
    }

    #[test]
    fn parametrix_replays_for_gauss_bonnet() {
        let op = gb();
        let rep = split_parametrix(&op, 0.5).unwrap();
        assert!(rep.pass, "{:#?}", rep.failures());
        let geo = crate::calculus::Geometry::new(1, 1).unwrap();
        assert!(rep.derivations().all(|d| d.replay(Some(geo)).unwrap()));
    }

    #[test]
    fn parametrix_gate() {
        let err = split_parametrix(&gb(), 1.0).unwrap_err();
        assert!(matches!(err, PhiError::WeightGate(_)));
    }
}
