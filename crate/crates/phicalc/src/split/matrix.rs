use std::fmt;

use serde::{Deserialize, Serialize};

use crate::calculus::{
    compose_alternatives, sum_contained_in, Composite, Derivation, Geometry, OpClass, Rule, SumDisplay,
};
use crate::error::Result;
use crate::index_algebra::Face;

/// A 2×2 matrix in the `(Π, Π⊥)` splitting; each entry is a sum of classes
/// and an empty entry is zero.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassMatrix(pub [[Vec<OpClass>; 2]; 2]);

impl ClassMatrix {
    pub fn zero() -> Self {
        ClassMatrix::default()
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> Vec<OpClass>) -> Self {
        ClassMatrix(std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))))
    }

    pub fn diag(a: Vec<OpClass>, d: Vec<OpClass>) -> Self {
        ClassMatrix([[a, Vec::new()], [Vec::new(), d]])
    }

    pub fn offdiag(b: Vec<OpClass>, c: Vec<OpClass>) -> Self {
        ClassMatrix([[Vec::new(), b], [c, Vec::new()]])
    }

    /// Expands a projector-decorated class into its four entries.
    pub fn expand(c: &OpClass) -> Self {
        let m = c.expand_projector();
        ClassMatrix::from_fn(|i, j| vec![m[i][j].clone()])
    }

    pub fn get(&self, i: usize, j: usize) -> &[OpClass] {
        &self.0[i][j]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(|e| e.iter().all(OpClass::is_zero))
    }

    pub fn sum(&self, other: &ClassMatrix) -> ClassMatrix {
        ClassMatrix::from_fn(|i, j| {
            let mut v = self.0[i][j].clone();
            for c in &other.0[i][j] {
                if !v.contains(c) {
                    v.push(c.clone());
                }
            }
            v
        })
    }

    pub fn map(&self, f: impl Fn(&OpClass) -> OpClass) -> ClassMatrix {
        ClassMatrix::from_fn(|i, j| self.0[i][j].iter().map(&f).collect())
    }

    pub fn left_power(&self, c: f64) -> ClassMatrix {
        self.map(|x| x.clone().with_left(c))
    }

    pub fn vanishing_at(&self, face: Face) -> ClassMatrix {
        self.map(|x| x.clone().vanishing_at(face))
    }

    pub fn diagonal_part(&self) -> ClassMatrix {
        ClassMatrix::diag(self.0[0][0].clone(), self.0[1][1].clone())
    }

    pub fn offdiagonal_part(&self) -> ClassMatrix {
        ClassMatrix::offdiag(self.0[0][1].clone(), self.0[1][0].clone())
    }

    /// Formal adjoint: transpose and take adjoint classes.
    pub fn adjoint(&self) -> ClassMatrix {
        ClassMatrix::from_fn(|i, j| self.0[j][i].iter().map(OpClass::adjoint).collect())
    }

    /// Keeps `asserted` entries only where `computed` is nonzero.
    pub fn masked_by(asserted: &ClassMatrix, computed: &ClassMatrix) -> ClassMatrix {
        ClassMatrix::from_fn(|i, j| {
            if computed.0[i][j].iter().all(OpClass::is_zero) {
                Vec::new()
            } else {
                asserted.0[i][j].clone()
            }
        })
    }

    pub fn display_entries(&self) -> [[String; 2]; 2] {
        std::array::from_fn(|i| std::array::from_fn(|j| SumDisplay(&self.0[i][j]).to_string()))
    }
}

impl fmt::Display for ClassMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = self.display_entries();
        write!(f, "[[{}, {}], [{}, {}]]", e[0][0], e[0][1], e[1][0], e[1][1])
    }
}

/// Verdict for one matrix entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryCheck {
    pub row: usize,
    pub col: usize,
    pub computed: String,
    pub asserted: String,
    pub containment: Vec<Rule>,
    pub derivations: Vec<Derivation>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Checks `computed ⊂ asserted` entrywise.
pub fn check_entries(computed: &ClassMatrix, asserted: &ClassMatrix) -> Vec<EntryCheck> {
    let mut out = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            let rules = sum_contained_in(computed.get(i, j), asserted.get(i, j));
            out.push(EntryCheck {
                row: i,
                col: j,
                computed: SumDisplay(computed.get(i, j)).to_string(),
                asserted: SumDisplay(asserted.get(i, j)).to_string(),
                pass: rules.is_some(),
                containment: rules.unwrap_or_default(),
                derivations: Vec::new(),
                note: None,
            });
        }
    }
    out
}

/// Sum of matrix products `Σ A_t B_t`. For every pair of summands the first
/// composition alternative that lands in `target` is kept.
#[allow(clippy::needless_range_loop)]
pub fn products_against(
    pairs: &[(&ClassMatrix, &ClassMatrix)],
    target: &ClassMatrix,
    geo: Geometry,
) -> Result<(ClassMatrix, Vec<EntryCheck>)> {
    let mut computed = ClassMatrix::zero();
    let mut derivs: [[Vec<Derivation>; 2]; 2] = Default::default();
    for (a, b) in pairs {
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for s in a.get(i, k) {
                        for t in b.get(k, j) {
                            if s.is_zero() || t.is_zero() {
                                continue;
                            }
                            let alts = compose_alternatives(s, t, Some(geo))?;
                            let chosen: Composite = alts
                                .iter()
                                .find(|c| sum_contained_in(&c.result, target.get(i, j)).is_some())
                                .unwrap_or(&alts[0])
                                .clone();
                            for r in &chosen.result {
                                if !r.is_zero() && !computed.0[i][j].contains(r) {
                                    computed.0[i][j].push(r.clone());
                                }
                            }
                            derivs[i][j].push(Derivation { left: s.clone(), right: t.clone(), composite: chosen });
                        }
                    }
                }
            }
        }
    }
    let mut checks = check_entries(&computed, target);
    for c in &mut checks {
        c.derivations = std::mem::take(&mut derivs[c.row][c.col]);
    }
    Ok((computed, checks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{Kind, Side};

    #[test]
    fn projector_expansion_and_adjoint() {
        let r = OpClass::weight(Kind::Phi, f64::NEG_INFINITY, 0.5)
            .with_left(f64::INFINITY)
            .with_proj(Side::Right, 0.0, 2.0);
        let m = ClassMatrix::expand(&r);
        assert_eq!(m.get(1, 1)[0].xr, 2.0);
        let adj = m.adjoint();
        assert_eq!(adj.get(1, 0)[0].xl, 2.0);
        assert_eq!(adj.get(1, 0)[0].xr, f64::INFINITY);
        assert_eq!(adj.adjoint(), m);
    }

    #[test]
    fn zero_products_are_zero() {
        let geo = Geometry::new(1, 1).unwrap();
        let a = ClassMatrix::diag(vec![OpClass::weight(Kind::Phi, 0.0, 0.0)], vec![]);
        let (c, checks) = products_against(&[(&a, &ClassMatrix::zero())], &ClassMatrix::zero(), geo).unwrap();
        assert!(c.is_zero());
        assert!(checks.iter().all(|c| c.pass));
    }
}
