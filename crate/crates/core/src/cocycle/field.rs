//! Cocycles `A(x) = Π_k exp(ψ_k(x) S_k)` with `S_k ∈ 𝔰𝔭(2d, ℝ)`.
//!
//! Each factor is symplectic by construction, so `A(x)` is too; the Lie
//! algebra condition `S_kᵀJ + JS_k = 0` is checked once on construction.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::base::{FiberCoord, SkewPoint, TorusPoint};
use crate::base::{from_fixed, TrigPoly};
use crate::error::{LabError, Result};
use crate::linalg;
use crate::symplectic::{SymplecticMatrix, Transvection};

/// Tolerance for `SᵀJ + JS = 0`, relative to `max(1, ‖S‖)`.
pub const LIE_ALGEBRA_TOL: f64 = 1e-12;

/// Smooth cut-off `ρ: [0, ∞) → [0, 1]`: `1` on `[0, ½]`, `0` on `[1, ∞)`,
/// `3u² − 2u³` with `u = 2(1 − s)` in between. Lipschitz constant `3`.
pub fn bump_profile(s: f64) -> f64 {
    if s <= 0.5 {
        1.0
    } else if s >= 1.0 {
        0.0
    } else {
        let u = 2.0 * (1.0 - s);
        u * u * (3.0 - 2.0 * u)
    }
}

pub const BUMP_PROFILE_LIPSCHITZ: f64 = 3.0;

/// Bump supported in `{dist(x, center) < radius}` (and, optionally, a fiber
/// arc), equal to `1` on the half-size set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bump {
    pub center: TorusPoint,
    pub radius: f64,
    /// `(arc center, arc half-width)`; `None` covers the whole fiber.
    pub fiber_arc: Option<(FiberCoord, f64)>,
}

impl Bump {
    pub fn eval(&self, p: &SkewPoint) -> f64 {
        let base = bump_profile(self.center.distance(&p.x) / self.radius);
        if base == 0.0 {
            return 0.0;
        }
        match self.fiber_arc {
            None => base,
            Some((c, w)) => base * bump_profile(c.distance(&p.t) / w),
        }
    }

    pub fn lipschitz_bound(&self) -> f64 {
        let base = BUMP_PROFILE_LIPSCHITZ / self.radius;
        match self.fiber_arc {
            None => base,
            Some((_, w)) => base + BUMP_PROFILE_LIPSCHITZ / w,
        }
    }
}

/// Scalar functions `ψ: 𝕋² × S¹ → ℝ` driving the factors.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarField {
    /// Trigonometric polynomial in `(x₁, x₂, t)`.
    Trig { poly: TrigPoly },
    /// A coordinate lifted to `[0, 1)` (`0, 1` base, `2` fiber). Only
    /// admissible when `exp(S) = I`, which makes the factor continuous.
    Coordinate { index: usize },
    Bump { bump: Bump },
}

impl ScalarField {
    pub fn eval(&self, p: &SkewPoint) -> f64 {
        match self {
            ScalarField::Trig { poly } => poly.eval_fixed(&p.raw()),
            ScalarField::Coordinate { index } => from_fixed(p.raw()[*index]),
            ScalarField::Bump { bump } => bump.eval(p),
        }
    }

    pub fn sup_bound(&self) -> f64 {
        match self {
            ScalarField::Trig { poly } => poly.sup_bound(),
            ScalarField::Coordinate { .. } | ScalarField::Bump { .. } => 1.0,
        }
    }

    pub fn lipschitz_bound(&self) -> f64 {
        match self {
            ScalarField::Trig { poly } => poly.lipschitz_bound(),
            ScalarField::Coordinate { .. } => 1.0,
            ScalarField::Bump { bump } => bump.lipschitz_bound(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Factor {
    Exp {
        #[serde(serialize_with = "serialize_rows")]
        generator: DMatrix<f64>,
        field: ScalarField,
    },
    Fixed {
        matrix: SymplecticMatrix,
    },
}

fn serialize_rows<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize as _;
    let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
    rows.serialize(s)
}

impl Factor {
    fn eval(&self, p: &SkewPoint) -> Option<DMatrix<f64>> {
        match self {
            Factor::Exp { generator, field } => {
                let psi = field.eval(p);
                if psi == 0.0 {
                    None
                } else {
                    Some(linalg::expm(&(generator * psi)))
                }
            }
            Factor::Fixed { matrix } => Some(matrix.entries().clone()),
        }
    }

    /// `(sup ‖F‖, Lip F)` from the coefficients.
    fn bounds(&self) -> (f64, f64) {
        match self {
            Factor::Exp { generator, field } => {
                let s = linalg::op_norm(generator);
                let sup = (s * field.sup_bound()).exp();
                (sup, s * sup * field.lipschitz_bound())
            }
            Factor::Fixed { matrix } => (matrix.norm(), 0.0),
        }
    }
}

/// Lie algebra defect `‖SᵀJ + JS‖`.
pub fn lie_algebra_defect(s: &DMatrix<f64>) -> f64 {
    let js = linalg::j_times(s);
    linalg::op_norm(&(js.transpose() * -1.0 + &js))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CocycleField {
    half_dim: usize,
    factors: Vec<Factor>,
    alpha: f64,
}

impl CocycleField {
    pub fn new(half_dim: usize, factors: Vec<Factor>, alpha: f64) -> Result<Self> {
        if half_dim == 0 {
            return Err(LabError::InvalidParameter("half_dim must be positive".into()));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(LabError::InvalidParameter(format!(
                "Hölder exponent must lie in (0, 1], got {alpha}"
            )));
        }
        let n = 2 * half_dim;
        for f in &factors {
            match f {
                Factor::Exp { generator, field } => {
                    if generator.nrows() != n || generator.ncols() != n {
                        return Err(LabError::DimensionMismatch {
                            expected: n,
                            found: generator.nrows(),
                        });
                    }
                    if generator.iter().any(|x| !x.is_finite()) {
                        return Err(LabError::NonFinite);
                    }
                    let defect = lie_algebra_defect(generator);
                    if defect > LIE_ALGEBRA_TOL * linalg::op_norm(generator).max(1.0) {
                        return Err(LabError::NotInLieAlgebra { defect });
                    }
                    if let ScalarField::Coordinate { index } = field {
                        if *index > 2 {
                            return Err(LabError::InvalidParameter(format!(
                                "coordinate index {index} out of range"
                            )));
                        }
                        let e = linalg::expm(generator);
                        if (e - DMatrix::identity(n, n)).amax() > 1e-10 {
                            return Err(LabError::InvalidParameter(
                                "coordinate-driven factors need exp(S) = I".into(),
                            ));
                        }
                    }
                    if let ScalarField::Trig { poly } = field {
                        if poly.dim() != 3 {
                            return Err(LabError::InvalidParameter(
                                "factor polynomials are functions of (x1, x2, t)".into(),
                            ));
                        }
                    }
                }
                Factor::Fixed { matrix } => {
                    if matrix.dim() != n {
                        return Err(LabError::DimensionMismatch {
                            expected: n,
                            found: matrix.dim(),
                        });
                    }
                }
            }
        }
        Ok(Self {
            half_dim,
            factors,
            alpha,
        })
    }

    pub fn identity(half_dim: usize) -> Self {
        Self::new(half_dim, Vec::new(), 1.0).expect("valid")
    }

    /// The constant cocycle `A(x) ≡ m`.
    pub fn constant(m: SymplecticMatrix) -> Self {
        let d = m.half_dim();
        Self::new(d, vec![Factor::Fixed { matrix: m }], 1.0).expect("valid")
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        Self::new(self.half_dim, std::mem::take(&mut self.factors), alpha)
    }

    pub fn half_dim(&self) -> usize {
        self.half_dim
    }

    pub fn dim(&self) -> usize {
        2 * self.half_dim
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// `F · A`.
    pub fn prepended(&self, factors: Vec<Factor>) -> Result<Self> {
        let mut all = factors;
        all.extend(self.factors.iter().cloned());
        Self::new(self.half_dim, all, self.alpha)
    }

    /// `A · F`.
    pub fn appended(&self, factors: Vec<Factor>) -> Result<Self> {
        let mut all = self.factors.clone();
        all.extend(factors);
        Self::new(self.half_dim, all, self.alpha)
    }

    /// `A(p)` without certification.
    pub fn matrix_at(&self, p: &SkewPoint) -> DMatrix<f64> {
        let n = self.dim();
        let mut acc: Option<DMatrix<f64>> = None;
        for f in &self.factors {
            if let Some(m) = f.eval(p) {
                acc = Some(match acc {
                    None => m,
                    Some(a) => a * m,
                });
            }
        }
        acc.unwrap_or_else(|| DMatrix::identity(n, n))
    }

    /// `A(p)`, certified symplectic.
    pub fn evaluate(&self, p: &SkewPoint) -> Result<SymplecticMatrix> {
        SymplecticMatrix::new(self.matrix_at(p))
    }

    /// `sup ‖A‖` bound from the coefficients.
    pub fn sup_norm_bound(&self) -> f64 {
        self.factors.iter().map(|f| f.bounds().0).product()
    }

    /// Lipschitz bound on `M` from the coefficients.
    pub fn lipschitz_bound(&self) -> f64 {
        let b: Vec<(f64, f64)> = self.factors.iter().map(Factor::bounds).collect();
        (0..b.len())
            .map(|k| {
                b.iter()
                    .enumerate()
                    .map(|(j, &(sup, lip))| if j == k { lip } else { sup })
                    .product::<f64>()
            })
            .sum()
    }

    /// True when no factor depends on the point.
    pub fn is_constant(&self) -> bool {
        self.factors.iter().all(|f| match f {
            Factor::Fixed { .. } => true,
            Factor::Exp { field, generator } => {
                generator.amax() == 0.0
                    || matches!(field, ScalarField::Trig { poly } if poly.is_constant())
            }
        })
    }
}

/// Factor `exp(ψ · N)` for the nilpotent generator of a transvection.
pub fn transvection_factor(t: &Transvection, field: ScalarField) -> Factor {
    Factor::Exp {
        generator: t.generator(),
        field,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::standard_j;

    fn sym2(a: f64, b: f64, c: f64) -> DMatrix<f64> {
        // J·(symmetric) is in the Lie algebra
        standard_j(1) * DMatrix::from_row_slice(2, 2, &[a, b, b, c])
    }

    #[test]
    fn profile_shape() {
        assert_eq!(bump_profile(0.3), 1.0);
        assert_eq!(bump_profile(1.2), 0.0);
        assert!((bump_profile(0.75) - 0.5).abs() < 1e-15);
        // derivative at s = 0.75 equals the Lipschitz constant
        let h = 1e-6;
        let slope = (bump_profile(0.75 - h) - bump_profile(0.75 + h)) / (2.0 * h);
        assert!((slope - BUMP_PROFILE_LIPSCHITZ).abs() < 1e-6);
    }

    #[test]
    fn rejects_non_hamiltonian_generator() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let field = ScalarField::Trig {
            poly: TrigPoly::constant(3, 1.0),
        };
        assert!(matches!(
            CocycleField::new(1, vec![Factor::Exp { generator: g, field }], 1.0),
            Err(LabError::NotInLieAlgebra { .. })
        ));
    }

    #[test]
    fn coordinate_field_needs_periodic_generator() {
        let field = ScalarField::Coordinate { index: 0 };
        let bad = CocycleField::new(
            1,
            vec![Factor::Exp {
                generator: sym2(1.0, 0.0, 1.0),
                field: field.clone(),
            }],
            1.0,
        );
        assert!(bad.is_err());
        let good = CocycleField::new(
            1,
            vec![Factor::Exp {
                generator: standard_j(1) * std::f64::consts::TAU,
                field,
            }],
            1.0,
        );
        assert!(good.is_ok());
    }

    #[test]
    fn evaluation_is_ordered_product() {
        let s1 = sym2(0.3, 0.1, -0.2);
        let s2 = sym2(-0.1, 0.4, 0.05);
        let p1 = TrigPoly::constant(3, 0.5).with_cos(&[1, 0, 0], 0.2);
        let p2 = TrigPoly::zero(3).with_sin(&[0, 1, 1], 0.7);
        let field = CocycleField::new(
            1,
            vec![
                Factor::Exp {
                    generator: s1.clone(),
                    field: ScalarField::Trig { poly: p1.clone() },
                },
                Factor::Exp {
                    generator: s2.clone(),
                    field: ScalarField::Trig { poly: p2.clone() },
                },
            ],
            1.0,
        )
        .unwrap();
        let p = SkewPoint::new(0.1, 0.2, 0.3);
        let a = field.evaluate(&p).unwrap();
        let direct = (s1 * p1.eval_fixed(&p.raw())).exp() * (s2 * p2.eval_fixed(&p.raw())).exp();
        assert!((a.entries() - direct).amax() < 1e-13);
    }

    #[test]
    fn bump_field_vanishes_outside() {
        let b = Bump {
            center: TorusPoint::new(0.5, 0.5),
            radius: 0.1,
            fiber_arc: None,
        };
        assert_eq!(b.eval(&SkewPoint::new(0.5, 0.5, 0.9)), 1.0);
        assert_eq!(b.eval(&SkewPoint::new(0.5, 0.61, 0.2)), 0.0);
        assert_eq!(b.eval(&SkewPoint::new(0.0, 0.0, 0.0)), 0.0);
    }
}
