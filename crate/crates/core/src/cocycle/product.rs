use nalgebra::DMatrix;

use super::field::CocycleField;
use crate::base::{SkewPoint, SkewProduct};
use crate::error::{LabError, Result};
use crate::linalg;
use crate::symplectic::{SymplecticMatrix, SYMPLECTIC_TOLERANCE};

/// Products are re-certified after this many factors.
pub const RECERTIFY_INTERVAL: usize = 50;

/// Relative drift beyond which a corrected product is rejected.
pub const DEGRADATION_LIMIT: f64 = 1e-6;

/// A linear cocycle `(x, v) ↦ (f(x), A(x)v)` over an invertible base.
pub trait LinearCocycle: Sync {
    type Point: Clone + Send + Sync;

    fn half_dim(&self) -> usize;

    /// `A(x)`.
    fn matrix(&self, x: &Self::Point) -> DMatrix<f64>;

    fn forward(&self, x: &Self::Point) -> Self::Point;

    fn backward(&self, x: &Self::Point) -> Self::Point;

    fn dim(&self) -> usize {
        2 * self.half_dim()
    }
}

/// A cocycle field over the skew product.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewCocycle {
    pub field: CocycleField,
    pub skew: SkewProduct,
}

impl SkewCocycle {
    pub fn new(field: CocycleField, skew: SkewProduct) -> Self {
        Self { field, skew }
    }
}

impl LinearCocycle for SkewCocycle {
    type Point = SkewPoint;

    fn half_dim(&self) -> usize {
        self.field.half_dim()
    }

    fn matrix(&self, x: &SkewPoint) -> DMatrix<f64> {
        self.field.matrix_at(x)
    }

    fn forward(&self, x: &SkewPoint) -> SkewPoint {
        self.skew.forward(x)
    }

    fn backward(&self, x: &SkewPoint) -> SkewPoint {
        self.skew.backward(x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CocycleProduct {
    pub matrix: SymplecticMatrix,
    /// Number of symplectic corrections applied along the way.
    pub corrections: usize,
}

fn recertify(m: DMatrix<f64>, corrections: &mut usize) -> Result<DMatrix<f64>> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(LabError::NonFinite);
    }
    let sm = SymplecticMatrix::with_tolerance(m, f64::INFINITY)?;
    if sm.relative_drift() <= SYMPLECTIC_TOLERANCE {
        return Ok(sm.into_entries());
    }
    *corrections += 1;
    let fixed = sm.corrected();
    if fixed.relative_drift() > DEGRADATION_LIMIT {
        return Err(LabError::NumericalDegradation {
            drift: fixed.relative_drift(),
        });
    }
    Ok(fixed.into_entries())
}

/// `Aⁿ(x)`: `A(f^{n−1}x)⋯A(x)` for `n > 0`, `I` for `n = 0`, and
/// `A(fⁿx)⁻¹⋯A(f⁻¹x)⁻¹` for `n < 0`.
pub fn cocycle_product<C: LinearCocycle>(c: &C, x: &C::Point, n: i64) -> Result<CocycleProduct> {
    let dim = c.dim();
    let mut p = DMatrix::identity(dim, dim);
    let mut y = x.clone();
    let mut corrections = 0;
    for k in 0..n.unsigned_abs() as usize {
        if n > 0 {
            p = c.matrix(&y) * p;
            y = c.forward(&y);
        } else {
            y = c.backward(&y);
            p = linalg::symplectic_inverse(&c.matrix(&y)) * p;
        }
        if (k + 1) % RECERTIFY_INTERVAL == 0 {
            p = recertify(p, &mut corrections)?;
        }
    }
    let p = recertify(p, &mut corrections)?;
    Ok(CocycleProduct {
        matrix: SymplecticMatrix::with_tolerance(p, DEGRADATION_LIMIT)?,
        corrections,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{TorusAutomorphism, TrigPoly};
    use crate::cocycle::field::{Factor, ScalarField};
    use crate::linalg::standard_j;

    fn generic() -> SkewCocycle {
        let s1 = standard_j(1) * DMatrix::from_row_slice(2, 2, &[0.4, 0.1, 0.1, -0.3]);
        let s2 = standard_j(1) * DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.2]);
        let field = CocycleField::new(
            1,
            vec![
                Factor::Exp {
                    generator: s1,
                    field: ScalarField::Trig {
                        poly: TrigPoly::constant(3, 0.5).with_cos(&[1, 0, 0], 0.3),
                    },
                },
                Factor::Exp {
                    generator: s2,
                    field: ScalarField::Trig {
                        poly: TrigPoly::zero(3).with_sin(&[0, 1, 1], 0.6),
                    },
                },
            ],
            1.0,
        )
        .unwrap();
        let skew = SkewProduct::new(
            TorusAutomorphism::cat(),
            TrigPoly::zero(2).with_cos(&[1, 0], 0.1),
        );
        SkewCocycle::new(field, skew)
    }

    #[test]
    fn zero_iterates_is_identity() {
        let c = generic();
        let x = SkewPoint::new(0.1, 0.2, 0.3);
        assert_eq!(
            cocycle_product(&c, &x, 0).unwrap().matrix,
            SymplecticMatrix::identity(1)
        );
    }

    #[test]
    fn constant_cocycle_is_matrix_power() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0]);
        let c = SkewCocycle::new(
            CocycleField::constant(SymplecticMatrix::new(m.clone()).unwrap()),
            generic().skew,
        );
        let x = SkewPoint::new(0.4, 0.9, 0.1);
        let p = cocycle_product(&c, &x, 7).unwrap().matrix;
        let mut power = DMatrix::identity(2, 2);
        for _ in 0..7 {
            power *= &m;
        }
        assert_eq!(p.entries(), &power);
    }

    #[test]
    fn cocycle_identity_and_inverse() {
        let c = generic();
        let x = SkewPoint::new(0.37, 0.11, 0.62);
        let (m, n) = (9i64, 13i64);
        let amn = cocycle_product(&c, &x, m + n).unwrap().matrix;
        let an = cocycle_product(&c, &x, n).unwrap().matrix;
        let am = cocycle_product(&c, &c.skew.iterate(&x, n), m).unwrap().matrix;
        let rhs = &am * &an;
        let rel = linalg::op_norm(&(amn.entries() - rhs.entries())) / amn.norm();
        assert!(rel < 1e-12, "{rel}");
        let back = cocycle_product(&c, &c.skew.iterate(&x, n), -n).unwrap().matrix;
        let rel = linalg::op_norm(&(back.entries() - an.inverse().entries())) / an.norm();
        assert!(rel < 1e-12, "{rel}");
    }
}
