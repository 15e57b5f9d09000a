use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{SymplecticForm, SymplecticMatrix};
use crate::error::{LabError, Result};
use crate::linalg;

/// Symplectic transvection `u ↦ u + a·ω(u, v)·v` with unit direction `v`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transvection {
    direction: Vec<f64>,
    strength: f64,
}

impl Transvection {
    /// Normalizes `v`; fails on the zero vector.
    pub fn new(v: &DVector<f64>, strength: f64) -> Result<Self> {
        if v.len() % 2 != 0 || v.is_empty() {
            return Err(LabError::DegenerateInput(format!(
                "transvection direction must live in an even dimension, got {}",
                v.len()
            )));
        }
        let norm = v.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(LabError::DegenerateInput(
                "transvection direction is the zero vector".into(),
            ));
        }
        Ok(Self {
            direction: (v / norm).iter().copied().collect(),
            strength,
        })
    }

    pub fn direction(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.direction)
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    /// Nilpotent generator `N = a · v (Jv)ᵀ`, so that `τ = I + N` and `N² = 0`.
    pub fn generator(&self) -> DMatrix<f64> {
        let v = self.direction();
        let jv = linalg::apply_j(&v);
        &v * jv.transpose() * self.strength
    }

    pub fn matrix(&self) -> SymplecticMatrix {
        let n = self.direction.len();
        SymplecticMatrix::trusted(DMatrix::identity(n, n) + self.generator())
    }

    /// `τ(u)`, evaluated from the defining formula.
    pub fn apply(&self, form: &SymplecticForm, u: &DVector<f64>) -> DVector<f64> {
        let v = self.direction();
        u + &v * (self.strength * form.omega(u, &v))
    }

    /// `‖τ − I‖ = |a|` for a unit direction.
    pub fn distance_to_identity(&self) -> f64 {
        self.strength.abs()
    }
}

/// Matrix of `u ↦ u + a·ω(u, v̂)·v̂` where `v̂ = v/‖v‖`.
pub fn transvection_matrix(
    form: &SymplecticForm,
    v: &DVector<f64>,
    a: f64,
) -> Result<SymplecticMatrix> {
    if v.len() != form.dim() {
        return Err(LabError::DimensionMismatch {
            expected: form.dim(),
            found: v.len(),
        });
    }
    let t = Transvection::new(v, a)?;
    SymplecticMatrix::new(t.matrix().into_entries())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_computed_plane_example() {
        // ω((0,1),(1,0)) = -1, so (0,1) ↦ (0,1) - (1,0) = (-1,1).
        let form = SymplecticForm::new(1);
        let v = DVector::from_vec(vec![1.0, 0.0]);
        let m = transvection_matrix(&form, &v, 1.0).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, 0.0, 1.0]);
        assert_eq!(m.entries(), &expected);
        let u = DVector::from_vec(vec![0.0, 1.0]);
        assert_eq!(m.entries() * &u, DVector::from_vec(vec![-1.0, 1.0]));
    }

    #[test]
    fn zero_strength_is_identity() {
        let form = SymplecticForm::new(2);
        let v = DVector::from_vec(vec![0.3, -1.0, 2.0, 0.5]);
        let m = transvection_matrix(&form, &v, 0.0).unwrap();
        assert_eq!(m.entries(), &DMatrix::identity(4, 4));
    }

    #[test]
    fn direction_is_fixed() {
        let form = SymplecticForm::new(2);
        let v = DVector::from_vec(vec![0.3, -1.0, 2.0, 0.5]);
        let m = transvection_matrix(&form, &v, 3.7).unwrap();
        let image = m.entries() * &v;
        assert!((image - &v).amax() < 1e-14);
    }

    #[test]
    fn zero_vector_rejected() {
        let form = SymplecticForm::new(1);
        let v = DVector::zeros(2);
        assert!(matches!(
            transvection_matrix(&form, &v, 1.0),
            Err(LabError::DegenerateInput(_))
        ));
    }

    #[test]
    fn formula_and_matrix_agree() {
        let form = SymplecticForm::new(2);
        let v = DVector::from_vec(vec![1.0, 2.0, -0.5, 0.25]);
        let t = Transvection::new(&v, 0.8).unwrap();
        let u = DVector::from_vec(vec![-0.3, 0.7, 1.1, 0.0]);
        assert!((t.apply(&form, &u) - t.matrix().entries() * &u).amax() < 1e-14);
    }

    fn vec_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-1.0f64..1.0, n)
            .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
    }

    proptest! {
        #[test]
        fn one_parameter_group(v in vec_strategy(4), a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let form = SymplecticForm::new(2);
            let v = DVector::from_vec(v);
            let ta = transvection_matrix(&form, &v, a).unwrap();
            let tb = transvection_matrix(&form, &v, b).unwrap();
            let tab = transvection_matrix(&form, &v, a + b).unwrap();
            prop_assert!(((&ta * &tb).entries() - tab.entries()).amax() <= 1e-12);
        }

        #[test]
        fn symplectic_and_rank_one(v in vec_strategy(6), a in -3.0f64..3.0) {
            let form = SymplecticForm::new(3);
            let t = transvection_matrix(&form, &DVector::from_vec(v), a).unwrap();
            prop_assert!(t.drift() <= 1e-12);
            let diff = t.entries() - DMatrix::identity(6, 6);
            prop_assert!(linalg::rank(&diff, 1e-10) <= 1);
        }

        #[test]
        fn fixes_the_omega_orthogonal_hyperplane(v in vec_strategy(4), u in vec_strategy(4), a in -2.0f64..2.0) {
            let form = SymplecticForm::new(2);
            let v = DVector::from_vec(v);
            let u = DVector::from_vec(u);
            // project u onto (ℝv)^{⊥ω}
            let jv = linalg::apply_j(&v);
            let h = &u - &jv * (u.dot(&jv) / jv.dot(&jv));
            prop_assert!(form.omega(&h, &v).abs() < 1e-12);
            let t = transvection_matrix(&form, &v, a).unwrap();
            prop_assert!((t.entries() * &h - &h).amax() < 1e-12);
        }
    }
}
