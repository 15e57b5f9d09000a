use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::linalg;

/// The standard symplectic form on `ℝ^{2d}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymplecticForm {
    half_dim: usize,
}

impl SymplecticForm {
    pub fn new(half_dim: usize) -> Self {
        assert!(half_dim > 0, "symplectic form needs d >= 1");
        Self { half_dim }
    }

    pub fn half_dim(&self) -> usize {
        self.half_dim
    }

    pub fn dim(&self) -> usize {
        2 * self.half_dim
    }

    /// `J = [[0, I_d], [-I_d, 0]]`.
    pub fn matrix(&self) -> DMatrix<f64> {
        linalg::standard_j(self.half_dim)
    }

    /// `ω(u, v) = uᵀ J v`.
    pub fn omega(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        u.dot(&linalg::apply_j(v))
    }
}
