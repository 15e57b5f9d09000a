use std::ops::Mul;

use nalgebra::DMatrix;
use serde::{Serialize, Serializer};

use crate::error::{LabError, Result};
use crate::linalg;

/// Certification threshold for the relative drift `‖AᵀJA − J‖ / ‖A‖²`.
pub const SYMPLECTIC_TOLERANCE: f64 = 1e-10;

/// A `2d × 2d` matrix certified against the standard form.
///
/// `drift` caches the absolute defect `‖AᵀJA − J‖`. Certification compares
/// the drift relative to `‖A‖²` (which is `1` for the identity and grows with
/// long products), so products with large norms are judged by the precision
/// they can actually carry.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    entries: DMatrix<f64>,
    drift: f64,
}

impl SymplecticMatrix {
    /// Certify `entries` with the default tolerance.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerance(entries, SYMPLECTIC_TOLERANCE)
    }

    pub fn with_tolerance(entries: DMatrix<f64>, tolerance: f64) -> Result<Self> {
        if !entries.is_square() || entries.nrows() % 2 != 0 || entries.nrows() == 0 {
            return Err(LabError::DegenerateInput(format!(
                "symplectic matrix must be 2d x 2d, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(LabError::NonFinite);
        }
        let m = Self::trusted(entries);
        let rel = m.relative_drift();
        if rel > tolerance {
            return Err(LabError::NotSymplectic {
                drift: rel,
                tolerance,
            });
        }
        Ok(m)
    }

    /// Wrap a matrix that is symplectic by construction; the drift is still
    /// measured and cached.
    pub(crate) fn trusted(entries: DMatrix<f64>) -> Self {
        let drift = linalg::symplectic_drift(&entries);
        Self { entries, drift }
    }

    pub fn identity(half_dim: usize) -> Self {
        Self {
            entries: DMatrix::identity(2 * half_dim, 2 * half_dim),
            drift: 0.0,
        }
    }

    /// Block rotation `[[cos θ I, sin θ I], [-sin θ I, cos θ I]] = exp(θ J)`.
    pub fn block_rotation(half_dim: usize, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let j = linalg::standard_j(half_dim);
        let n = 2 * half_dim;
        Self::trusted(DMatrix::identity(n, n) * c + j * s)
    }

    pub fn half_dim(&self) -> usize {
        self.entries.nrows() / 2
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<f64> {
        self.entries
    }

    /// Absolute drift `‖AᵀJA − J‖`.
    pub fn drift(&self) -> f64 {
        self.drift
    }

    /// Drift relative to `‖A‖²`.
    pub fn relative_drift(&self) -> f64 {
        let n = linalg::op_norm(&self.entries);
        self.drift / (n * n).max(1.0)
    }

    pub fn norm(&self) -> f64 {
        linalg::op_norm(&self.entries)
    }

    /// Exact inverse `-J Aᵀ J`.
    pub fn inverse(&self) -> Self {
        Self {
            entries: linalg::symplectic_inverse(&self.entries),
            drift: self.drift,
        }
    }

    /// Distance to the identity in operator norm.
    pub fn distance_to_identity(&self) -> f64 {
        let n = self.dim();
        linalg::op_norm(&(&self.entries - DMatrix::identity(n, n)))
    }

    /// One Newton step towards `Sp(2d, ℝ)`: `A ← A (I + ½ J E)`, `E = AᵀJA − J`.
    ///
    /// First-order exact: the defect of the result is `O(‖E‖²)`.
    pub fn corrected(&self) -> Self {
        let d = self.half_dim();
        let j = linalg::standard_j(d);
        let e = self.entries.transpose() * linalg::j_times(&self.entries) - &j;
        let n = self.dim();
        let fix = DMatrix::identity(n, n) + linalg::j_times(&e) * 0.5;
        Self::trusted(&self.entries * fix)
    }

    /// Row-major nested vectors, the serialization layout used in reports.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.entries
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }
}

impl Mul for &SymplecticMatrix {
    type Output = SymplecticMatrix;

    fn mul(self, rhs: &SymplecticMatrix) -> SymplecticMatrix {
        SymplecticMatrix::trusted(&self.entries * &rhs.entries)
    }
}

impl Mul for SymplecticMatrix {
    type Output = SymplecticMatrix;

    fn mul(self, rhs: SymplecticMatrix) -> SymplecticMatrix {
        &self * &rhs
    }
}

impl Serialize for SymplecticMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}
