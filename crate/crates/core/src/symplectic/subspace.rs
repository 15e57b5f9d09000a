use nalgebra::{DMatrix, DVector};
use serde::{Serialize, Serializer};

use super::{SymplecticForm, SymplecticMatrix};
use crate::error::{LabError, Result};
use crate::linalg;

/// Rank threshold used when orthonormalizing spanning sets.
const SPAN_TOL: f64 = 1e-12;

/// A linear subspace of `ℝ^n` stored by a column-orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: DMatrix<f64>,
}

impl Subspace {
    /// Span of the columns of `vectors`, orthonormalized by SVD.
    pub fn span(vectors: &DMatrix<f64>) -> Self {
        Self {
            basis: linalg::column_space(vectors, SPAN_TOL),
        }
    }

    pub fn from_vectors(ambient_dim: usize, vectors: &[DVector<f64>]) -> Self {
        let m = DMatrix::from_fn(ambient_dim, vectors.len(), |i, j| vectors[j][i]);
        Self::span(&m)
    }

    /// Coordinate subspace `span{e_i : i ∈ indices}` (0-based).
    pub fn coordinate(ambient_dim: usize, indices: &[usize]) -> Self {
        let basis = DMatrix::from_fn(ambient_dim, indices.len(), |i, j| {
            if i == indices[j] {
                1.0
            } else {
                0.0
            }
        });
        Self { basis }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            basis: DMatrix::zeros(ambient_dim, 0),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            basis: DMatrix::identity(ambient_dim, ambient_dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    /// Image under a linear map.
    pub fn image(&self, map: &DMatrix<f64>) -> Self {
        Self::span(&(map * &self.basis))
    }

    pub fn transformed(&self, map: &SymplecticMatrix) -> Self {
        self.image(map.entries())
    }

    /// `V + W`.
    pub fn sum(&self, other: &Subspace) -> Self {
        let mut m = DMatrix::zeros(self.ambient_dim(), self.dim() + other.dim());
        m.view_mut((0, 0), (self.ambient_dim(), self.dim()))
            .copy_from(&self.basis);
        m.view_mut((0, self.dim()), (self.ambient_dim(), other.dim()))
            .copy_from(&other.basis);
        Self::span(&m)
    }

    /// `V ∩ W`, computed from the null space of `[V | -W]`.
    pub fn intersection(&self, other: &Subspace, tol: f64) -> Self {
        let n = self.ambient_dim();
        if self.dim() == 0 || other.dim() == 0 {
            return Self::zero(n);
        }
        let stacked = concat(&self.basis, &(-&other.basis));
        let coeffs = linalg::null_space(&stacked, tol);
        let a = coeffs.rows(0, self.dim()).into_owned();
        Self::span(&(&self.basis * a))
    }

    /// Euclidean orthogonal complement.
    pub fn orthogonal_complement(&self) -> Self {
        let n = self.ambient_dim();
        if self.dim() == 0 {
            return Self::full(n);
        }
        Self {
            basis: linalg::null_space(&self.basis.transpose(), SPAN_TOL),
        }
    }

    /// `‖P_V − P_W‖`; `1` when the dimensions differ.
    pub fn distance(&self, other: &Subspace) -> f64 {
        if self.dim() != other.dim() {
            return 1.0;
        }
        linalg::op_norm(&(self.projector() - other.projector()))
    }

    /// Smallest principal angle between `V` and `W` (radians).
    ///
    /// Computed from `σ_min((I − P_W) V)`, which stays accurate for tiny
    /// angles. Zero exactly when the subspaces intersect nontrivially.
    pub fn min_angle(&self, other: &Subspace) -> f64 {
        if self.dim() == 0 || other.dim() == 0 {
            return std::f64::consts::FRAC_PI_2;
        }
        let (small, large) = if self.dim() <= other.dim() {
            (self, other)
        } else {
            (other, self)
        };
        let residual = &small.basis - large.projector() * &small.basis;
        linalg::min_singular_value(&residual).clamp(0.0, 1.0).asin()
    }

    /// Angle between a nonzero vector and the subspace.
    pub fn angle_to(&self, v: &DVector<f64>) -> f64 {
        let norm = v.norm();
        if self.dim() == 0 {
            return std::f64::consts::FRAC_PI_2;
        }
        let perp = v - self.projector() * v;
        (perp.norm() / norm).clamp(0.0, 1.0).asin()
    }

    pub fn contains(&self, v: &DVector<f64>, tol: f64) -> bool {
        self.angle_to(v) <= tol
    }
}

impl Serialize for Subspace {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let cols: Vec<Vec<f64>> = self
            .basis
            .column_iter()
            .map(|c| c.iter().copied().collect())
            .collect();
        cols.serialize(serializer)
    }
}

fn concat(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    m.view_mut((0, a.ncols()), (b.nrows(), b.ncols()))
        .copy_from(b);
    m
}

/// `dim(V ∩ W) = dim V + dim W − rank [V | W]`, rank decided at `tol · σ_max`.
pub fn intersection_dim(v: &Subspace, w: &Subspace, tol: f64) -> Result<usize> {
    if v.ambient_dim() != w.ambient_dim() {
        return Err(LabError::DimensionMismatch {
            expected: v.ambient_dim(),
            found: w.ambient_dim(),
        });
    }
    if v.dim() == 0 || w.dim() == 0 {
        return Ok(0);
    }
    let r = linalg::rank(&concat(v.basis(), w.basis()), tol);
    Ok(v.dim() + w.dim() - r)
}

/// `V^{⊥ω} = {u : ω(u, v) = 0 ∀ v ∈ V}`, i.e. the Euclidean complement of `J V`.
pub fn symplectic_complement(v: &Subspace, form: &SymplecticForm) -> Result<Subspace> {
    if v.ambient_dim() != form.dim() {
        return Err(LabError::DimensionMismatch {
            expected: form.dim(),
            found: v.ambient_dim(),
        });
    }
    if v.dim() == 0 {
        return Ok(Subspace::full(form.dim()));
    }
    let jv = Subspace::span(&linalg::j_times(v.basis()));
    Ok(jv.orthogonal_complement())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        v
    }

    #[test]
    fn disjoint_coordinate_spans() {
        let v = Subspace::coordinate(4, &[0, 1]);
        let w = Subspace::coordinate(4, &[2, 3]);
        assert_eq!(intersection_dim(&v, &w, 1e-8).unwrap(), 0);
    }

    #[test]
    fn identical_subspaces() {
        let v = Subspace::coordinate(4, &[0, 2]);
        assert_eq!(intersection_dim(&v, &v, 1e-8).unwrap(), 2);
    }

    #[test]
    fn one_dimensional_overlap() {
        // rank [e1 e2 e2 e3] = 3 by hand, so the overlap is 2 + 2 - 3.
        let v = Subspace::coordinate(4, &[0, 1]);
        let w = Subspace::coordinate(4, &[1, 2]);
        assert_eq!(intersection_dim(&v, &w, 1e-8).unwrap(), 1);
        let i = v.intersection(&w, 1e-8);
        assert_eq!(i.dim(), 1);
        assert!(i.contains(&e(4, 1), 1e-12));
    }

    #[test]
    fn mismatched_ambient_dims() {
        let v = Subspace::coordinate(4, &[0]);
        let w = Subspace::coordinate(6, &[0]);
        assert!(matches!(
            intersection_dim(&v, &w, 1e-8),
            Err(LabError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn lagrangian_line_is_its_own_complement() {
        let form = SymplecticForm::new(1);
        let v = Subspace::coordinate(2, &[0]);
        let c = symplectic_complement(&v, &form).unwrap();
        assert_eq!(c.dim(), 1);
        assert!(c.distance(&v) < 1e-14);
    }

    #[test]
    fn complement_of_everything_is_zero() {
        let form = SymplecticForm::new(2);
        let c = symplectic_complement(&Subspace::full(4), &form).unwrap();
        assert_eq!(c.dim(), 0);
    }

    #[test]
    fn min_angle_of_lines() {
        let a = Subspace::from_vectors(2, &[DVector::from_vec(vec![1.0, 0.0])]);
        let b = Subspace::from_vectors(2, &[DVector::from_vec(vec![1.0, 1e-7])]);
        assert!((a.min_angle(&b) - 1e-7).abs() < 1e-15);
    }
}
