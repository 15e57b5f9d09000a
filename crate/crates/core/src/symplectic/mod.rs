//! Exact symplectic linear algebra on `(ℝ^{2d}, ω)`.
//!
//! The form is fixed to the standard block matrix `J = [[0, I], [-I, 0]]`,
//! so `ω(u, v) = uᵀ J v`. Everything here is a pure function of immutable
//! values; randomized routines take explicit seeds.

mod form;
mod matrix;
mod separation;
mod subspace;
mod transvection;

pub use form::SymplecticForm;
pub use matrix::{SymplecticMatrix, SYMPLECTIC_TOLERANCE};
pub use separation::{
    separate_many, separate_pair, separation_margin, ManySeparation, SeparationStep,
    SeparationTrace, SEPARATION_TOL,
};
pub use subspace::{intersection_dim, symplectic_complement, Subspace};
pub use transvection::{transvection_matrix, Transvection};
