//! Oseledets subspaces by pushing random frames along the orbit.
//!
//! `E^u_x` is the span of a `d`-frame pushed forward from `f^{−n}x`; `E^s_x`
//! is the same with inverses from `fⁿx`. When the `d`-th exponent is not
//! positive the splitting is degenerate and both spaces are the whole fiber.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::product::LinearCocycle;
use crate::symplectic::Subspace;
use crate::{linalg, seeding};

/// Convergence residual above which a frame is flagged.
pub const FRAME_CONVERGENCE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameConfig {
    pub iterations: usize,
    /// Below this `d`-th exponent the frame is degenerate.
    pub gap_tol: f64,
    pub seed: u64,
}

impl Default for FrameConfig {
    fn default() -> Self {
        Self {
            iterations: 400,
            gap_tol: 5e-3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OseledetsFrame {
    pub unstable: Subspace,
    pub stable: Subspace,
    /// Per-iterate growth of the `d`-th direction of the pushed frame.
    pub exponent_estimate: f64,
    pub degenerate: bool,
    /// Subspace distance between the `n` and `n/2` estimates.
    pub convergence_residual: f64,
    /// `dist(A(x)E_x, E_{f(x)})`, maximum over the two spaces.
    pub equivariance_residual: f64,
    pub converged: bool,
}

fn seed_frame(dim: usize, d: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = seeding::rng(seed);
    DMatrix::from_fn(dim, d, |_, _| StandardNormal.sample(&mut rng))
}

/// Push forward from `f^{−n}x`; returns the span and the `d`-th growth rate.
fn push_unstable<C: LinearCocycle>(c: &C, x: &C::Point, n: usize, frame: &DMatrix<f64>) -> (Subspace, f64) {
    let mut y = x.clone();
    for _ in 0..n {
        y = c.backward(&y);
    }
    let mut q = linalg::qr_frame(frame.clone()).0;
    let mut last_log = 0.0;
    for _ in 0..n {
        q = c.matrix(&y) * q;
        y = c.forward(&y);
        let (qq, r) = linalg::qr_frame(q);
        q = qq;
        last_log += r.last().copied().unwrap_or(1.0).ln();
    }
    (Subspace::span(&q), last_log / n.max(1) as f64)
}

fn push_stable<C: LinearCocycle>(c: &C, x: &C::Point, n: usize, frame: &DMatrix<f64>) -> Subspace {
    let mut y = x.clone();
    for _ in 0..n {
        y = c.forward(&y);
    }
    let mut q = linalg::qr_frame(frame.clone()).0;
    for _ in 0..n {
        y = c.backward(&y);
        q = linalg::symplectic_inverse(&c.matrix(&y)) * q;
        q = linalg::qr_frame(q).0;
    }
    Subspace::span(&q)
}

/// Estimate `E^u_x, E^s_x` with `n` iterates each way.
pub fn oseledets_frame<C: LinearCocycle>(c: &C, x: &C::Point, cfg: &FrameConfig) -> OseledetsFrame {
    let dim = c.dim();
    let d = c.half_dim();
    let n = cfg.iterations.max(2);
    let frame = seed_frame(dim, d, cfg.seed);
    let (eu, rate) = push_unstable(c, x, n, &frame);
    if !(rate > cfg.gap_tol) {
        return OseledetsFrame {
            unstable: Subspace::full(dim),
            stable: Subspace::full(dim),
            exponent_estimate: rate,
            degenerate: true,
            convergence_residual: 0.0,
            equivariance_residual: 0.0,
            converged: true,
        };
    }
    let es = push_stable(c, x, n, &frame);
    let (eu_half, _) = push_unstable(c, x, n / 2, &frame);
    let es_half = push_stable(c, x, n / 2, &frame);
    let convergence_residual = eu.distance(&eu_half).max(es.distance(&es_half));
    let fx = c.forward(x);
    let a = c.matrix(x);
    let (eu_next, _) = push_unstable(c, &fx, n, &frame);
    let es_next = push_stable(c, &fx, n, &frame);
    let equivariance_residual = eu
        .image(&a)
        .distance(&eu_next)
        .max(es.image(&a).distance(&es_next));
    OseledetsFrame {
        unstable: eu,
        stable: es,
        exponent_estimate: rate,
        degenerate: false,
        convergence_residual,
        equivariance_residual,
        converged: convergence_residual <= FRAME_CONVERGENCE_TOL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{SkewPoint, SkewProduct, TorusAutomorphism, TrigPoly};
    use crate::cocycle::field::{CocycleField, Factor, ScalarField};
    use crate::cocycle::product::SkewCocycle;
    use crate::linalg::standard_j;
    use crate::symplectic::SymplecticMatrix;
    use nalgebra::DVector;

    fn skew() -> SkewProduct {
        SkewProduct::new(TorusAutomorphism::cat(), TrigPoly::constant(2, 0.2))
    }

    fn constant(m: &[f64]) -> SkewCocycle {
        SkewCocycle::new(
            CocycleField::constant(SymplecticMatrix::new(DMatrix::from_row_slice(2, 2, m)).unwrap()),
            skew(),
        )
    }

    #[test]
    fn diagonal_axes() {
        let c = constant(&[2.0, 0.0, 0.0, 0.5]);
        let f = oseledets_frame(&c, &SkewPoint::new(0.1, 0.2, 0.3), &FrameConfig::default());
        assert!(!f.degenerate && f.converged);
        assert!(f.unstable.distance(&Subspace::coordinate(2, &[0])) < 1e-15);
        assert!(f.stable.distance(&Subspace::coordinate(2, &[1])) < 1e-15);
    }

    #[test]
    fn cat_matrix_eigendirection() {
        let c = constant(&[2.0, 1.0, 1.0, 1.0]);
        let f = oseledets_frame(&c, &SkewPoint::new(0.5, 0.5, 0.5), &FrameConfig::default());
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        let eig = Subspace::from_vectors(2, &[DVector::from_vec(vec![golden, 1.0])]);
        assert!(f.unstable.distance(&eig) < 1e-12);
        let eig_s = Subspace::from_vectors(2, &[DVector::from_vec(vec![1.0, -golden])]);
        assert!(f.stable.distance(&eig_s) < 1e-12);
    }

    #[test]
    fn rotation_is_degenerate() {
        let field = CocycleField::new(
            1,
            vec![Factor::Exp {
                generator: standard_j(1) * std::f64::consts::TAU,
                field: ScalarField::Coordinate { index: 0 },
            }],
            1.0,
        )
        .unwrap();
        let c = SkewCocycle::new(field, skew());
        let f = oseledets_frame(&c, &SkewPoint::new(0.3, 0.1, 0.0), &FrameConfig::default());
        assert!(f.degenerate);
        assert_eq!(f.unstable.dim(), 2);
    }

    #[test]
    fn equivariance_improves_with_iterations() {
        let s = standard_j(1) * DMatrix::from_row_slice(2, 2, &[0.2, 0.1, 0.1, -0.3]);
        let field = CocycleField::new(
            1,
            vec![
                Factor::Fixed {
                    matrix: SymplecticMatrix::new(DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0])).unwrap(),
                },
                Factor::Exp {
                    generator: s,
                    field: ScalarField::Trig {
                        poly: TrigPoly::zero(3).with_cos(&[1, 0, 0], 0.5).with_sin(&[0, 1, 1], 0.4),
                    },
                },
            ],
            1.0,
        )
        .unwrap();
        let c = SkewCocycle::new(field, skew());
        let x = SkewPoint::new(0.23, 0.71, 0.4);
        let res: Vec<f64> = [2usize, 4, 8, 16]
            .iter()
            .map(|&n| {
                let cfg = FrameConfig {
                    iterations: n,
                    gap_tol: 1e-3,
                    seed: 3,
                };
                oseledets_frame(&c, &x, &cfg).equivariance_residual
            })
            .collect();
        for w in res.windows(2) {
            assert!(w[1] < w[0] || w[1] < 1e-14, "{res:?}");
        }
    }
}
