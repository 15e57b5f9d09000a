use serde::Serialize;

use super::automorphism::TorusAutomorphism;
use super::fixed::{to_fixed, FiberCoord, SkewPoint, TorusPoint};
use super::trig::TrigPoly;

/// `f(x, t) = (g(x), t + θ(x))` on `𝕋² × S¹`.
///
/// The fiber maps are rotations, so the center direction is isometric
/// (`γ = γ̂ = 1`) and both strong rates equal the base contraction `λ_s`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkewProduct {
    base: TorusAutomorphism,
    theta: TrigPoly,
}

impl SkewProduct {
    /// Panics unless `theta` is a polynomial on `𝕋²`.
    pub fn new(base: TorusAutomorphism, theta: TrigPoly) -> Self {
        assert_eq!(theta.dim(), 2, "fiber shift must be a function on the 2-torus");
        Self { base, theta }
    }

    pub fn base(&self) -> &TorusAutomorphism {
        &self.base
    }

    pub fn theta(&self) -> &TrigPoly {
        &self.theta
    }

    /// `θ(x)` as an `f64`.
    pub fn theta_at(&self, x: &TorusPoint) -> f64 {
        self.theta.eval_fixed(&x.0)
    }

    /// `θ(x)` rounded once to a fixed-point fiber increment.
    pub fn theta_fixed(&self, x: &TorusPoint) -> u64 {
        to_fixed(self.theta_at(x))
    }

    /// Strong stable rate `ν`.
    pub fn nu(&self) -> f64 {
        self.base.lambda_s()
    }

    /// Strong unstable rate `ν̂` (contraction of the inverse).
    pub fn nu_hat(&self) -> f64 {
        self.base.lambda_s()
    }

    pub fn forward(&self, p: &SkewPoint) -> SkewPoint {
        SkewPoint {
            x: self.base.apply(&p.x),
            t: FiberCoord(p.t.0.wrapping_add(self.theta_fixed(&p.x))),
        }
    }

    pub fn backward(&self, p: &SkewPoint) -> SkewPoint {
        let x = self.base.apply_inverse(&p.x);
        SkewPoint {
            x,
            t: FiberCoord(p.t.0.wrapping_sub(self.theta_fixed(&x))),
        }
    }

    /// `fⁿ(p)`; negative `n` iterates the inverse.
    pub fn iterate(&self, p: &SkewPoint, n: i64) -> SkewPoint {
        let mut q = *p;
        for _ in 0..n.unsigned_abs() {
            q = if n > 0 {
                self.forward(&q)
            } else {
                self.backward(&q)
            };
        }
        q
    }
}
