//! Center holonomies of the rotation-fibered skew product.
//!
//! `(x, t)` and `(y, t')` lie on one strong stable leaf iff
//! `t' = t + Δ^s(x, y)` with `Δ^s(x, y) = Σ_{n≥0} θ(gⁿx) − θ(gⁿy)`, and on
//! one strong unstable leaf iff `t' = t + Δ^u(x, y)` with
//! `Δ^u(x, y) = Σ_{i≥1} θ(g⁻ⁱy) − θ(g⁻ⁱx)`. The holonomies `h^s, h^u`
//! between center leaves are therefore rigid rotations.

use super::automorphism::LOCAL_LEAF_SIZE;
use super::fixed::{FiberCoord, TorusPoint};
use super::leaf::{Anchor, LeafKind, LeafPoint};
use super::skew::SkewProduct;
use crate::error::{LabError, Result};

/// Truncation threshold for the shift series.
pub const SHIFT_TAIL_TOL: f64 = 1e-12;

/// Largest distance from a leaf accepted as "on the leaf".
pub const ON_LEAF_TOL: f64 = 1e-9;

const MAX_TERMS: usize = 10_000;

/// Number of terms after which `Lip(θ)·|s|·λⁿ/(1 − λ) < tol`.
fn terms_needed(lip: f64, offset: f64, lambda: f64) -> usize {
    let scale = lip * offset.abs() / (1.0 - lambda);
    if scale <= SHIFT_TAIL_TOL {
        return 0;
    }
    let n = (SHIFT_TAIL_TOL / scale).ln() / lambda.ln();
    (n.ceil().max(0.0) as usize + 1).min(MAX_TERMS)
}

/// `Δ` between the anchor of `anchor` and the point at `offset` on the same
/// leaf. Positive direction: from the anchor to the offset point.
pub fn leaf_shift(f: &SkewProduct, anchor: &Anchor, kind: LeafKind, offset: f64) -> f64 {
    let g = f.base();
    let lip = f.theta().lipschitz_bound();
    let n = terms_needed(lip, offset, g.lambda_s());
    let t0 = FiberCoord(0);
    let mut x = LeafPoint::new(anchor.clone(), kind, 0.0, t0);
    let mut y = LeafPoint::new(anchor.clone(), kind, offset, t0);
    let mut sum = 0.0;
    match kind {
        LeafKind::Stable => {
            for _ in 0..n {
                sum += f.theta_at(&x.base(g)) - f.theta_at(&y.base(g));
                x = x.sibling_step_forward(f);
                y = y.sibling_step_forward(f);
            }
        }
        LeafKind::Unstable => {
            for _ in 0..n {
                x = x.sibling_step_backward(f);
                y = y.sibling_step_backward(f);
                sum += f.theta_at(&y.base(g)) - f.theta_at(&x.base(g));
            }
        }
    }
    sum
}

impl LeafPoint {
    fn sibling_step_forward(&self, f: &SkewProduct) -> Self {
        let g = f.base();
        Self {
            anchor: self.anchor.forward(g),
            kind: self.kind,
            offset: self.offset * self.kind.eigenvalue(g),
            t: self.t,
        }
    }

    fn sibling_step_backward(&self, f: &SkewProduct) -> Self {
        let g = f.base();
        Self {
            anchor: self.anchor.backward(g),
            kind: self.kind,
            offset: self.offset / self.kind.eigenvalue(g),
            t: self.t,
        }
    }
}

/// Offset of `y` along the `kind` leaf of `x`, checking that `y` is on the
/// local leaf.
pub fn leaf_offset(f: &SkewProduct, x: &TorusPoint, y: &TorusPoint, kind: LeafKind) -> Result<f64> {
    let [a, b] = f.base().local_coordinates(x, y);
    let (along, across) = match kind {
        LeafKind::Stable => (b, a),
        LeafKind::Unstable => (a, b),
    };
    if across.abs() > ON_LEAF_TOL || along.abs() > LOCAL_LEAF_SIZE {
        return Err(LabError::NotOnLeaf {
            kind: kind.as_str(),
            detail: format!(
                "eigen-coordinates along {along:.3e}, across {across:.3e} \
                 (local size {LOCAL_LEAF_SIZE}, tolerance {ON_LEAF_TOL})"
            ),
        });
    }
    Ok(along)
}

/// Shift `Δ^s(x, y)` or `Δ^u(x, y)`, so that `h_{x,y}(t) = t + Δ mod 1`.
pub fn center_holonomy_shift(
    f: &SkewProduct,
    x: &TorusPoint,
    y: &TorusPoint,
    kind: LeafKind,
) -> Result<f64> {
    let offset = leaf_offset(f, x, y, kind)?;
    Ok(leaf_shift(f, &Anchor::Lattice(*x), kind, offset))
}

/// Leaf point through `(x, t)` at `offset` along `kind`, with the fiber
/// coordinate placed on the same strong leaf.
pub fn leaf_partner(
    f: &SkewProduct,
    anchor: &Anchor,
    kind: LeafKind,
    t: FiberCoord,
    offset: f64,
) -> LeafPoint {
    let shift = leaf_shift(f, anchor, kind, offset);
    LeafPoint::new(anchor.clone(), kind, offset, t.shifted(shift))
}
