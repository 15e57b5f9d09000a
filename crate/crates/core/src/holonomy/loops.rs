//! Homoclinic loops on a periodic center leaf.
//!
//! For a periodic `p` with homoclinic point `z = p + a·e_u (mod ℤ²) = p + b·e_s`,
//! the circle map `h = h^s_{z,p} ∘ h^u_{p,z}` is the rotation
//! `t ↦ t + Δ^u(p, z) + Δ^s(z, p)`, and the loop holonomy is
//!
//! ```text
//! H^A_t = H^s_{(z, h^u(t)), (p, h(t))} · H^u_{(p, t), (z, h^u(t))}.
//! ```
//!
//! Both factors are evaluated with `p` as the anchor, so the unstable leg
//! sees `z` at offset `a` along `e_u` and the stable leg at offset `b`
//! along `e_s`.

use serde::Serialize;

use super::bunching::FiberBunchingCertificate;
use super::strong::{leaf_holonomy, HolonomyOperator};
use crate::base::{
    displacement, leaf_shift, Anchor, FiberCoord, HomoclinicPoint, LeafKind, LeafPoint,
    PeriodicLeaf, SkewProduct,
};
use crate::cocycle::SkewCocycle;
use crate::error::{LabError, Result};
use crate::linalg::op_norm;
use crate::symplectic::SymplecticMatrix;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomoclinicLoop {
    pub leaf: PeriodicLeaf,
    pub homoclinic: HomoclinicPoint,
    /// `Δ^u(p, z)`.
    pub unstable_shift: f64,
    /// `Δ^s(z, p)`.
    pub stable_shift: f64,
    #[serde(skip)]
    anchor: Anchor,
    #[serde(skip)]
    unstable_fixed: u64,
    #[serde(skip)]
    rotation_fixed: u64,
}

impl HomoclinicLoop {
    pub fn new(f: &SkewProduct, leaf: PeriodicLeaf, homoclinic: HomoclinicPoint) -> Self {
        let anchor = homoclinic.anchor(&leaf);
        let unstable_shift = leaf_shift(f, &anchor, LeafKind::Unstable, homoclinic.unstable_offset);
        let stable_shift = -leaf_shift(f, &anchor, LeafKind::Stable, homoclinic.stable_offset);
        let unstable_fixed = displacement(unstable_shift);
        let rotation_fixed = unstable_fixed.wrapping_add(displacement(stable_shift));
        Self {
            leaf,
            homoclinic,
            unstable_shift,
            stable_shift,
            anchor,
            unstable_fixed,
            rotation_fixed,
        }
    }

    /// Rotation number of `h` in `[0, 1)`.
    pub fn shift(&self) -> f64 {
        FiberCoord(self.rotation_fixed).value()
    }

    /// `h^u_{p,z}(t)`.
    pub fn unstable_image(&self, t: FiberCoord) -> FiberCoord {
        FiberCoord(t.0.wrapping_add(self.unstable_fixed))
    }

    /// `h(t)`.
    pub fn h(&self, t: FiberCoord) -> FiberCoord {
        FiberCoord(t.0.wrapping_add(self.rotation_fixed))
    }

    /// `h^j(t)`.
    pub fn h_iter(&self, t: FiberCoord, j: u64) -> FiberCoord {
        FiberCoord(t.0.wrapping_add(self.rotation_fixed.wrapping_mul(j)))
    }

    pub fn anchor(&self) -> &Anchor {
        &self.anchor
    }

    /// `(z, h^u(t))` as seen from the unstable and the stable leg.
    pub fn homoclinic_points(&self, t: FiberCoord) -> (LeafPoint, LeafPoint) {
        let tz = self.unstable_image(t);
        (
            LeafPoint::new(self.anchor.clone(), LeafKind::Unstable, self.homoclinic.unstable_offset, tz),
            LeafPoint::new(self.anchor.clone(), LeafKind::Stable, self.homoclinic.stable_offset, tz),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoopHolonomy {
    pub t: FiberCoord,
    pub matrix: SymplecticMatrix,
    pub unstable: HolonomyOperator,
    pub stable: HolonomyOperator,
}

/// `H^A_t`.
pub fn loop_holonomy(
    c: &SkewCocycle,
    cert: &FiberBunchingCertificate,
    lp: &HomoclinicLoop,
    t: FiberCoord,
) -> Result<LoopHolonomy> {
    let p_t = LeafPoint::new(lp.anchor.clone(), LeafKind::Unstable, 0.0, t);
    let (z_u, z_s) = lp.homoclinic_points(t);
    let p_h = LeafPoint::new(lp.anchor.clone(), LeafKind::Stable, 0.0, lp.h(t));
    let unstable = leaf_holonomy(c, cert, &p_t, &z_u)?;
    let stable = leaf_holonomy(c, cert, &z_s, &p_h)?;
    let matrix = &stable.matrix * &unstable.matrix;
    Ok(LoopHolonomy {
        t,
        matrix,
        unstable,
        stable,
    })
}

/// `(h^j(t), H^A_{h^{j−1}(t)} ⋯ H^A_t)`.
pub fn iterate_loop(
    c: &SkewCocycle,
    cert: &FiberBunchingCertificate,
    lp: &HomoclinicLoop,
    t: FiberCoord,
    j: usize,
) -> Result<(FiberCoord, SymplecticMatrix)> {
    if j == 0 {
        return Err(LabError::InvalidParameter("loop iterate must be at least 1".into()));
    }
    let mut s = t;
    let mut m = SymplecticMatrix::identity(c.field.half_dim());
    for _ in 0..j {
        m = &loop_holonomy(c, cert, lp, s)?.matrix * &m;
        s = lp.h(s);
    }
    Ok((s, m))
}

/// Sampled modulus of continuity of `t ↦ H^A_t` on a uniform fiber grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoopContinuity {
    pub grid: usize,
    pub spacing: f64,
    /// `max_i ‖H^A_{t_{i+1}} − H^A_{t_i}‖`.
    pub modulus: f64,
    pub max_drift: f64,
}

pub fn loop_continuity(
    c: &SkewCocycle,
    cert: &FiberBunchingCertificate,
    lp: &HomoclinicLoop,
    grid: usize,
) -> Result<LoopContinuity> {
    if grid < 2 {
        return Err(LabError::InvalidParameter("continuity grid needs at least 2 points".into()));
    }
    let mats = (0..grid)
        .map(|i| loop_holonomy(c, cert, lp, FiberCoord::new(i as f64 / grid as f64)).map(|l| l.matrix))
        .collect::<Result<Vec<_>>>()?;
    let modulus = (0..grid)
        .map(|i| op_norm(&(mats[(i + 1) % grid].entries() - mats[i].entries())))
        .fold(0.0, f64::max);
    let max_drift = mats.iter().map(|m| m.drift()).fold(0.0, f64::max);
    Ok(LoopContinuity {
        grid,
        spacing: 1.0 / grid as f64,
        modulus,
        max_drift,
    })
}
