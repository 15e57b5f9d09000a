//! Rotation-block and bump-localized transvection perturbations.

use serde::Serialize;

use crate::base::FiberCoord;
use crate::cocycle::{transvection_factor, Bump, CocycleField, Factor, ScalarField};
use crate::error::{LabError, Result};
use crate::holonomy::HomoclinicLoop;
use crate::symplectic::{SymplecticMatrix, Transvection};

/// Diameter of `𝕋² × S¹` in the quotient metric.
const DIAMETER: f64 = 0.866_025_403_784_438_6;

/// Clearance kept between the support and the periodic orbit.
const ORBIT_CLEARANCE: f64 = 1e-6;

/// `A_θ(x) = R_θ · A(x)` with `R_θ = [[cos θ·I, sin θ·I], [−sin θ·I, cos θ·I]]`.
pub fn rotate_perturbation(field: &CocycleField, theta: f64) -> Result<CocycleField> {
    if theta == 0.0 {
        return Ok(field.clone());
    }
    if !theta.is_finite() {
        return Err(LabError::InvalidParameter(format!("rotation angle {theta}")));
    }
    field.prepended(vec![Factor::Fixed {
        matrix: SymplecticMatrix::block_rotation(field.half_dim(), theta),
    }])
}

/// `‖R_θ − I‖ = 2 |sin(θ/2)|`.
pub fn rotation_size(theta: f64) -> f64 {
    2.0 * (0.5 * theta).sin().abs()
}

/// Where the bump factors are inserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `Â = σ_φ · A`, so `Â = σA` at the bump center.
    #[default]
    Left,
    /// `Â = A · σ_φ`; the loop holonomy through the center becomes
    /// `H^s ∘ σ ∘ H^u`.
    Right,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransvectionPerturbation {
    pub field: CocycleField,
    pub factors: Vec<Transvection>,
    pub bump: Bump,
    pub side: Side,
    /// `‖σ − I‖` bound from the factor strengths.
    pub size: f64,
    /// Upper bound on `‖Â − A‖_α`.
    pub holder_bound: f64,
    /// Smallest distance from the support center to a checked iterate.
    pub clearance: f64,
}

/// Insert `∏ (I + φ Nᵢ)` around the center leaf of the homoclinic point,
/// after checking that the support misses its other iterates within the
/// verified budgets and the periodic orbit.
pub fn transvection_perturbation(
    field: &CocycleField,
    lp: &HomoclinicLoop,
    g: &crate::base::TorusAutomorphism,
    factors: &[Transvection],
    radius: f64,
    fiber_arc: Option<(FiberCoord, f64)>,
    side: Side,
) -> Result<TransvectionPerturbation> {
    if !(radius > 0.0 && radius < 0.5) {
        return Err(LabError::InvalidParameter(format!(
            "bump radius must lie in (0, 0.5), got {radius}"
        )));
    }
    let z = &lp.homoclinic;
    let center = z.point;
    let mut clearance = f64::INFINITY;
    let lo = -(z.budget_u as i64);
    let hi = z.budget_s as i64;
    for n in lo..=hi {
        if n == 0 {
            continue;
        }
        let y = z.orbit_point(g, &lp.leaf, n);
        let d = center.distance(&y);
        clearance = clearance.min(d);
        if d < radius {
            return Err(LabError::SupportCollision {
                iterate: n,
                distance: d,
                radius,
            });
        }
    }
    for (i, y) in lp.leaf.orbit_fixed().iter().enumerate() {
        let d = center.distance(y);
        clearance = clearance.min(d);
        if d < radius + ORBIT_CLEARANCE {
            return Err(LabError::DegenerateInput(format!(
                "bump support of radius {radius:.3e} meets periodic orbit point {i} (distance {d:.3e})"
            )));
        }
    }
    let bump = Bump {
        center,
        radius,
        fiber_arc,
    };
    let new: Vec<Factor> = factors
        .iter()
        .map(|t| transvection_factor(t, ScalarField::Bump { bump: bump.clone() }))
        .collect();
    let out = if new.is_empty() {
        field.clone()
    } else {
        match side {
            Side::Left => field.prepended(new)?,
            Side::Right => field.appended(new)?,
        }
    };
    let prod: f64 = factors.iter().map(|t| 1.0 + t.strength().abs()).product();
    let size = prod - 1.0;
    let sum: f64 = factors.iter().map(|t| t.strength().abs()).sum();
    let sup_a = field.sup_norm_bound();
    let sup_part = size * sup_a;
    let lip_part = prod * sum * bump.lipschitz_bound() * sup_a + size * field.lipschitz_bound();
    let holder_bound = sup_part + lip_part * DIAMETER.powf(1.0 - field.alpha());
    Ok(TransvectionPerturbation {
        field: out,
        factors: factors.to_vec(),
        bump,
        side,
        size,
        holder_bound,
        clearance,
    })
}
