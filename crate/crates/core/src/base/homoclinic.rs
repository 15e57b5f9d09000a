//! Homoclinic points of periodic base points.
//!
//! For a periodic `p`, `W^u(p) = p + ℝe_u` and `W^s(p) = p + ℝe_s` (mod ℤ²)
//! meet at `z = p + b·e_s = p + a·e_u + m` whenever `a·e_u − b·e_s = m`
//! for a nonzero lattice vector `m`. Replacing `m` by `M^{n_p}m` moves `z`
//! along its own orbit, so indices enumerate lattice vectors by length and
//! skip those in the `M^{n_p}`-orbit of an earlier choice.

use serde::Serialize;

use super::automorphism::TorusAutomorphism;
use super::fixed::TorusPoint;
use super::leaf::{Anchor, LeafKind};
use super::periodic::{matrix_power, PeriodicLeaf};
use crate::error::{LabError, Result};

/// Cap on the convergence-check budget.
pub const MAX_CHECK_BUDGET: usize = 20;

const CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomoclinicPoint {
    pub index: usize,
    pub lattice: [i64; 2],
    /// `z = p + unstable_offset · e_u + lattice`.
    pub unstable_offset: f64,
    /// `z = p + stable_offset · e_s`.
    pub stable_offset: f64,
    pub point: TorusPoint,
    /// Forward/backward steps over which convergence was verified.
    pub budget_s: usize,
    pub budget_u: usize,
}

impl HomoclinicPoint {
    pub fn stable_anchor_offset(&self) -> (LeafKind, f64) {
        (LeafKind::Stable, self.stable_offset)
    }

    /// Base point of the `n`-th iterate via the anchored representation.
    pub fn orbit_point(&self, g: &TorusAutomorphism, leaf: &PeriodicLeaf, n: i64) -> TorusPoint {
        let orbit = leaf.orbit_fixed();
        let len = orbit.len() as i64;
        let anchor = orbit[n.rem_euclid(len) as usize];
        if n >= 0 {
            let s = self.stable_offset * g.mu_s().powi(n as i32);
            let e = g.e_s();
            anchor.shifted([s * e[0], s * e[1]])
        } else {
            let a = self.unstable_offset * g.mu_u().powi(n as i32);
            let e = g.e_u();
            anchor.shifted([a * e[0], a * e[1]])
        }
    }

    pub fn anchor(&self, leaf: &PeriodicLeaf) -> Anchor {
        Anchor::periodic(leaf.orbit_fixed())
    }
}

/// Nonzero lattice vectors ordered by length, then by angle from `(1, 0)`.
fn lattice_by_length(radius: i64) -> Vec<[i64; 2]> {
    let mut v: Vec<[i64; 2]> = (-radius..=radius)
        .flat_map(|i| (-radius..=radius).map(move |j| [i, j]))
        .filter(|&[i, j]| (i, j) != (0, 0) && i * i + j * j <= radius * radius)
        .collect();
    v.sort_by(|a, b| {
        let la = a[0] * a[0] + a[1] * a[1];
        let lb = b[0] * b[0] + b[1] * b[1];
        let angle = |p: &[i64; 2]| (p[1] as f64).atan2(p[0] as f64).rem_euclid(std::f64::consts::TAU);
        la.cmp(&lb).then(angle(a).total_cmp(&angle(b)))
    });
    v
}

fn same_orbit(m: [i64; 2], chosen: [i64; 2], step: &[[i128; 2]; 2], step_inv: &[[i128; 2]; 2]) -> bool {
    let limit = 4 * (m[0].abs() + m[1].abs() + chosen[0].abs() + chosen[1].abs()) as i128 + 4;
    for mat in [step, step_inv] {
        let mut w = [chosen[0] as i128, chosen[1] as i128];
        for _ in 0..64 {
            w = [
                mat[0][0] * w[0] + mat[0][1] * w[1],
                mat[1][0] * w[0] + mat[1][1] * w[1],
            ];
            if w == [m[0] as i128, m[1] as i128] {
                return true;
            }
            if w[0].abs() + w[1].abs() > limit {
                break;
            }
        }
    }
    false
}

/// Representative lattice vectors of distinct homoclinic orbits.
pub fn homoclinic_lattice_vectors(g: &TorusAutomorphism, period: usize, count: usize) -> Result<Vec<[i64; 2]>> {
    let step = matrix_power(&g.matrix(), period as u32)?;
    let step_inv = matrix_power(&g.inverse_matrix(), period as u32)?;
    let mut radius = 2;
    loop {
        let mut chosen: Vec<[i64; 2]> = Vec::new();
        for m in lattice_by_length(radius) {
            if chosen.iter().all(|&c| !same_orbit(m, c, &step, &step_inv)) {
                chosen.push(m);
                if chosen.len() == count {
                    return Ok(chosen);
                }
            }
        }
        radius *= 2;
        if radius > 1 << 12 {
            return Err(LabError::InvalidParameter(format!(
                "could not enumerate {count} homoclinic orbits"
            )));
        }
    }
}

/// Steps over which rounding in the eigen-direction stays below `1e-9`.
fn check_budget(g: &TorusAutomorphism) -> usize {
    ((1e6f64).ln() / g.lambda_u().ln()).floor().clamp(1.0, MAX_CHECK_BUDGET as f64) as usize
}

/// The `index`-th homoclinic point of the leaf's base point.
///
/// Convergence is checked by iterating the stored point itself with the
/// lattice dynamics (independently of the anchored representation) and
/// comparing with the exact orbit of `p`.
pub fn find_homoclinic(g: &TorusAutomorphism, leaf: &PeriodicLeaf, index: usize) -> Result<HomoclinicPoint> {
    let period = leaf.period();
    let lattice = homoclinic_lattice_vectors(g, period, index + 1)?[index];
    let m = [lattice[0] as f64, lattice[1] as f64];
    // a·e_u − b·e_s = m
    let [a, minus_b] = g.eigen_coordinates(m);
    let b = -minus_b;
    let p = leaf.orbit_fixed()[0];
    let e_s = g.e_s();
    let z = p.shifted([b * e_s[0], b * e_s[1]]);
    let budget = check_budget(g);
    let orbit = leaf.orbit_fixed();
    let at = |n: i64| orbit[n.rem_euclid(orbit.len() as i64) as usize];
    let mut zf = z;
    for n in 0..=budget as i64 {
        let bound = b.abs() * g.lambda_s().powi(n as i32) * (1.0 + 1e-9) + CHECK_TOL;
        let d = zf.distance(&at(n));
        if d > bound {
            return Err(LabError::HomoclinicConvergence {
                iterate: n,
                distance: d,
                bound,
            });
        }
        zf = g.apply(&zf);
    }
    let mut zb = z;
    for n in 0..=budget as i64 {
        let bound = a.abs() * g.lambda_s().powi(n as i32) * (1.0 + 1e-9) + CHECK_TOL;
        let d = zb.distance(&at(-n));
        if n > 0 && d > bound {
            return Err(LabError::HomoclinicConvergence {
                iterate: -n,
                distance: d,
                bound,
            });
        }
        zb = g.apply_inverse(&zb);
    }
    if z.distance(&p) < 1e-12 {
        return Err(LabError::DegenerateInput("homoclinic point coincides with p".into()));
    }
    Ok(HomoclinicPoint {
        index,
        lattice,
        unstable_offset: a,
        stable_offset: b,
        point: z,
        budget_s: budget,
        budget_u: budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::skew::SkewProduct;
    use crate::base::trig::TrigPoly;

    fn origin_leaf() -> (TorusAutomorphism, PeriodicLeaf) {
        let g = TorusAutomorphism::cat();
        let f = SkewProduct::new(g.clone(), TrigPoly::zero(2));
        (g, PeriodicLeaf::origin(&f))
    }

    #[test]
    fn first_index_uses_unit_offset() {
        let (g, leaf) = origin_leaf();
        let z = find_homoclinic(&g, &leaf, 0).unwrap();
        assert_eq!(z.lattice, [1, 0]);
        // independent line intersection: solve a e_u - b e_s = (1, 0) by Cramer
        let [u1, u2] = g.e_u();
        let [s1, s2] = g.e_s();
        let det = -u1 * s2 + u2 * s1;
        let a = (-s2) / det;
        let b = (-u2) / det;
        assert!((z.unstable_offset - a).abs() < 1e-14);
        assert!((z.stable_offset - b).abs() < 1e-14);
        assert!(z.point.distance(&TorusPoint::ORIGIN) > 1e-3);
    }

    #[test]
    fn indices_give_distinct_orbits() {
        let (g, leaf) = origin_leaf();
        let z0 = find_homoclinic(&g, &leaf, 0).unwrap();
        let z1 = find_homoclinic(&g, &leaf, 1).unwrap();
        for n in -12i64..=12 {
            let w = z0.orbit_point(&g, &leaf, n);
            assert!(w.distance(&z1.point) > 1e-6, "z1 on the orbit of z0 at {n}");
        }
    }

    #[test]
    fn image_lattice_vector_is_skipped() {
        let (g, _) = origin_leaf();
        let reps = homoclinic_lattice_vectors(&g, 1, 6).unwrap();
        // M(1,0) = (2,1) lies on the orbit of (1,0)
        assert!(!reps.contains(&[2, 1]));
        assert!(!reps.contains(&[1, -1]));
    }

    #[test]
    fn anchored_orbit_matches_lattice_iteration() {
        let (g, leaf) = origin_leaf();
        let z = find_homoclinic(&g, &leaf, 2).unwrap();
        let mut w = z.point;
        for n in 0..8 {
            assert!(w.distance(&z.orbit_point(&g, &leaf, n)) < 1e-12);
            w = g.apply(&w);
        }
    }
}
