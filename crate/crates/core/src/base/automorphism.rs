use serde::Serialize;

use super::fixed::TorusPoint;
use crate::error::{LabError, Result};

/// Size of local stable/unstable leaves in eigen-coordinates.
pub const LOCAL_LEAF_SIZE: f64 = 0.25;

/// A hyperbolic automorphism of `𝕋²` given by an integer matrix.
///
/// Eigen-coordinates are with respect to the unit eigenvectors `e_u, e_s`;
/// along them the map acts by the signed eigenvalues `μ_u, μ_s`, so
/// `dist(gⁿx, gⁿy) = |μ_s|ⁿ dist(x, y)` exactly for `y ∈ x + ℝe_s`
/// (hyperbolicity constant `C = 1` in that metric).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorusAutomorphism {
    matrix: [[i64; 2]; 2],
    inverse: [[i64; 2]; 2],
    mu_u: f64,
    mu_s: f64,
    e_u: [f64; 2],
    e_s: [f64; 2],
}

fn eigenvector(m: &[[i64; 2]; 2], mu: f64) -> [f64; 2] {
    let (a, b, c, d) = (m[0][0] as f64, m[0][1] as f64, m[1][0] as f64, m[1][1] as f64);
    // rows of M − μI are parallel; use the better conditioned one
    let v1 = [b, mu - a];
    let v2 = [mu - d, c];
    let v = if v1[0].hypot(v1[1]) >= v2[0].hypot(v2[1]) {
        v1
    } else {
        v2
    };
    let n = v[0].hypot(v[1]);
    let mut e = [v[0] / n, v[1] / n];
    if e[0] < 0.0 || (e[0] == 0.0 && e[1] < 0.0) {
        e = [-e[0], -e[1]];
    }
    e
}

impl TorusAutomorphism {
    pub fn new(matrix: [[i64; 2]; 2]) -> Result<Self> {
        let [[a, b], [c, d]] = matrix;
        let det = a
            .checked_mul(d)
            .and_then(|x| b.checked_mul(c).and_then(|y| x.checked_sub(y)))
            .ok_or_else(|| LabError::InvalidAutomorphism("entries too large".into()))?;
        if det != 1 && det != -1 {
            return Err(LabError::InvalidAutomorphism(format!(
                "determinant must be ±1, got {det}"
            )));
        }
        let tr = a + d;
        let tr_f = tr as f64;
        let disc = tr_f * tr_f - 4.0 * det as f64;
        if tr.abs() <= 2 {
            return Err(LabError::InvalidAutomorphism(format!(
                "matrix is not hyperbolic (trace {tr}, det {det})"
            )));
        }
        let root = disc.sqrt();
        let mu_u = if tr >= 0 {
            0.5 * (tr_f + root)
        } else {
            0.5 * (tr_f - root)
        };
        let mu_s = det as f64 / mu_u;
        let inverse = [[det * d, -det * b], [-det * c, det * a]];
        Ok(Self {
            matrix,
            inverse,
            mu_u,
            mu_s,
            e_u: eigenvector(&matrix, mu_u),
            e_s: eigenvector(&matrix, mu_s),
        })
    }

    /// Arnold's cat map `[[2, 1], [1, 1]]`.
    pub fn cat() -> Self {
        Self::new([[2, 1], [1, 1]]).expect("cat map is hyperbolic")
    }

    pub fn matrix(&self) -> [[i64; 2]; 2] {
        self.matrix
    }

    pub fn inverse_matrix(&self) -> [[i64; 2]; 2] {
        self.inverse
    }

    pub fn det(&self) -> i64 {
        self.matrix[0][0] * self.matrix[1][1] - self.matrix[0][1] * self.matrix[1][0]
    }

    /// Signed unstable eigenvalue `μ_u`, `|μ_u| > 1`.
    pub fn mu_u(&self) -> f64 {
        self.mu_u
    }

    /// Signed stable eigenvalue `μ_s = det / μ_u`.
    pub fn mu_s(&self) -> f64 {
        self.mu_s
    }

    /// Expansion rate `λ_u = |μ_u|`.
    pub fn lambda_u(&self) -> f64 {
        self.mu_u.abs()
    }

    /// Contraction rate `λ_s = 1 / λ_u`.
    pub fn lambda_s(&self) -> f64 {
        self.mu_s.abs()
    }

    pub fn e_u(&self) -> [f64; 2] {
        self.e_u
    }

    pub fn e_s(&self) -> [f64; 2] {
        self.e_s
    }

    /// Sine of the angle between the eigenlines.
    pub fn splitting_sine(&self) -> f64 {
        (self.e_u[0] * self.e_s[1] - self.e_u[1] * self.e_s[0]).abs()
    }

    /// Distances below this have a bracket inside the local leaves.
    pub fn bracket_radius(&self) -> f64 {
        LOCAL_LEAF_SIZE * self.splitting_sine()
    }

    pub fn apply(&self, x: &TorusPoint) -> TorusPoint {
        apply_int(&self.matrix, x)
    }

    pub fn apply_inverse(&self, x: &TorusPoint) -> TorusPoint {
        apply_int(&self.inverse, x)
    }

    /// `gⁿ(x)`, negative `n` meaning the inverse.
    pub fn iterate(&self, x: &TorusPoint, n: i64) -> TorusPoint {
        let mut y = *x;
        for _ in 0..n.unsigned_abs() {
            y = if n > 0 {
                self.apply(&y)
            } else {
                self.apply_inverse(&y)
            };
        }
        y
    }

    /// Coordinates `(a, b)` with `v = a·e_u + b·e_s`.
    pub fn eigen_coordinates(&self, v: [f64; 2]) -> [f64; 2] {
        let [u1, u2] = self.e_u;
        let [s1, s2] = self.e_s;
        let det = u1 * s2 - u2 * s1;
        [(v[0] * s2 - v[1] * s1) / det, (u1 * v[1] - u2 * v[0]) / det]
    }

    /// Eigen-coordinates of the shortest lift of `y − x`.
    pub fn local_coordinates(&self, x: &TorusPoint, y: &TorusPoint) -> [f64; 2] {
        self.eigen_coordinates(x.lift_to(y))
    }

    /// `[x, y] = W^s_loc(x) ∩ W^u_loc(y)`, if both legs are local.
    pub fn bracket(&self, x: &TorusPoint, y: &TorusPoint) -> Option<TorusPoint> {
        let [a, b] = self.local_coordinates(x, y);
        if a.abs() > LOCAL_LEAF_SIZE || b.abs() > LOCAL_LEAF_SIZE {
            return None;
        }
        Some(x.shifted([b * self.e_s[0], b * self.e_s[1]]))
    }
}

fn apply_int(m: &[[i64; 2]; 2], x: &TorusPoint) -> TorusPoint {
    let [u, v] = x.0;
    let row = |r: &[i64; 2]| {
        (r[0] as u64)
            .wrapping_mul(u)
            .wrapping_add((r[1] as u64).wrapping_mul(v))
    };
    TorusPoint([row(&m[0]), row(&m[1])])
}
