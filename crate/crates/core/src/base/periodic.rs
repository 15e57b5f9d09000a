//! Periodic points of the base and periodic center leaves.
//!
//! The points of period dividing `n` are `(Mⁿ − I)⁻¹ℤ² / ℤ²`. Writing
//! `A = Mⁿ − I`, this group equals `adj(A)ℤ² / det(A)ℤ²`; a Hermite basis
//! `{(g, h), (0, c)}` of `adj(A)ℤ²` with `g·c = |det A|` enumerates it
//! without search.

use serde::Serialize;

use super::automorphism::TorusAutomorphism;
use super::fixed::{FiberCoord, TorusPoint};
use super::skew::SkewProduct;
use crate::error::{LabError, Result};

/// Refuse to enumerate more periodic points than this.
pub const MAX_PERIODIC_POINTS: u128 = 1 << 20;

/// Largest denominator accepted when recognizing a rational rotation number.
pub const MAX_ROTATION_DENOMINATOR: u64 = 1000;

const ROTATION_RATIONAL_TOL: f64 = 1e-9;

/// `(num₁/den, num₂/den)` with `0 ≤ numᵢ < den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RationalPoint {
    pub num: [i128; 2],
    pub den: i128,
}

impl RationalPoint {
    pub fn new(num: [i128; 2], den: i128) -> Self {
        assert!(den > 0);
        Self {
            num: [num[0].rem_euclid(den), num[1].rem_euclid(den)],
            den,
        }
    }

    pub fn origin() -> Self {
        Self::new([0, 0], 1)
    }

    /// Image under an integer matrix, exact.
    pub fn apply(&self, m: &[[i64; 2]; 2]) -> Self {
        let row = |r: &[i64; 2]| {
            (r[0] as i128 * self.num[0] + r[1] as i128 * self.num[1]).rem_euclid(self.den)
        };
        Self {
            num: [row(&m[0]), row(&m[1])],
            den: self.den,
        }
    }

    /// Nearest fixed-point representation (floor of `2⁶⁴ · num/den`).
    pub fn to_torus(&self) -> TorusPoint {
        let conv = |n: i128| (((n as u128) << 64) / self.den as u128) as u64;
        TorusPoint([conv(self.num[0]), conv(self.num[1])])
    }

    pub fn coords(&self) -> [f64; 2] {
        [
            self.num[0] as f64 / self.den as f64,
            self.num[1] as f64 / self.den as f64,
        ]
    }

    /// Same point with the smallest common denominator.
    pub fn reduced(&self) -> Self {
        let g = gcd(gcd(self.num[0], self.num[1]), self.den);
        Self {
            num: [self.num[0] / g, self.num[1] / g],
            den: self.den / g,
        }
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `(g, x, y)` with `a x + b y = g = gcd(a, b) ≥ 0`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

type Mat = [[i128; 2]; 2];

fn mat_mul(a: &Mat, b: &Mat, period: u32) -> Result<Mat> {
    let overflow = || LabError::PeriodOverflow { period };
    let mut out = [[0i128; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let x = a[i][0].checked_mul(b[0][j]).ok_or_else(overflow)?;
            let y = a[i][1].checked_mul(b[1][j]).ok_or_else(overflow)?;
            out[i][j] = x.checked_add(y).ok_or_else(overflow)?;
        }
    }
    Ok(out)
}

/// `Mⁿ` in checked 128-bit arithmetic.
pub fn matrix_power(m: &[[i64; 2]; 2], n: u32) -> Result<[[i128; 2]; 2]> {
    let base = [
        [m[0][0] as i128, m[0][1] as i128],
        [m[1][0] as i128, m[1][1] as i128],
    ];
    let mut out: Mat = [[1, 0], [0, 1]];
    for _ in 0..n {
        out = mat_mul(&out, &base, n)?;
    }
    Ok(out)
}

/// Number of points of period dividing `n`: `|det(Mⁿ − I)|`.
pub fn periodic_point_count(g: &TorusAutomorphism, n: u32) -> Result<u128> {
    let p = matrix_power(&g.matrix(), n)?;
    let a = [[p[0][0] - 1, p[0][1]], [p[1][0], p[1][1] - 1]];
    let overflow = || LabError::PeriodOverflow { period: n };
    let det = a[0][0]
        .checked_mul(a[1][1])
        .ok_or_else(overflow)?
        .checked_sub(a[0][1].checked_mul(a[1][0]).ok_or_else(overflow)?)
        .ok_or_else(overflow)?;
    Ok(det.unsigned_abs())
}

/// All points with `gⁿ(x) = x`, sorted, the origin first.
pub fn periodic_base_points(g: &TorusAutomorphism, n: u32) -> Result<Vec<RationalPoint>> {
    if n == 0 {
        return Err(LabError::InvalidParameter("period must be at least 1".into()));
    }
    let count = periodic_point_count(g, n)?;
    if count > MAX_PERIODIC_POINTS {
        return Err(LabError::TooManyPeriodicPoints {
            count,
            limit: MAX_PERIODIC_POINTS,
        });
    }
    let det = count as i128;
    let p = matrix_power(&g.matrix(), n)?;
    let a = [[p[0][0] - 1, p[0][1]], [p[1][0], p[1][1] - 1]];
    // columns of adj(A)
    let adj = [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]];
    let (gg, x, y) = ext_gcd(adj[0][0], adj[0][1]);
    let h = adj[1][0] * x + adj[1][1] * y;
    let mut c = (-adj[1][0] * adj[0][1] + adj[1][1] * adj[0][0]) / gg;
    if c < 0 {
        c = -c;
    }
    debug_assert_eq!(gg * c, det);
    let mut points = Vec::with_capacity(count as usize);
    for i in 0..c {
        for j in 0..gg {
            points.push(RationalPoint::new([i * gg, i * h + j * c], det));
        }
    }
    points.sort();
    Ok(points)
}

/// A center leaf `{p} × S¹` over a periodic base point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicLeaf {
    /// Exact orbit `p, g(p), …, g^{n_p − 1}(p)`.
    orbit: Vec<RationalPoint>,
    #[serde(skip)]
    orbit_fixed: Vec<TorusPoint>,
    /// Fiber rotation of the return map, as stored increments summed.
    #[serde(skip)]
    rotation_fixed: FiberCoord,
    rotation: f64,
    /// `(p, q)` when the rotation number is recognized as `p/q`.
    rational: Option<(u64, u64)>,
}

impl PeriodicLeaf {
    /// Fails if `point` is not periodic within `max_period` steps.
    pub fn new(f: &SkewProduct, point: RationalPoint, max_period: usize) -> Result<Self> {
        let m = f.base().matrix();
        let mut orbit = vec![point];
        let mut q = point.apply(&m);
        while q != point {
            if orbit.len() >= max_period {
                return Err(LabError::NotPeriodic(format!(
                    "no return within {max_period} steps"
                )));
            }
            orbit.push(q);
            q = q.apply(&m);
        }
        let orbit_fixed: Vec<TorusPoint> = orbit.iter().map(RationalPoint::to_torus).collect();
        let rotation_fixed = FiberCoord(
            orbit_fixed
                .iter()
                .fold(0u64, |acc, x| acc.wrapping_add(f.theta_fixed(x))),
        );
        let rotation = rotation_fixed.value();
        Ok(Self {
            orbit,
            orbit_fixed,
            rotation_fixed,
            rotation,
            rational: recognize_rational(rotation),
        })
    }

    /// Leaf over the origin, which every automorphism fixes.
    pub fn origin(f: &SkewProduct) -> Self {
        Self::new(f, RationalPoint::origin(), 1).expect("origin is fixed")
    }

    pub fn period(&self) -> usize {
        self.orbit.len()
    }

    pub fn base_point(&self) -> RationalPoint {
        self.orbit[0]
    }

    pub fn orbit(&self) -> &[RationalPoint] {
        &self.orbit
    }

    pub fn orbit_fixed(&self) -> &[TorusPoint] {
        &self.orbit_fixed
    }

    /// `θ_p = Σ_{i<n_p} θ(gⁱp) mod 1`.
    pub fn rotation(&self) -> f64 {
        self.rotation
    }

    pub fn rotation_fixed(&self) -> FiberCoord {
        self.rotation_fixed
    }

    pub fn rational_rotation(&self) -> Option<(u64, u64)> {
        self.rational
    }

    pub fn is_irrational(&self) -> bool {
        self.rational.is_none()
    }

    /// Return time `k(p)` of fiber points under the leaf rotation (1 if
    /// irrational, where it is unused).
    pub fn fiber_return_time(&self) -> u64 {
        self.rational.map(|(_, q)| q).unwrap_or(1)
    }
}

/// Continued-fraction convergents; `Some((p, q))` if one with
/// `q ≤ MAX_ROTATION_DENOMINATOR` is within tolerance.
fn recognize_rational(x: f64) -> Option<(u64, u64)> {
    let x = x.rem_euclid(1.0);
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let ai = a as u64;
        let h2 = ai.checked_mul(h1)?.checked_add(h0)?;
        let k2 = ai.checked_mul(k1)?.checked_add(k0)?;
        if k2 > MAX_ROTATION_DENOMINATOR {
            return None;
        }
        if (x - h2 as f64 / k2 as f64).abs() <= ROTATION_RATIONAL_TOL {
            return Some((h2 % k2, k2));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac <= 0.0 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::trig::TrigPoly;
    use proptest::prelude::*;

    #[test]
    fn cat_period_one_is_origin_only() {
        let pts = periodic_base_points(&TorusAutomorphism::cat(), 1).unwrap();
        assert_eq!(pts, vec![RationalPoint::origin().reduced()]);
    }

    #[test]
    fn cat_period_two_has_five_points() {
        // det(M² − I) = det [[4, 3], [3, 1]] = −5
        let g = TorusAutomorphism::cat();
        let pts = periodic_base_points(&g, 2).unwrap();
        assert_eq!(pts.len(), 5);
        let m = g.matrix();
        for p in &pts {
            assert_eq!(p.apply(&m).apply(&m), *p);
        }
        assert_eq!(pts[0].num, [0, 0]);
    }

    #[test]
    fn overflow_is_reported() {
        let g = TorusAutomorphism::cat();
        assert!(matches!(
            periodic_base_points(&g, 200),
            Err(LabError::PeriodOverflow { .. })
        ));
    }

    #[test]
    fn too_many_points() {
        let g = TorusAutomorphism::cat();
        assert!(matches!(
            periodic_base_points(&g, 20),
            Err(LabError::TooManyPeriodicPoints { .. })
        ));
    }

    #[test]
    fn rotation_recognition() {
        assert_eq!(recognize_rational(0.0), Some((0, 1)));
        assert_eq!(recognize_rational(0.25), Some((1, 4)));
        assert_eq!(recognize_rational(3.0 / 7.0), Some((3, 7)));
        assert_eq!(recognize_rational((5f64.sqrt() - 1.0) / 2.0), None);
    }

    #[test]
    fn leaf_rotation_sums_the_orbit() {
        let f = SkewProduct::new(
            TorusAutomorphism::cat(),
            TrigPoly::constant(2, 0.05).with_cos(&[1, 0], 0.1),
        );
        let pts = periodic_base_points(f.base(), 2).unwrap();
        let p = pts.iter().find(|p| p.num != [0, 0]).unwrap();
        let leaf = PeriodicLeaf::new(&f, *p, 10).unwrap();
        assert_eq!(leaf.period(), 2);
        let direct: f64 = leaf
            .orbit()
            .iter()
            .map(|q| 0.05 + 0.1 * (std::f64::consts::TAU * q.coords()[0]).cos())
            .sum();
        assert!((leaf.rotation() - direct.rem_euclid(1.0)).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn count_matches_determinant(a in 2i64..5, b in 1i64..3, n in 1u32..5) {
            // [[a, b], [a*b - 1 .. ]] style: build det-1 matrices [[a, 1], [a*b-1, b]]
            let m = [[a, 1], [a * b - 1, b]];
            if let Ok(g) = TorusAutomorphism::new(m) {
                let count = periodic_point_count(&g, n).unwrap();
                if count <= 5000 {
                    let pts = periodic_base_points(&g, n).unwrap();
                    prop_assert_eq!(pts.len() as u128, count);
                    let pn = matrix_power(&m, n).unwrap();
                    let pn = [[pn[0][0] as i64, pn[0][1] as i64], [pn[1][0] as i64, pn[1][1] as i64]];
                    let mut seen = std::collections::HashSet::new();
                    for p in &pts {
                        prop_assert_eq!(p.apply(&pn), *p);
                        prop_assert!(seen.insert(p.reduced()));
                    }
                }
            }
        }
    }
}
