//! Points of `𝕋² × S¹` in 64-bit fixed point.
//!
//! A coordinate is stored as `k / 2⁶⁴` with `k: u64`, so reduction mod 1 is
//! free (wrapping arithmetic) and an integer matrix acts on `𝕋²` exactly:
//! `g` and `g⁻¹` are inverse bijections of the stored lattice, and the fiber
//! update `t ↦ t + θ(x)` is undone bit-for-bit by `t ↦ t − θ(x)`.

use serde::{Serialize, Serializer};

const TWO_64: f64 = 18_446_744_073_709_551_616.0;

/// `x mod 1` as a fixed-point fraction.
pub fn to_fixed(x: f64) -> u64 {
    let f = x - x.floor();
    // f * 2^64 can round up to 2^64, which wraps to 0 as intended
    ((f * TWO_64) as u128) as u64
}

/// Fixed-point fraction as `f64` in `[0, 1)`.
pub fn from_fixed(u: u64) -> f64 {
    (u >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
}

/// Fixed-point fraction as the representative in `[-1/2, 1/2)`.
pub fn signed_from_fixed(u: u64) -> f64 {
    (u as i64) as f64 / TWO_64
}

/// A real displacement reduced mod 1, rounded to the nearest fixed-point step.
pub fn displacement(d: f64) -> u64 {
    let r = d - d.round();
    ((r * TWO_64).round() as i128) as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusPoint(pub [u64; 2]);

impl TorusPoint {
    pub const ORIGIN: TorusPoint = TorusPoint([0, 0]);

    pub fn new(x1: f64, x2: f64) -> Self {
        Self([to_fixed(x1), to_fixed(x2)])
    }

    pub fn coords(&self) -> [f64; 2] {
        [from_fixed(self.0[0]), from_fixed(self.0[1])]
    }

    /// `self + v` for a real vector `v`.
    pub fn shifted(&self, v: [f64; 2]) -> Self {
        Self([
            self.0[0].wrapping_add(displacement(v[0])),
            self.0[1].wrapping_add(displacement(v[1])),
        ])
    }

    /// Shortest lift of `other − self` to `ℝ²`.
    pub fn lift_to(&self, other: &TorusPoint) -> [f64; 2] {
        [
            signed_from_fixed(other.0[0].wrapping_sub(self.0[0])),
            signed_from_fixed(other.0[1].wrapping_sub(self.0[1])),
        ]
    }

    /// Quotient metric: the minimum over lattice translates.
    pub fn distance(&self, other: &TorusPoint) -> f64 {
        let [a, b] = self.lift_to(other);
        a.hypot(b)
    }
}

impl Serialize for TorusPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

/// A point of the circle fiber `S¹ = ℝ/ℤ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiberCoord(pub u64);

impl FiberCoord {
    pub fn new(t: f64) -> Self {
        Self(to_fixed(t))
    }

    pub fn value(&self) -> f64 {
        from_fixed(self.0)
    }

    pub fn shifted(&self, d: f64) -> Self {
        Self(self.0.wrapping_add(displacement(d)))
    }

    pub fn add(&self, other: FiberCoord) -> Self {
        Self(self.0.wrapping_add(other.0))
    }

    pub fn sub(&self, other: FiberCoord) -> Self {
        Self(self.0.wrapping_sub(other.0))
    }

    /// Signed shortest arc from `self` to `other`.
    pub fn lift_to(&self, other: &FiberCoord) -> f64 {
        signed_from_fixed(other.0.wrapping_sub(self.0))
    }

    pub fn distance(&self, other: &FiberCoord) -> f64 {
        self.lift_to(other).abs()
    }
}

impl Serialize for FiberCoord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.value().serialize(s)
    }
}

/// A point `(x, t)` of `M = 𝕋² × S¹`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SkewPoint {
    pub x: TorusPoint,
    pub t: FiberCoord,
}

impl SkewPoint {
    pub fn new(x1: f64, x2: f64, t: f64) -> Self {
        Self {
            x: TorusPoint::new(x1, x2),
            t: FiberCoord::new(t),
        }
    }

    /// Product metric on `M`.
    pub fn distance(&self, other: &SkewPoint) -> f64 {
        self.x.distance(&other.x).hypot(self.t.distance(&other.t))
    }

    /// The three raw fixed-point coordinates `(x₁, x₂, t)`.
    pub fn raw(&self) -> [u64; 3] {
        [self.x.0[0], self.x.0[1], self.t.0]
    }
}
