//! Points on strong stable/unstable leaves through an exactly known orbit.
//!
//! A point `y` on the stable leaf of an anchor `x` is stored as
//! `(x, s)` with `y = x + s·e_s`. Iterating maps it to `(g x, μ_s s)`; the
//! anchor orbit is exact (fixed-point lattice dynamics, or an exact rational
//! periodic orbit), so rounding never leaks into the expanding direction.

use std::sync::Arc;

use serde::Serialize;

use super::automorphism::TorusAutomorphism;
use super::fixed::{FiberCoord, SkewPoint, TorusPoint};
use super::skew::SkewProduct;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LeafKind {
    Stable,
    Unstable,
}

impl LeafKind {
    pub fn direction(&self, g: &TorusAutomorphism) -> [f64; 2] {
        match self {
            LeafKind::Stable => g.e_s(),
            LeafKind::Unstable => g.e_u(),
        }
    }

    pub fn eigenvalue(&self, g: &TorusAutomorphism) -> f64 {
        match self {
            LeafKind::Stable => g.mu_s(),
            LeafKind::Unstable => g.mu_u(),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            LeafKind::Stable => "stable",
            LeafKind::Unstable => "unstable",
        }
    }
}

/// The current point of an exactly computable anchor orbit.
#[derive(Debug, Clone, PartialEq)]
pub enum Anchor {
    /// A fixed-point lattice point; `g` acts on it without error.
    Lattice(TorusPoint),
    /// Position `index` on an exact periodic orbit.
    Periodic {
        orbit: Arc<[TorusPoint]>,
        index: usize,
    },
}

impl Anchor {
    pub fn periodic(orbit: &[TorusPoint]) -> Self {
        Anchor::Periodic {
            orbit: orbit.to_vec().into(),
            index: 0,
        }
    }

    pub fn point(&self) -> TorusPoint {
        match self {
            Anchor::Lattice(x) => *x,
            Anchor::Periodic { orbit, index } => orbit[*index],
        }
    }

    pub fn forward(&self, g: &TorusAutomorphism) -> Self {
        match self {
            Anchor::Lattice(x) => Anchor::Lattice(g.apply(x)),
            Anchor::Periodic { orbit, index } => Anchor::Periodic {
                orbit: orbit.clone(),
                index: (index + 1) % orbit.len(),
            },
        }
    }

    pub fn backward(&self, g: &TorusAutomorphism) -> Self {
        match self {
            Anchor::Lattice(x) => Anchor::Lattice(g.apply_inverse(x)),
            Anchor::Periodic { orbit, index } => Anchor::Periodic {
                orbit: orbit.clone(),
                index: (index + orbit.len() - 1) % orbit.len(),
            },
        }
    }
}

/// `(anchor + offset · e_kind, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafPoint {
    pub anchor: Anchor,
    pub kind: LeafKind,
    pub offset: f64,
    pub t: FiberCoord,
}

impl LeafPoint {
    pub fn new(anchor: Anchor, kind: LeafKind, offset: f64, t: FiberCoord) -> Self {
        Self {
            anchor,
            kind,
            offset,
            t,
        }
    }

    pub fn base(&self, g: &TorusAutomorphism) -> TorusPoint {
        let e = self.kind.direction(g);
        self.anchor
            .point()
            .shifted([self.offset * e[0], self.offset * e[1]])
    }

    pub fn point(&self, g: &TorusAutomorphism) -> SkewPoint {
        SkewPoint {
            x: self.base(g),
            t: self.t,
        }
    }

    pub fn forward(&self, f: &SkewProduct) -> Self {
        let g = f.base();
        let x = self.base(g);
        Self {
            anchor: self.anchor.forward(g),
            kind: self.kind,
            offset: self.offset * self.kind.eigenvalue(g),
            t: FiberCoord(self.t.0.wrapping_add(f.theta_fixed(&x))),
        }
    }

    pub fn backward(&self, f: &SkewProduct) -> Self {
        let g = f.base();
        let prev = Self {
            anchor: self.anchor.backward(g),
            kind: self.kind,
            offset: self.offset / self.kind.eigenvalue(g),
            t: self.t,
        };
        let x = prev.base(g);
        Self {
            t: FiberCoord(self.t.0.wrapping_sub(f.theta_fixed(&x))),
            ..prev
        }
    }

    pub fn iterate(&self, f: &SkewProduct, n: i64) -> Self {
        let mut p = self.clone();
        for _ in 0..n.unsigned_abs() {
            p = if n > 0 { p.forward(f) } else { p.backward(f) };
        }
        p
    }

    /// Same anchor and kind, different offset and fiber.
    pub fn sibling(&self, offset: f64, t: FiberCoord) -> Self {
        Self {
            anchor: self.anchor.clone(),
            kind: self.kind,
            offset,
            t,
        }
    }
}
