use nalgebra::DMatrix;
use serde::Serialize;

use super::field::CocycleField;
use super::product::LinearCocycle;
use crate::base::{FiberCoord, PeriodicLeaf, SkewPoint, SkewProduct};

/// The cocycle `B(t) = A^{n_p}(p, t)` over the rotation `t ↦ t + θ_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafCocycle {
    field: CocycleField,
    skew: SkewProduct,
    leaf: PeriodicLeaf,
}

/// Invariant fiber measure used on a leaf.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeafMeasure {
    pub name: &'static str,
    /// Lebesgue is the only invariant measure when `θ_p` is irrational; for
    /// rational `θ_p` it is one choice among many.
    pub uniquely_ergodic: bool,
}

impl LeafCocycle {
    pub fn leaf(&self) -> &PeriodicLeaf {
        &self.leaf
    }

    pub fn field(&self) -> &CocycleField {
        &self.field
    }

    pub fn skew(&self) -> &SkewProduct {
        &self.skew
    }

    pub fn measure(&self) -> LeafMeasure {
        LeafMeasure {
            name: "lebesgue",
            uniquely_ergodic: self.leaf.is_irrational(),
        }
    }

    /// Base points `(gⁱp, t_i)` visited during one return.
    pub fn orbit_points(&self, t: FiberCoord) -> Vec<SkewPoint> {
        let mut out = Vec::with_capacity(self.leaf.period());
        let mut s = t;
        for x in self.leaf.orbit_fixed() {
            out.push(SkewPoint { x: *x, t: s });
            s = FiberCoord(s.0.wrapping_add(self.skew.theta_fixed(x)));
        }
        out
    }
}

/// Restriction of `A` to the center leaf over a periodic point.
pub fn restrict_to_leaf(field: &CocycleField, skew: &SkewProduct, leaf: &PeriodicLeaf) -> LeafCocycle {
    LeafCocycle {
        field: field.clone(),
        skew: skew.clone(),
        leaf: leaf.clone(),
    }
}

impl LinearCocycle for LeafCocycle {
    type Point = FiberCoord;

    fn half_dim(&self) -> usize {
        self.field.half_dim()
    }

    fn matrix(&self, t: &FiberCoord) -> DMatrix<f64> {
        let n = self.dim();
        self.orbit_points(*t)
            .iter()
            .fold(DMatrix::identity(n, n), |acc, p| self.field.matrix_at(p) * acc)
    }

    fn forward(&self, t: &FiberCoord) -> FiberCoord {
        t.add(self.leaf.rotation_fixed())
    }

    fn backward(&self, t: &FiberCoord) -> FiberCoord {
        t.sub(self.leaf.rotation_fixed())
    }
}
