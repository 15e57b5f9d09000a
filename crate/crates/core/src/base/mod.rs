//! The partially hyperbolic base `f(x, t) = (g(x), t + θ(x))` on `𝕋² × S¹`.

mod automorphism;
mod center;
mod fixed;
mod homoclinic;
mod leaf;
mod periodic;
mod skew;
mod trig;

pub use automorphism::{TorusAutomorphism, LOCAL_LEAF_SIZE};
pub use center::{
    center_holonomy_shift, leaf_offset, leaf_partner, leaf_shift, ON_LEAF_TOL, SHIFT_TAIL_TOL,
};
pub use fixed::{displacement, from_fixed, to_fixed, FiberCoord, SkewPoint, TorusPoint};
pub use homoclinic::{find_homoclinic, homoclinic_lattice_vectors, HomoclinicPoint};
pub use leaf::{Anchor, LeafKind, LeafPoint};
pub use periodic::{
    matrix_power, periodic_base_points, periodic_point_count, PeriodicLeaf, RationalPoint,
    MAX_PERIODIC_POINTS,
};
pub use skew::SkewProduct;
pub use trig::{TrigPoly, TrigTerm};
