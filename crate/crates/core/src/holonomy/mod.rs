//! Fiber bunching, strong stable/unstable holonomies and homoclinic loop
//! holonomies.

mod bunching;
mod loops;
mod strong;

pub use bunching::{certify_fiber_bunching, FiberBunchingCertificate, MAX_BUNCHING_RATE};
pub use loops::{
    iterate_loop, loop_continuity, loop_holonomy, HomoclinicLoop, LoopContinuity, LoopHolonomy,
};
pub use strong::{
    leaf_holonomy, strong_holonomy, HolonomyOperator, HOLONOMY_MAX_ITERATES,
    HOLONOMY_RESIDUAL_TOL, HOLONOMY_TRUNCATION,
};
