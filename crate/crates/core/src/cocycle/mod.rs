//! Hölder symplectic cocycles over the skew product: evaluation, iterates,
//! Lyapunov spectra, Oseledets frames and restriction to center leaves.

mod field;
mod holder;
mod leaf;
mod lyapunov;
mod oseledets;
mod product;
mod sampler;

pub use field::{
    bump_profile, lie_algebra_defect, transvection_factor, Bump, CocycleField, Factor, ScalarField,
    BUMP_PROFILE_LIPSCHITZ, LIE_ALGEBRA_TOL,
};
pub use holder::{holder_norm_estimate, HolderEstimate};
pub use leaf::{restrict_to_leaf, LeafCocycle, LeafMeasure};
pub use lyapunov::{lyapunov_spectrum, qr_interval, LyapunovConfig, LyapunovReport, MIN_STDERR};
pub use oseledets::{oseledets_frame, FrameConfig, OseledetsFrame, FRAME_CONVERGENCE_TOL};
pub use product::{cocycle_product, CocycleProduct, LinearCocycle, SkewCocycle, RECERTIFY_INTERVAL};
pub use sampler::{
    sampler_by_name, sampler_registry, GridSampler, LebesgueSampler, MeasureSampler, SamplePoint,
};
