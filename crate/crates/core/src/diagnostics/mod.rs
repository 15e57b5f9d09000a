//! Executable hypotheses and perturbations: weak pinching, weak twisting,
//! ε-monotonicity, the rotation-block perturbation, bump-localized
//! transvection perturbations and the positivity search pipeline.

mod monotone;
mod perturb;
mod pinching;
mod search;
mod twisting;

use serde::Serialize;

pub use monotone::{epsilon_monotonicity_test, MonotoneConfig, MonotoneVerdict};
pub use perturb::{
    rotate_perturbation, rotation_size, transvection_perturbation, Side, TransvectionPerturbation,
};
pub use pinching::{weak_pinching_test, PinchingConfig, PinchingRoute, PinchingVerdict};
pub use search::{
    generic_factor, positivity_search, unitary_obstruction, prepare_rotation_base, rotation_sweep,
    theta_schedule, PerturbationRecord, SearchConfig, SearchReport, SweepRow,
};
pub use twisting::{weak_twisting_test, TwistingConfig, TwistingVerdict, TwistingWindow};

/// Outcome of a sampled test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Positive,
    Negative,
    Inconclusive,
}

impl Verdict {
    pub fn is_positive(&self) -> bool {
        matches!(self, Verdict::Positive)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Positive => "positive",
            Verdict::Negative => "negative",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}
