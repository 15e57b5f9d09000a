use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("subspaces do not have complementary dimensions ({dim_v} + {dim_w} != {ambient})")]
    NonComplementary {
        dim_v: usize,
        dim_w: usize,
        ambient: usize,
    },

    #[error("no admissible transvection direction found after {attempts} attempts (seed {seed})")]
    SearchFailure { attempts: usize, seed: u64 },

    #[error("separation margin collapsed for pair {pair} after {retries} retries")]
    MarginCollapse { pair: usize, retries: usize },

    #[error("matrix is not symplectic: drift {drift:.3e} exceeds {tolerance:.1e}")]
    NotSymplectic { drift: f64, tolerance: f64 },

    #[error("generator is not in the symplectic Lie algebra: defect {defect:.3e}")]
    NotInLieAlgebra { defect: f64 },

    #[error("numerical degradation: relative symplectic drift {drift:.3e} after correction")]
    NumericalDegradation { drift: f64 },

    #[error("invalid torus automorphism: {0}")]
    InvalidAutomorphism(String),

    #[error("integer overflow computing period-{period} points; use a smaller period")]
    PeriodOverflow { period: u32 },

    #[error("too many periodic points ({count}); limit is {limit}")]
    TooManyPeriodicPoints { count: u128, limit: u128 },

    #[error("point is not periodic under the base map: {0}")]
    NotPeriodic(String),

    #[error("point is not on the local {kind} set: {detail}")]
    NotOnLeaf { kind: &'static str, detail: String },

    #[error("homoclinic convergence check failed at iterate {iterate}: distance {distance:.3e} > bound {bound:.3e}")]
    HomoclinicConvergence {
        iterate: i64,
        distance: f64,
        bound: f64,
    },

    #[error("non-finite value encountered; decrease the renormalisation interval")]
    NonFinite,

    #[error("holonomy refused: {0}")]
    HolonomyRefused(String),

    #[error("holonomy did not converge within {n_max} iterates (last increment {last_increment:.3e})")]
    HolonomyDivergence {
        n_max: usize,
        last_increment: f64,
        trace: Vec<f64>,
    },

    #[error("perturbation support collides with iterate {iterate} of the homoclinic fiber (distance {distance:.3e} < radius {radius:.3e})")]
    SupportCollision {
        iterate: i64,
        distance: f64,
        radius: f64,
    },

    #[error("perturbation budget exceeded: {used:.4} > {budget:.4}")]
    BudgetExceeded { used: f64, budget: f64 },

    #[error("positivity search failed at stage '{stage}': {detail}")]
    SearchFailed { stage: String, detail: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown strategy '{name}' (available: {available})")]
    UnknownStrategy { name: String, available: String },
}

pub type Result<T> = std::result::Result<T, LabError>;
