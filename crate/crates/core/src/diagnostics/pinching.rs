//! Weak pinching on a periodic center leaf.
//!
//! `L(A|_K, μ_K)` is the top exponent of the leaf cocycle
//! `B(t) = A^{n_p}(p, t)` over `t ↦ t + θ_p`. For irrational `θ_p` it comes
//! from the Benettin estimate under Lebesgue measure. For `θ_p = p'/q` every
//! point is periodic and the exponent at `t` is `(1/q) log ρ(B^q(t))`,
//! averaged over a fiber grid; positivity additionally needs `ρ > 1` on an
//! open arc. Exponents are per return to the leaf.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use super::Verdict;
use crate::base::{FiberCoord, PeriodicLeaf};
use crate::cocycle::{
    lyapunov_spectrum, restrict_to_leaf, CocycleField, LeafCocycle, LinearCocycle, LyapunovConfig,
    LyapunovReport, MeasureSampler,
};
use crate::base::SkewProduct;
use crate::error::Result;
use crate::linalg::spectral_radius;

/// Smallest estimate reported as positive.
pub const MIN_POSITIVE_EXPONENT: f64 = 2e-3;

/// `log ρ` above which a grid point counts as hyperbolic.
const HYPERBOLIC_LOG_TOL: f64 = 1e-6;

/// Gap size used for the gap-structure fractions.
const GAP_TOL: f64 = 2e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PinchingConfig {
    pub iterations: usize,
    pub orbits: usize,
    pub seed: u64,
    /// Fiber grid of the eigenvalue route.
    pub grid: usize,
}

impl Default for PinchingConfig {
    fn default() -> Self {
        Self {
            iterations: 20_000,
            orbits: 16,
            seed: 0,
            grid: 512,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PinchingRoute {
    Lyapunov,
    Eigenvalue,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PinchingVerdict {
    pub leaf_point: [f64; 2],
    pub leaf_period: usize,
    pub rotation: f64,
    pub route: PinchingRoute,
    pub estimate: f64,
    pub error: f64,
    pub verdict: Verdict,
    /// Fraction of samples with `λ^i − λ^{i+1} > 2e−3`, for each `i`.
    pub gap_fractions: Vec<f64>,
    /// Longest run of consecutive hyperbolic grid points (eigenvalue route).
    pub hyperbolic_run: usize,
    pub lyapunov: Option<LyapunovReport>,
}

fn classify(estimate: f64, error: f64, open_set: bool) -> Verdict {
    if open_set && estimate > 3.0 * error && estimate > MIN_POSITIVE_EXPONENT {
        Verdict::Positive
    } else if estimate <= MIN_POSITIVE_EXPONENT && 3.0 * error <= MIN_POSITIVE_EXPONENT {
        Verdict::Negative
    } else {
        Verdict::Inconclusive
    }
}

/// Sorted `log |eigenvalue|` of `m`, largest first.
fn log_moduli(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm().ln())
        .collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn return_power(b: &LeafCocycle, t: FiberCoord, q: u64) -> DMatrix<f64> {
    let dim = b.dim();
    let mut m = DMatrix::identity(dim, dim);
    let mut s = t;
    for _ in 0..q {
        m = b.matrix(&s) * m;
        s = b.forward(&s);
    }
    m
}

fn eigenvalue_route(b: &LeafCocycle, q: u64, grid: usize) -> (f64, f64, usize, Vec<f64>) {
    let rows: Vec<(f64, Vec<f64>)> = (0..grid)
        .into_par_iter()
        .map(|i| {
            let t = FiberCoord::new((i as f64 + 0.5) / grid as f64);
            let m = return_power(b, t, q);
            let rho = spectral_radius(&m).ln() / q as f64;
            (rho, log_moduli(&m))
        })
        .collect();
    let full = rows.iter().map(|r| r.0).sum::<f64>() / grid as f64;
    let half_n = grid.div_ceil(2);
    let half = rows.iter().step_by(2).map(|r| r.0).sum::<f64>() / half_n as f64;
    let mut best = 0;
    let mut run = 0;
    // cyclic: scan two laps, capped at one lap
    for i in 0..2 * grid {
        if rows[i % grid].0 > HYPERBOLIC_LOG_TOL {
            run += 1;
            best = best.max(run.min(grid));
        } else {
            run = 0;
        }
    }
    let dim = b.dim();
    let gaps = (0..dim - 1)
        .map(|i| {
            rows.iter()
                .filter(|r| (r.1[i] - r.1[i + 1]) / q as f64 > GAP_TOL)
                .count() as f64
                / grid as f64
        })
        .collect();
    (full, (full - half).abs(), best, gaps)
}

pub fn weak_pinching_test(
    field: &CocycleField,
    skew: &SkewProduct,
    leaf: &PeriodicLeaf,
    sampler: &dyn MeasureSampler<FiberCoord>,
    cfg: &PinchingConfig,
) -> Result<PinchingVerdict> {
    let b = restrict_to_leaf(field, skew, leaf);
    let base = leaf.base_point().coords();
    let common = |route, estimate, error, verdict, gap_fractions, hyperbolic_run, lyapunov| PinchingVerdict {
        leaf_point: base,
        leaf_period: leaf.period(),
        rotation: leaf.rotation(),
        route,
        estimate,
        error,
        verdict,
        gap_fractions,
        hyperbolic_run,
        lyapunov,
    };
    match leaf.rational_rotation() {
        Some((_, q)) => {
            let grid = cfg.grid.max(4);
            let (estimate, error, run, gaps) = eigenvalue_route(&b, q, grid);
            let verdict = classify(estimate, error, run >= 2);
            Ok(common(PinchingRoute::Eigenvalue, estimate, error, verdict, gaps, run, None))
        }
        None => {
            let report = lyapunov_spectrum(&b, sampler, &LyapunovConfig::new(cfg.iterations, cfg.orbits, cfg.seed))?;
            let estimate = report.top();
            let error = report.top_stderr();
            let dim = b.dim();
            let gaps = (0..dim - 1)
                .map(|i| {
                    report
                        .per_orbit
                        .iter()
                        .filter(|e| e[i] - e[i + 1] > GAP_TOL)
                        .count() as f64
                        / report.per_orbit.len() as f64
                })
                .collect();
            let verdict = classify(estimate, error, true);
            Ok(common(PinchingRoute::Lyapunov, estimate, error, verdict, gaps, 0, Some(report)))
        }
    }
}
