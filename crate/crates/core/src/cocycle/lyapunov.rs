//! Lyapunov spectra by QR re-orthonormalization along sampled orbits.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::product::LinearCocycle;
use super::sampler::MeasureSampler;
use crate::error::{LabError, Result};
use crate::{linalg, seeding};

/// Floor for reported standard errors (orbits of constant cocycles agree to
/// rounding).
pub const MIN_STDERR: f64 = 1e-12;

pub const MAX_BURN_IN: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovConfig {
    pub iterations: usize,
    pub orbits: usize,
    pub seed: u64,
    /// Defaults to `min(n / 20, 5000)`.
    pub burn_in: Option<usize>,
}

impl LyapunovConfig {
    pub fn new(iterations: usize, orbits: usize, seed: u64) -> Self {
        Self {
            iterations,
            orbits,
            seed,
            burn_in: None,
        }
    }

    fn burn_in(&self) -> usize {
        self.burn_in
            .unwrap_or((self.iterations / 20).min(MAX_BURN_IN))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LyapunovReport {
    /// `λ₁ ≥ ⋯ ≥ λ_{2d}`, natural log per iterate.
    pub exponents: Vec<f64>,
    /// Standard error across orbits, per exponent.
    pub stderr: Vec<f64>,
    /// `|λ_i + λ_{2d+1−i}|` for `i ≤ d`.
    pub pairing_defects: Vec<f64>,
    pub symmetry_defect: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub orbits: usize,
    pub seed: u64,
    pub sampler: String,
    pub qr_interval: usize,
    pub per_orbit: Vec<Vec<f64>>,
}

impl LyapunovReport {
    pub fn top(&self) -> f64 {
        self.exponents[0]
    }

    pub fn top_stderr(&self) -> f64 {
        self.stderr[0]
    }

    pub fn max_stderr(&self) -> f64 {
        self.stderr.iter().fold(0.0, |a: f64, &b| a.max(b))
    }

    /// `|λ_i + λ_{2d+1−i}| ≤ k · max(se_i, se_{2d+1−i})` for every `i`.
    pub fn pairing_within(&self, k: f64) -> bool {
        let n = self.exponents.len();
        self.pairing_defects
            .iter()
            .enumerate()
            .all(|(i, &d)| d <= k * self.stderr[i].max(self.stderr[n - 1 - i]))
    }
}

/// QR every step for `2d ≤ 4`, every fifth step above.
pub fn qr_interval(dim: usize) -> usize {
    if dim <= 4 {
        1
    } else {
        5
    }
}

fn random_frame(dim: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = seeding::rng(seed);
    let g = DMatrix::from_fn(dim, dim, |_, _| StandardNormal.sample(&mut rng));
    linalg::qr_frame(g).0
}

fn orbit_exponents<C: LinearCocycle>(
    c: &C,
    start: C::Point,
    cfg: &LyapunovConfig,
    seed: u64,
) -> Result<Vec<f64>> {
    let dim = c.dim();
    let interval = qr_interval(dim);
    let mut q = random_frame(dim, seed);
    let mut x = start;
    let burn = cfg.burn_in();
    let mut sums = vec![0.0; dim];
    let total = burn + cfg.iterations;
    for step in 0..total {
        q = c.matrix(&x) * q;
        x = c.forward(&x);
        let last = step + 1 == total;
        if (step + 1) % interval == 0 || last || step + 1 == burn {
            let (qq, r) = linalg::qr_frame(q);
            q = qq;
            if step >= burn {
                for (s, v) in sums.iter_mut().zip(&r) {
                    if !(v.is_finite() && *v > 0.0) {
                        return Err(LabError::NonFinite);
                    }
                    *s += v.ln();
                }
            } else if r.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(LabError::NonFinite);
            }
        }
    }
    let mut ex: Vec<f64> = sums
        .iter()
        .map(|s| s / cfg.iterations as f64)
        .collect();
    ex.sort_by(|a, b| b.total_cmp(a));
    Ok(ex)
}

/// Full spectrum from `orbits` independent orbits of length `n`.
///
/// Deterministic in `(seed, n, orbits)`: orbit `k` uses the derived stream
/// `k`, and results are reduced in orbit order.
pub fn lyapunov_spectrum<C: LinearCocycle>(
    c: &C,
    sampler: &dyn MeasureSampler<C::Point>,
    cfg: &LyapunovConfig,
) -> Result<LyapunovReport> {
    if cfg.iterations == 0 || cfg.orbits == 0 {
        return Err(LabError::InvalidParameter(
            "spectrum needs at least one iteration and one orbit".into(),
        ));
    }
    let per_orbit: Vec<Vec<f64>> = (0..cfg.orbits)
        .into_par_iter()
        .map(|k| {
            let start = sampler.sample(k, cfg.orbits, cfg.seed);
            orbit_exponents(c, start, cfg, seeding::derive2(cfg.seed, 1, k as u64))
        })
        .collect::<Result<_>>()?;
    let dim = c.dim();
    let m = cfg.orbits as f64;
    let exponents: Vec<f64> = (0..dim)
        .map(|i| per_orbit.iter().map(|o| o[i]).sum::<f64>() / m)
        .collect();
    let stderr: Vec<f64> = (0..dim)
        .map(|i| {
            if cfg.orbits < 2 {
                return MIN_STDERR;
            }
            let var = per_orbit
                .iter()
                .map(|o| (o[i] - exponents[i]).powi(2))
                .sum::<f64>()
                / (m - 1.0);
            (var / m).sqrt().max(MIN_STDERR)
        })
        .collect();
    let pairing_defects: Vec<f64> = (0..dim / 2)
        .map(|i| (exponents[i] + exponents[dim - 1 - i]).abs())
        .collect();
    let symmetry_defect = pairing_defects.iter().fold(0.0, |a: f64, &b| a.max(b));
    Ok(LyapunovReport {
        exponents,
        stderr,
        pairing_defects,
        symmetry_defect,
        iterations: cfg.iterations,
        burn_in: cfg.burn_in(),
        orbits: cfg.orbits,
        seed: cfg.seed,
        sampler: sampler.name().to_string(),
        qr_interval: qr_interval(dim),
        per_orbit,
    })
}
