//! ε-monotonicity of circle `SL(2, ℝ)` cocycles.
//!
//! For a direction `w`, let `φ_w(t)` be the lifted projective angle of
//! `B(t)w`. The cocycle is ε-monotonic when
//! `|φ_w(t) − φ_w(s)| / |t − s| > ε` for every `w` and every pair `s ≠ t`.
//! The margin is the smallest quotient over grid pairs whose forward arc
//! is at most `window`, and over the sampled directions.

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{LabError, Result};
use crate::seeding;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotoneConfig {
    pub epsilon: f64,
    pub grid: usize,
    pub directions: usize,
    /// Longest forward arc compared, as a fraction of the circle.
    pub window: f64,
    pub seed: u64,
}

impl Default for MonotoneConfig {
    fn default() -> Self {
        Self {
            epsilon: 1.0,
            grid: 2048,
            directions: 16,
            window: 1.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneVerdict {
    pub epsilon: f64,
    pub margin: f64,
    pub pass: bool,
    pub grid: usize,
    pub directions: usize,
    pub window: f64,
    pub seed: u64,
}

/// Lifted angle of `B(t_i) w` over two laps of the grid.
fn lifted_angles(b: &(dyn Fn(f64) -> DMatrix<f64> + Sync), grid: usize, w: [f64; 2]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * grid);
    let mut prev = 0.0;
    for i in 0..2 * grid {
        let m = b((i % grid) as f64 / grid as f64);
        let v = [m[(0, 0)] * w[0] + m[(0, 1)] * w[1], m[(1, 0)] * w[0] + m[(1, 1)] * w[1]];
        let raw = v[1].atan2(v[0]).rem_euclid(PI);
        let angle = if i == 0 {
            raw
        } else {
            // nearest representative of raw + kπ to the previous value
            raw + ((prev - raw) / PI).round() * PI
        };
        out.push(angle);
        prev = angle;
    }
    out
}

pub fn epsilon_monotonicity_test(
    b: &(dyn Fn(f64) -> DMatrix<f64> + Sync),
    cfg: &MonotoneConfig,
) -> Result<MonotoneVerdict> {
    if !(cfg.epsilon > 0.0) {
        return Err(LabError::InvalidParameter("monotonicity threshold must be positive".into()));
    }
    if cfg.grid < 2 || cfg.directions == 0 || !(cfg.window > 0.0 && cfg.window <= 1.0) {
        return Err(LabError::InvalidParameter(
            "monotonicity needs grid ≥ 2, directions ≥ 1 and window in (0, 1]".into(),
        ));
    }
    let m = b(0.0);
    if m.nrows() != 2 || m.ncols() != 2 {
        return Err(LabError::DimensionMismatch {
            expected: 2,
            found: m.nrows(),
        });
    }
    let n = cfg.grid;
    let reach = ((cfg.window * n as f64).floor() as usize).clamp(1, n);
    let mut rng = seeding::rng(cfg.seed);
    let jitter: f64 = rng.random();
    let margin = (0..cfg.directions)
        .into_par_iter()
        .map(|k| {
            let a = PI * (k as f64 + jitter) / cfg.directions as f64;
            let phi = lifted_angles(b, n, [a.cos(), a.sin()]);
            let mut worst = f64::INFINITY;
            for i in 0..n {
                for d in 1..=reach {
                    let q = (phi[i + d] - phi[i]).abs() / (d as f64 / n as f64);
                    worst = worst.min(q);
                }
            }
            worst
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(MonotoneVerdict {
        epsilon: cfg.epsilon,
        margin,
        pass: margin > cfg.epsilon,
        grid: n,
        directions: cfg.directions,
        window: cfg.window,
        seed: cfg.seed,
    })
}
