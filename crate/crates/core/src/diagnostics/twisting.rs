//! Weak twisting of homoclinic loop holonomies.
//!
//! At a sampled `t` with a nondegenerate Oseledets splitting, the loop
//! twists at order `j` when all four angles
//! `∡(H^{(j)}_t E^a_t, E^b_{h^j(t)})`, `a, b ∈ {u, s}`, exceed `ε_angle`.
//! The verdict is positive at the first `j` whose twisting fraction among
//! usable samples reaches the configured floor.

use rayon::prelude::*;
use serde::Serialize;

use super::Verdict;
use crate::base::FiberCoord;
use crate::cocycle::{oseledets_frame, restrict_to_leaf, FrameConfig, MeasureSampler, OseledetsFrame, SkewCocycle};
use crate::error::{LabError, Result};
use crate::holonomy::{iterate_loop, FiberBunchingCertificate, HomoclinicLoop};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwistingConfig {
    pub j_max: usize,
    pub samples: usize,
    pub epsilon_angle: f64,
    /// Fraction standing in for "positive measure".
    pub floor: f64,
    pub seed: u64,
    pub frame: FrameConfig,
}

impl Default for TwistingConfig {
    fn default() -> Self {
        Self {
            j_max: 3,
            samples: 64,
            epsilon_angle: 1e-2,
            floor: 0.05,
            seed: 0,
            frame: FrameConfig::default(),
        }
    }
}

/// Twisting statistics for one `j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwistingWindow {
    pub j: usize,
    pub fraction: f64,
    pub twisting: usize,
    pub usable: usize,
    /// Non-convergent samples, excluded from the fraction.
    pub excluded: usize,
    /// Samples with a degenerate splitting, counted as non-twisting.
    pub degenerate: usize,
    /// Largest of the per-sample minimum angles.
    pub best_angle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwistingVerdict {
    pub j: Option<usize>,
    pub fraction: f64,
    pub epsilon_angle: f64,
    pub floor: f64,
    pub samples: usize,
    pub seed: u64,
    pub verdict: Verdict,
    pub windows: Vec<TwistingWindow>,
    pub diagnostic: Option<String>,
}

/// Per-sample outcome at one `j`.
enum Sample {
    Excluded,
    Degenerate,
    Angle(f64),
}

fn frame_at(c: &SkewCocycle, lp: &HomoclinicLoop, t: FiberCoord, cfg: &FrameConfig) -> OseledetsFrame {
    let b = restrict_to_leaf(&c.field, &c.skew, &lp.leaf);
    oseledets_frame(&b, &t, cfg)
}

/// Minimum of the four loop angles at `t` for `j = 1..=j_max`.
fn sample_angles(
    c: &SkewCocycle,
    cert: &FiberBunchingCertificate,
    lp: &HomoclinicLoop,
    t: FiberCoord,
    cfg: &TwistingConfig,
) -> Result<Vec<Sample>> {
    let start = frame_at(c, lp, t, &cfg.frame);
    let mut out = Vec::with_capacity(cfg.j_max);
    for j in 1..=cfg.j_max {
        let (tj, h) = iterate_loop(c, cert, lp, t, j)?;
        let end = frame_at(c, lp, tj, &cfg.frame);
        if !start.converged || !end.converged {
            out.push(Sample::Excluded);
            continue;
        }
        if start.degenerate || end.degenerate {
            out.push(Sample::Degenerate);
            continue;
        }
        let pushed = [start.unstable.transformed(&h), start.stable.transformed(&h)];
        let targets = [&end.unstable, &end.stable];
        let angle = pushed
            .iter()
            .flat_map(|a| targets.iter().map(move |b| a.min_angle(b)))
            .fold(f64::INFINITY, f64::min);
        out.push(Sample::Angle(angle));
    }
    Ok(out)
}

pub fn weak_twisting_test(
    c: &SkewCocycle,
    cert: &FiberBunchingCertificate,
    lp: &HomoclinicLoop,
    sampler: &dyn MeasureSampler<FiberCoord>,
    cfg: &TwistingConfig,
) -> Result<TwistingVerdict> {
    if !(cfg.epsilon_angle > 0.0) {
        return Err(LabError::InvalidParameter(
            "twisting angle threshold must be positive".into(),
        ));
    }
    if cfg.j_max == 0 || cfg.samples == 0 {
        return Err(LabError::InvalidParameter(
            "twisting needs j_max ≥ 1 and at least one sample".into(),
        ));
    }
    let per_sample = (0..cfg.samples)
        .into_par_iter()
        .map(|k| {
            let t = sampler.sample(k, cfg.samples, cfg.seed);
            sample_angles(c, cert, lp, t, cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let windows: Vec<TwistingWindow> = (0..cfg.j_max)
        .map(|i| {
            let (mut twisting, mut usable, mut excluded, mut degenerate) = (0, 0, 0, 0);
            let mut best_angle: f64 = 0.0;
            for s in &per_sample {
                match s[i] {
                    Sample::Excluded => excluded += 1,
                    Sample::Degenerate => {
                        degenerate += 1;
                        usable += 1;
                    }
                    Sample::Angle(a) => {
                        usable += 1;
                        best_angle = best_angle.max(a);
                        if a > cfg.epsilon_angle {
                            twisting += 1;
                        }
                    }
                }
            }
            let fraction = if usable > 0 {
                twisting as f64 / usable as f64
            } else {
                0.0
            };
            TwistingWindow {
                j: i + 1,
                fraction,
                twisting,
                usable,
                excluded,
                degenerate,
                best_angle,
            }
        })
        .collect();
    let hit = windows.iter().find(|w| w.usable > 0 && w.fraction >= cfg.floor);
    let all_excluded = windows.iter().all(|w| w.usable == 0);
    let (verdict, j, fraction, diagnostic) = match hit {
        Some(w) => (Verdict::Positive, Some(w.j), w.fraction, None),
        None if all_excluded => (
            Verdict::Inconclusive,
            None,
            0.0,
            Some(format!(
                "all {} samples had non-convergent Oseledets frames; raise frame iterations",
                cfg.samples
            )),
        ),
        None => {
            let best = windows.iter().map(|w| w.fraction).fold(0.0, f64::max);
            (Verdict::Negative, None, best, None)
        }
    };
    Ok(TwistingVerdict {
        j,
        fraction,
        epsilon_angle: cfg.epsilon_angle,
        floor: cfg.floor,
        samples: cfg.samples,
        seed: cfg.seed,
        verdict,
        windows,
        diagnostic,
    })
}
