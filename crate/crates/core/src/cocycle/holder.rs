//! Sampled lower bounds for `‖A‖_α = sup ‖A‖ + sup ‖A(x) − A(y)‖ / d(x, y)^α`.
//!
//! Samples come from a seeded prefix stream: sample `i` and its close
//! companion depend only on `(seed, i)`, and the pair set grows with the
//! sample count, so more samples never give a smaller estimate.

use rand::Rng;
use serde::Serialize;

use super::field::CocycleField;
use crate::base::SkewPoint;
use crate::{linalg, seeding};

/// Pairs among the first this-many samples are all compared.
const ALL_PAIRS_PREFIX: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderEstimate {
    pub estimate: f64,
    pub sup_norm: f64,
    pub seminorm: f64,
    pub samples: usize,
    pub alpha: f64,
}

fn sample(seed: u64, i: usize) -> (SkewPoint, SkewPoint) {
    let mut rng = seeding::rng(seeding::derive(seed, i as u64));
    let x = SkewPoint::new(rng.random(), rng.random(), rng.random());
    let scale = 10f64.powi(-(1 + (i % 6) as i32));
    let dir: [f64; 3] = [rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5];
    let norm = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt().max(1e-12);
    let y = SkewPoint {
        x: x.x.shifted([scale * dir[0] / norm, scale * dir[1] / norm]),
        t: x.t.shifted(scale * dir[2] / norm),
    };
    (x, y)
}

pub fn holder_norm_estimate(field: &CocycleField, samples: usize, seed: u64) -> HolderEstimate {
    let samples = samples.max(2);
    let alpha = field.alpha();
    let pts: Vec<(SkewPoint, SkewPoint)> = (0..samples).map(|i| sample(seed, i)).collect();
    let mats: Vec<_> = pts.iter().map(|(x, _)| field.matrix_at(x)).collect();
    let mut sup: f64 = 0.0;
    let mut semi: f64 = 0.0;
    let quotient = |a: &nalgebra::DMatrix<f64>, b: &nalgebra::DMatrix<f64>, d: f64| {
        if d > 0.0 {
            linalg::op_norm(&(a - b)) / d.powf(alpha)
        } else {
            0.0
        }
    };
    for (i, (x, y)) in pts.iter().enumerate() {
        let ay = field.matrix_at(y);
        sup = sup.max(linalg::op_norm(&mats[i])).max(linalg::op_norm(&ay));
        semi = semi.max(quotient(&mats[i], &ay, x.distance(y)));
    }
    let prefix = samples.min(ALL_PAIRS_PREFIX);
    for i in 0..prefix {
        for j in 0..i {
            semi = semi.max(quotient(&mats[i], &mats[j], pts[i].0.distance(&pts[j].0)));
        }
    }
    HolderEstimate {
        estimate: sup + semi,
        sup_norm: sup,
        seminorm: semi,
        samples,
        alpha,
    }
}
