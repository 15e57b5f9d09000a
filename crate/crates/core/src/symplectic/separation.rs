//! Separating subspaces by products of small transvections.
//!
//! Given complementary `V, W ⊂ ℝ^{2d}` with `k = dim(V ∩ W) > 0`, pick
//! `u₀ ∉ V₀ ∪ V₁` where `V₀ = V + W` and `V₁ = (V ∩ W)^{⊥ω}`. Some
//! `u ∈ V ∩ W` has `ω(u, u₀) ≠ 0`, so the transvection along `u₀` pushes `u`
//! off `W` while the new `V` still meets `W` only inside the old
//! intersection: the dimension drops by one. `k` steps separate the pair.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::{
    intersection_dim, symplectic_complement, Subspace, SymplecticForm, SymplecticMatrix,
    Transvection,
};
use crate::error::{LabError, Result};
use crate::seeding;

/// Rank tolerance for "the pair is separated".
pub const SEPARATION_TOL: f64 = 1e-8;

/// Angular rejection radius around `V₀ ∪ V₁` when sampling `u₀`.
const REJECTION_ANGLE: f64 = 1e-6;

/// Stricter tolerance used to confirm that a step really removed a dimension.
const CONFIRM_TOL: f64 = 1e-6;

/// Relative shrink of each factor's strength below its exact budget.
const STRENGTH_MARGIN: f64 = 1e-9;

const MAX_ATTEMPTS: usize = 200;
const MAX_RETRIES: usize = 24;

/// One transvection chosen by [`separate_pair`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationStep {
    pub transvection: Transvection,
    pub dim_before: usize,
    pub dim_after: usize,
    /// Number of sampled `u₀` (including rejected ones) for this step.
    pub attempts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationTrace {
    pub seed: u64,
    pub initial_dim: usize,
    /// Steps in application order: `σ = τ_k ⋯ τ_1`.
    pub steps: Vec<SeparationStep>,
}

impl SeparationTrace {
    /// Factors in left-to-right product order.
    pub fn factors(&self) -> Vec<Transvection> {
        self.steps
            .iter()
            .rev()
            .map(|s| s.transvection.clone())
            .collect()
    }
}

/// Result of [`separate_many`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManySeparation {
    pub sigma: SymplecticMatrix,
    /// All transvections, in left-to-right product order.
    pub factors: Vec<Transvection>,
    /// Relative smallest singular value of `[σV_j | W_j]` per pair.
    pub margins: Vec<f64>,
    /// Retries spent per pair.
    pub retries: Vec<usize>,
}

/// `σ_min / σ_max` of `[V | W]`; zero iff the pair intersects.
pub fn separation_margin(v: &Subspace, w: &Subspace) -> f64 {
    let n = v.ambient_dim();
    let mut m = DMatrix::zeros(n, v.dim() + w.dim());
    m.view_mut((0, 0), (n, v.dim())).copy_from(v.basis());
    m.view_mut((0, v.dim()), (n, w.dim())).copy_from(w.basis());
    let sv = m.svd(false, false).singular_values;
    let max = sv.max();
    if max == 0.0 {
        return 0.0;
    }
    sv.min() / max
}

fn check_pair(v: &Subspace, w: &Subspace) -> Result<SymplecticForm> {
    if v.ambient_dim() != w.ambient_dim() {
        return Err(LabError::DimensionMismatch {
            expected: v.ambient_dim(),
            found: w.ambient_dim(),
        });
    }
    let n = v.ambient_dim();
    if n == 0 || n % 2 != 0 || v.dim() + w.dim() != n {
        return Err(LabError::NonComplementary {
            dim_v: v.dim(),
            dim_w: w.dim(),
            ambient: n,
        });
    }
    Ok(SymplecticForm::new(n / 2))
}

fn unit_sample(rng: &mut impl Rng, n: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

/// Product of `k = dim(V ∩ W)` transvections with `σ(V) ∩ W = {0}`.
///
/// Each factor has `‖τ − I‖ = (1 + δ)^{1/k} − 1`, so every factor and the
/// whole product stay within `δ` of the identity.
pub fn separate_pair(
    v: &Subspace,
    w: &Subspace,
    delta: f64,
    seed: u64,
) -> Result<(SymplecticMatrix, SeparationTrace)> {
    let form = check_pair(v, w)?;
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(LabError::InvalidParameter(format!(
            "separation budget must be positive, got {delta}"
        )));
    }
    let n = form.dim();
    let k = intersection_dim(v, w, SEPARATION_TOL)?;
    let mut trace = SeparationTrace {
        seed,
        initial_dim: k,
        steps: Vec::with_capacity(k),
    };
    let mut sigma = SymplecticMatrix::identity(form.half_dim());
    if k == 0 {
        return Ok((sigma, trace));
    }
    // The margin keeps a measured ‖τ − I‖ below δ despite rounding.
    let strength = ((1.0 + delta).powf(1.0 / k as f64) - 1.0).min(delta) * (1.0 - STRENGTH_MARGIN);
    let mut rng = seeding::rng(seed);
    let mut current = v.clone();
    let mut dim = k;
    let mut attempts = 0usize;
    while dim > 0 {
        let inter = current.intersection(w, SEPARATION_TOL);
        let v0 = current.sum(w);
        let v1 = symplectic_complement(&inter, &form)?;
        let mut step_attempts = 0usize;
        let step = loop {
            attempts += 1;
            step_attempts += 1;
            if attempts > MAX_ATTEMPTS * k {
                return Err(LabError::SearchFailure { attempts, seed });
            }
            let u0 = unit_sample(&mut rng, n);
            if v0.angle_to(&u0) < REJECTION_ANGLE || v1.angle_to(&u0) < REJECTION_ANGLE {
                continue;
            }
            let tau = Transvection::new(&u0, strength)?;
            let candidate = &tau.matrix() * &sigma;
            let moved = v.transformed(&candidate);
            let after = intersection_dim(&moved, w, SEPARATION_TOL)?;
            let confirmed = intersection_dim(&moved, w, CONFIRM_TOL)?;
            if after + 1 == dim && confirmed + 1 == dim {
                sigma = candidate;
                current = moved;
                break SeparationStep {
                    transvection: tau,
                    dim_before: dim,
                    dim_after: after,
                    attempts: step_attempts,
                };
            }
        };
        dim = step.dim_after;
        trace.steps.push(step);
    }
    Ok((sigma, trace))
}

/// Budget of recursion level `ℓ`: the levels multiply to at most `1 + δ`.
fn level_budget(delta: f64, level: usize) -> f64 {
    (1.0 + delta).powf(0.5f64.powi(level as i32 + 1)) - 1.0
}

fn all_separated(sigma: &SymplecticMatrix, pairs: &[(Subspace, Subspace)]) -> Result<bool> {
    for (v, w) in pairs {
        if intersection_dim(&v.transformed(sigma), w, CONFIRM_TOL)? != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A single `σ` within `δ` of the identity separating every pair.
///
/// Pairs are handled in order. Pair `j` gets the budget of level `j` (halving
/// exponents, so the total stays below `δ`); if its transvections re-create an
/// intersection for an earlier pair, the strength is halved and the search
/// reseeded.
pub fn separate_many(
    pairs: &[(Subspace, Subspace)],
    delta: f64,
    seed: u64,
) -> Result<ManySeparation> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(LabError::InvalidParameter(format!(
            "separation budget must be positive, got {delta}"
        )));
    }
    let Some((first, _)) = pairs.first() else {
        return Err(LabError::DegenerateInput("no subspace pairs given".into()));
    };
    let mut form = None;
    for (v, w) in pairs {
        let f = check_pair(v, w)?;
        if f.dim() != first.ambient_dim() {
            return Err(LabError::DimensionMismatch {
                expected: first.ambient_dim(),
                found: f.dim(),
            });
        }
        form = Some(f);
    }
    let half_dim = form.map(|f| f.half_dim()).unwrap_or(1);
    let mut sigma = SymplecticMatrix::identity(half_dim);
    let mut factors = Vec::new();
    let mut retries = vec![0usize; pairs.len()];
    for (j, (v, w)) in pairs.iter().enumerate() {
        let moved = v.transformed(&sigma);
        if intersection_dim(&moved, w, SEPARATION_TOL)? == 0 {
            continue;
        }
        let mut budget = level_budget(delta, j);
        let mut accepted = None;
        for r in 0..MAX_RETRIES {
            let s = seeding::derive2(seed, j as u64, r as u64);
            match separate_pair(&moved, w, budget, s) {
                Ok((step_sigma, trace)) => {
                    let candidate = &step_sigma * &sigma;
                    if all_separated(&candidate, &pairs[..=j])? {
                        accepted = Some((candidate, trace));
                        retries[j] = r;
                        break;
                    }
                }
                Err(LabError::SearchFailure { .. }) => {}
                Err(e) => return Err(e),
            }
            budget *= 0.5;
        }
        let Some((candidate, trace)) = accepted else {
            return Err(LabError::MarginCollapse {
                pair: j,
                retries: MAX_RETRIES,
            });
        };
        sigma = candidate;
        let mut new_factors = trace.factors();
        new_factors.extend(factors);
        factors = new_factors;
    }
    let margins = pairs
        .iter()
        .map(|(v, w)| separation_margin(&v.transformed(&sigma), w))
        .collect();
    Ok(ManySeparation {
        sigma,
        factors,
        margins,
        retries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rank_oracle(v: &Subspace, w: &Subspace) -> usize {
        // independent check: plain SVD of the stacked bases
        let n = v.ambient_dim();
        let mut m = DMatrix::zeros(n, v.dim() + w.dim());
        m.view_mut((0, 0), (n, v.dim())).copy_from(v.basis());
        m.view_mut((0, v.dim()), (n, w.dim())).copy_from(w.basis());
        let sv = m.svd(false, false).singular_values;
        let max = sv.max();
        v.dim() + w.dim() - sv.iter().filter(|&&s| s > 1e-8 * max).count()
    }

    #[test]
    fn already_separated_gives_identity() {
        let v = Subspace::coordinate(4, &[0, 1]);
        let w = Subspace::coordinate(4, &[2, 3]);
        let (sigma, trace) = separate_pair(&v, &w, 0.05, 1).unwrap();
        assert_eq!(sigma, SymplecticMatrix::identity(2));
        assert!(trace.steps.is_empty());
    }

    #[test]
    fn single_overlap_in_r4() {
        let v = Subspace::coordinate(4, &[0, 1]);
        let w = Subspace::coordinate(4, &[0, 2]);
        let (sigma, trace) = separate_pair(&v, &w, 0.05, 3).unwrap();
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(rank_oracle(&v.transformed(&sigma), &w), 0);
        assert!(sigma.distance_to_identity() <= 0.05 + 1e-12);
    }

    #[test]
    fn full_overlap_needs_dim_steps() {
        let v = Subspace::coordinate(6, &[0, 1, 2]);
        let (sigma, trace) = separate_pair(&v, &v, 0.05, 11).unwrap();
        assert_eq!(trace.steps.len(), 3);
        assert_eq!(rank_oracle(&v.transformed(&sigma), &v), 0);
        for f in trace.factors() {
            assert!(f.matrix().distance_to_identity() <= 0.05);
        }
    }

    #[test]
    fn non_complementary_rejected() {
        let v = Subspace::coordinate(4, &[0]);
        let w = Subspace::coordinate(4, &[0, 1]);
        assert!(matches!(
            separate_pair(&v, &w, 0.05, 0),
            Err(LabError::NonComplementary { .. })
        ));
    }

    #[test]
    fn deterministic_in_seed() {
        let v = Subspace::coordinate(4, &[0, 1]);
        let w = Subspace::coordinate(4, &[1, 3]);
        let a = separate_pair(&v, &w, 0.05, 99).unwrap();
        let b = separate_pair(&v, &w, 0.05, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn many_pairs_in_r4() {
        let pairs = vec![
            (Subspace::coordinate(4, &[0, 1]), Subspace::coordinate(4, &[0, 2])),
            (Subspace::coordinate(4, &[1, 3]), Subspace::coordinate(4, &[3, 2])),
        ];
        let out = separate_many(&pairs, 0.1, 5).unwrap();
        for (v, w) in &pairs {
            assert_eq!(rank_oracle(&v.transformed(&out.sigma), w), 0);
        }
        assert!(out.sigma.distance_to_identity() <= 0.1);
        assert!((1..=2).contains(&out.factors.len()));
        let product = out
            .factors
            .iter()
            .fold(SymplecticMatrix::identity(2), |acc, t| &acc * &t.matrix());
        assert!((product.entries() - out.sigma.entries()).amax() < 1e-14);
    }

    #[test]
    fn many_pairs_mixed_dims_in_r6() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let mut pairs = Vec::new();
        for k in 1..=3usize {
            let common = DMatrix::from_fn(6, k, |_, _| rng.random::<f64>() - 0.5);
            let rest_v = DMatrix::from_fn(6, 3 - k, |_, _| rng.random::<f64>() - 0.5);
            let rest_w = DMatrix::from_fn(6, 3 - k, |_, _| rng.random::<f64>() - 0.5);
            let mut vb = common.clone().resize_horizontally(3, 0.0);
            vb.view_mut((0, k), (6, 3 - k)).copy_from(&rest_v);
            let mut wb = common.resize_horizontally(3, 0.0);
            wb.view_mut((0, k), (6, 3 - k)).copy_from(&rest_w);
            pairs.push((Subspace::span(&vb), Subspace::span(&wb)));
        }
        for (k, (v, w)) in pairs.iter().enumerate() {
            assert_eq!(rank_oracle(v, w), k + 1);
        }
        let out = separate_many(&pairs, 0.1, 8).unwrap();
        for (v, w) in &pairs {
            assert_eq!(rank_oracle(&v.transformed(&out.sigma), w), 0);
        }
        assert!(out.sigma.distance_to_identity() <= 0.1);
        assert!(out.margins.iter().all(|&m| m > 0.0));
    }

    #[test]
    fn level_budgets_multiply_below_total() {
        let delta = 0.05;
        let prod: f64 = (0..40).map(|l| 1.0 + level_budget(delta, l)).product();
        assert!(prod <= 1.0 + delta);
    }
}
