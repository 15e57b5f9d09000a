//! The positivity pipeline: pinch a periodic leaf with the rotation block,
//! twist its homoclinic loops with localized transvections, and compare the
//! global top exponent before and after.
//!
//! When `A` is orthogonal along the leaf, every `R_θ A` is orthogonal too and
//! the leaf exponents vanish for all `θ`. In that case a leaf-dependent factor
//! `G(t) = exp(η cos(2πt) S_e)` with `S_e = P J P⁻¹`, `P = diag(κI, κ⁻¹I)`,
//! is inserted first; `G` is elliptic but not orthogonal.

use nalgebra::DMatrix;
use serde::Serialize;

use super::perturb::{rotate_perturbation, rotation_size, transvection_perturbation, Side};
use super::pinching::{weak_pinching_test, PinchingConfig, PinchingVerdict};
use super::twisting::{weak_twisting_test, TwistingConfig, TwistingVerdict};
use super::Verdict;
use crate::base::{find_homoclinic, FiberCoord, PeriodicLeaf, SkewPoint, SkewProduct, TrigPoly};
use crate::cocycle::{
    lyapunov_spectrum, oseledets_frame, restrict_to_leaf, sampler_by_name, CocycleField, Factor,
    LyapunovConfig, LyapunovReport, ScalarField, SkewCocycle,
};
use crate::error::{LabError, Result};
use crate::holonomy::{certify_fiber_bunching, loop_holonomy, FiberBunchingCertificate, HomoclinicLoop};
use crate::linalg::{expm, op_norm, standard_j};
use crate::seeding;
use crate::symplectic::{separate_many, Subspace};

const ORTHOGONAL_TOL: f64 = 1e-10;
const OBSTRUCTION_GRID: usize = 32;

/// `θ₀, θ₀/2, …` (`steps` values).
pub fn theta_schedule(start: f64, steps: usize) -> Vec<f64> {
    (0..steps).map(|k| start / (1u64 << k) as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchConfig {
    pub homoclinic_indices: Vec<usize>,
    pub pinching: PinchingConfig,
    pub twisting: TwistingConfig,
    pub global: LyapunovConfig,
    pub theta_schedule: Vec<f64>,
    pub generic_eta: f64,
    pub generic_kappa: f64,
    pub delta_total: f64,
    pub separation_delta: f64,
    pub bump_radius: f64,
    pub bunching_horizon: usize,
    pub bunching_grid: usize,
    pub sampler: String,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            homoclinic_indices: vec![0],
            pinching: PinchingConfig::default(),
            twisting: TwistingConfig::default(),
            global: LyapunovConfig::new(20_000, 64, 0),
            theta_schedule: theta_schedule(0.5, 6),
            generic_eta: 0.1,
            generic_kappa: 2.0,
            delta_total: 1.0,
            separation_delta: 0.05,
            bump_radius: 0.05,
            bunching_horizon: 20,
            bunching_grid: 4,
            sampler: "lebesgue".into(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationRecord {
    pub stage: String,
    pub kind: String,
    /// `sup ‖Â − A‖ / sup ‖A‖` bound.
    pub size: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchReport {
    pub before: LyapunovReport,
    pub after: LyapunovReport,
    pub initial_pinching: PinchingVerdict,
    pub final_pinching: PinchingVerdict,
    pub obstruction: bool,
    pub theta: Option<f64>,
    pub certificate: FiberBunchingCertificate,
    pub twisting_before: Vec<TwistingVerdict>,
    pub twisting_after: Vec<TwistingVerdict>,
    pub perturbations: Vec<PerturbationRecord>,
    pub budget_used: f64,
    pub budget: f64,
    pub final_positive: bool,
    pub log: Vec<String>,
    #[serde(skip)]
    pub field: CocycleField,
}

/// True when `A(gⁱp, t)` is orthogonal for every orbit point and sampled `t`.
pub fn unitary_obstruction(field: &CocycleField, skew: &SkewProduct, leaf: &PeriodicLeaf) -> bool {
    let b = restrict_to_leaf(field, skew, leaf);
    let n = field.dim();
    (0..OBSTRUCTION_GRID).all(|k| {
        let t = FiberCoord::new(k as f64 / OBSTRUCTION_GRID as f64);
        b.orbit_points(t).iter().all(|p| {
            let a = field.matrix_at(p);
            (&a * a.transpose() - DMatrix::identity(n, n)).amax() <= ORTHOGONAL_TOL
        })
    })
}

/// `exp(η cos(2πt) S_e)`.
pub fn generic_factor(half_dim: usize, eta: f64, kappa: f64) -> Factor {
    let n = 2 * half_dim;
    let p = DMatrix::from_fn(n, n, |i, j| match (i == j, i < half_dim) {
        (true, true) => kappa,
        (true, false) => 1.0 / kappa,
        _ => 0.0,
    });
    let p_inv = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 / p[(i, i)] } else { 0.0 });
    let s = &p * standard_j(half_dim) * p_inv * eta;
    Factor::Exp {
        generator: s,
        field: ScalarField::Trig {
            poly: TrigPoly::zero(3).with_cos(&[0, 0, 1], 1.0),
        },
    }
}

fn generic_size(half_dim: usize, eta: f64, kappa: f64) -> f64 {
    let Factor::Exp { generator, .. } = generic_factor(half_dim, eta, kappa) else {
        unreachable!()
    };
    let n = 2 * half_dim;
    let id = DMatrix::identity(n, n);
    op_norm(&(expm(&generator) - &id)).max(op_norm(&(expm(&(-generator)) - id)))
}

/// Insert the generic factor when the leaf is orthogonal.
pub fn prepare_rotation_base(
    field: &CocycleField,
    skew: &SkewProduct,
    leaf: &PeriodicLeaf,
    eta: f64,
    kappa: f64,
) -> Result<(CocycleField, Option<PerturbationRecord>)> {
    if !unitary_obstruction(field, skew, leaf) {
        return Ok((field.clone(), None));
    }
    let d = field.half_dim();
    let out = field.prepended(vec![generic_factor(d, eta, kappa)])?;
    Ok((
        out,
        Some(PerturbationRecord {
            stage: "pinching".into(),
            kind: "generic_factor".into(),
            size: generic_size(d, eta, kappa),
            detail: format!(
                "A is orthogonal along the leaf, so every rotation block keeps the leaf exponents at zero; \
                 inserted exp(η cos(2πt) S_e) with η = {eta}, κ = {kappa}"
            ),
        }),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub theta: f64,
    pub global: LyapunovReport,
    pub pinching: PinchingVerdict,
}

/// Leaf verdict and global spectrum of `R_θ A` for each `θ`.
pub fn rotation_sweep(
    c: &SkewCocycle,
    leaf: &PeriodicLeaf,
    thetas: &[f64],
    cfg: &SearchConfig,
) -> Result<(Option<PerturbationRecord>, Vec<SweepRow>)> {
    let (base, record) = prepare_rotation_base(&c.field, &c.skew, leaf, cfg.generic_eta, cfg.generic_kappa)?;
    let fiber_sampler = sampler_by_name::<FiberCoord>(&cfg.sampler)?;
    let point_sampler = sampler_by_name::<SkewPoint>(&cfg.sampler)?;
    let rows = thetas
        .iter()
        .map(|&theta| {
            let field = rotate_perturbation(&base, theta)?;
            let pinching = weak_pinching_test(&field, &c.skew, leaf, fiber_sampler.as_ref(), &cfg.pinching)?;
            let global = lyapunov_spectrum(
                &SkewCocycle::new(field, c.skew.clone()),
                point_sampler.as_ref(),
                &cfg.global,
            )?;
            Ok(SweepRow {
                theta,
                global,
                pinching,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((record, rows))
}

struct Ledger {
    records: Vec<PerturbationRecord>,
    used: f64,
    budget: f64,
}

impl Ledger {
    fn push(&mut self, r: PerturbationRecord) -> Result<()> {
        self.used += r.size;
        self.records.push(r);
        if self.used > self.budget {
            return Err(LabError::BudgetExceeded {
                used: self.used,
                budget: self.budget,
            });
        }
        Ok(())
    }
}

/// Fiber point with nondegenerate converged frames at `t` and `h(t)`.
fn twisting_target(
    c: &SkewCocycle,
    lp: &HomoclinicLoop,
    cfg: &TwistingConfig,
    sampler: &dyn crate::cocycle::MeasureSampler<FiberCoord>,
) -> Option<(FiberCoord, [Subspace; 4])> {
    let b = restrict_to_leaf(&c.field, &c.skew, &lp.leaf);
    (0..cfg.samples).find_map(|k| {
        let t = sampler.sample(k, cfg.samples, cfg.seed);
        let e0 = oseledets_frame(&b, &t, &cfg.frame);
        let e1 = oseledets_frame(&b, &lp.h(t), &cfg.frame);
        let ok = |e: &crate::cocycle::OseledetsFrame| e.converged && !e.degenerate;
        (ok(&e0) && ok(&e1)).then(|| (t, [e0.unstable, e0.stable, e1.unstable, e1.stable]))
    })
}

fn certify(c: &SkewCocycle, cfg: &SearchConfig, log: &mut Vec<String>) -> Result<FiberBunchingCertificate> {
    let cert = certify_fiber_bunching(c, cfg.bunching_horizon, cfg.bunching_grid)?;
    log.push(format!(
        "bunching: rate {:.4}, C3 {:.3}, pass {}",
        cert.theta_rate, cert.c3, cert.pass
    ));
    if !cert.pass {
        return Err(LabError::SearchFailed {
            stage: "bunching".into(),
            detail: format!("fiber-bunching rate {:.4} exceeds the limit", cert.theta_rate),
        });
    }
    Ok(cert)
}

pub fn positivity_search(c: &SkewCocycle, leaf: &PeriodicLeaf, cfg: &SearchConfig) -> Result<SearchReport> {
    let d = c.field.half_dim();
    let fiber_sampler = sampler_by_name::<FiberCoord>(&cfg.sampler)?;
    let point_sampler = sampler_by_name::<SkewPoint>(&cfg.sampler)?;
    let mut log = Vec::new();
    let mut ledger = Ledger {
        records: Vec::new(),
        used: 0.0,
        budget: cfg.delta_total,
    };
    let before = lyapunov_spectrum(c, point_sampler.as_ref(), &cfg.global)?;
    log.push(format!("global before: λ⁺ = {:.6} ± {:.2e}", before.top(), before.top_stderr()));

    // Stage 1: pinching.
    let pinch = |field: &CocycleField| weak_pinching_test(field, &c.skew, leaf, fiber_sampler.as_ref(), &cfg.pinching);
    let initial_pinching = pinch(&c.field)?;
    log.push(format!(
        "pinching: L = {:.6} ± {:.2e} ({})",
        initial_pinching.estimate,
        initial_pinching.error,
        initial_pinching.verdict.as_str()
    ));
    let mut field = c.field.clone();
    let mut theta = None;
    let mut obstruction = false;
    let mut final_pinching = initial_pinching.clone();
    if !initial_pinching.verdict.is_positive() {
        let attempt = |base: &CocycleField, log: &mut Vec<String>| -> Result<Option<(f64, CocycleField, PinchingVerdict)>> {
            for &th in &cfg.theta_schedule {
                let f = rotate_perturbation(base, th)?;
                let v = pinch(&f)?;
                log.push(format!("  θ = {th}: L = {:.6} ± {:.2e} ({})", v.estimate, v.error, v.verdict.as_str()));
                if v.verdict.is_positive() {
                    return Ok(Some((th, f, v)));
                }
            }
            Ok(None)
        };
        let mut found = attempt(&field, &mut log)?;
        if found.is_none() {
            let (g, record) = prepare_rotation_base(&field, &c.skew, leaf, cfg.generic_eta, cfg.generic_kappa)?;
            if let Some(r) = record {
                obstruction = true;
                log.push(format!("obstruction: {}", r.detail));
                ledger.push(r)?;
                field = g;
                let v0 = pinch(&field)?;
                log.push(format!("  generic factor alone: L = {:.6} ({})", v0.estimate, v0.verdict.as_str()));
                found = if v0.verdict.is_positive() {
                    Some((0.0, field.clone(), v0))
                } else {
                    attempt(&field, &mut log)?
                };
            }
        }
        let Some((th, f, v)) = found else {
            return Err(LabError::SearchFailed {
                stage: "pinching".into(),
                detail: format!(
                    "no rotation angle in {:?} produced a positive leaf exponent",
                    cfg.theta_schedule
                ),
            });
        };
        if th != 0.0 {
            ledger.push(PerturbationRecord {
                stage: "pinching".into(),
                kind: "rotation".into(),
                size: rotation_size(th),
                detail: format!("A_θ = R_θ A with θ = {th}"),
            })?;
            theta = Some(th);
        }
        field = f;
        final_pinching = v;
    } else {
        log.push("pinching: already positive, no rotation applied".into());
    }

    // Stage 2: twisting.
    let mut current = SkewCocycle::new(field, c.skew.clone());
    let mut certificate = certify(&current, cfg, &mut log)?;
    let g = c.skew.base();
    let mut indices = cfg.homoclinic_indices.clone();
    indices.dedup();
    indices.truncate(d.min(3));
    let mut twisting_before = Vec::new();
    let mut twisting_after = Vec::new();
    for (slot, &idx) in indices.iter().enumerate() {
        let z = find_homoclinic(g, leaf, idx)?;
        let lp = HomoclinicLoop::new(&c.skew, leaf.clone(), z);
        let v = weak_twisting_test(&current, &certificate, &lp, fiber_sampler.as_ref(), &cfg.twisting)?;
        log.push(format!(
            "twisting[{idx}]: fraction {:.3} ({})",
            v.fraction,
            v.verdict.as_str()
        ));
        let twisted = v.verdict.is_positive();
        twisting_before.push(v.clone());
        if twisted {
            twisting_after.push(v);
            continue;
        }
        let Some((t, [eu0, es0, eu1, es1])) = twisting_target(&current, &lp, &cfg.twisting, fiber_sampler.as_ref())
        else {
            return Err(LabError::SearchFailed {
                stage: "twisting".into(),
                detail: format!("homoclinic index {idx}: no sampled fiber point has a nondegenerate splitting"),
            });
        };
        let hol = loop_holonomy(&current, &certificate, &lp, t)?;
        let hs_inv = hol.stable.matrix.inverse();
        let mut pairs: Vec<(Subspace, Subspace)> = Vec::with_capacity(4);
        for a in [&eu0, &es0] {
            let pushed = a.transformed(&hol.unstable.matrix);
            for b in [&eu1, &es1] {
                pairs.push((pushed.clone(), b.transformed(&hs_inv)));
            }
        }
        let sep = separate_many(&pairs, cfg.separation_delta, seeding::derive2(cfg.seed, 7, slot as u64))?;
        let pert = transvection_perturbation(
            &current.field,
            &lp,
            g,
            &sep.factors,
            cfg.bump_radius,
            None,
            Side::Right,
        )?;
        log.push(format!(
            "twisting[{idx}]: {} transvections at t' = {:.4}, ‖σ − I‖ ≤ {:.4}, ‖Â − A‖_α ≤ {:.4}",
            sep.factors.len(),
            t.value(),
            pert.size,
            pert.holder_bound
        ));
        ledger.push(PerturbationRecord {
            stage: "twisting".into(),
            kind: "transvection".into(),
            size: pert.size,
            detail: format!(
                "homoclinic index {idx}, {} factors, bump radius {}, Hölder bound {:.4}",
                sep.factors.len(),
                cfg.bump_radius,
                pert.holder_bound
            ),
        })?;
        current = SkewCocycle::new(pert.field, c.skew.clone());
        certificate = certify(&current, cfg, &mut log)?;
        let after = weak_twisting_test(&current, &certificate, &lp, fiber_sampler.as_ref(), &cfg.twisting)?;
        log.push(format!(
            "twisting[{idx}] after: fraction {:.3} ({})",
            after.fraction,
            after.verdict.as_str()
        ));
        twisting_after.push(after);
    }
    if twisting_after.iter().any(|v| v.verdict != Verdict::Positive) {
        log.push("twisting: not every loop twists after perturbation".into());
    }

    // Stage 3: global exponent.
    let after = lyapunov_spectrum(&current, point_sampler.as_ref(), &cfg.global)?;
    let final_positive = after.top() > 3.0 * after.top_stderr();
    log.push(format!(
        "global after: λ⁺ = {:.6} ± {:.2e} ({})",
        after.top(),
        after.top_stderr(),
        if final_positive { "positive" } else { "not resolved" }
    ));
    Ok(SearchReport {
        before,
        after,
        initial_pinching,
        final_pinching,
        obstruction,
        theta,
        certificate,
        twisting_before,
        twisting_after,
        perturbations: ledger.records,
        budget_used: ledger.used,
        budget: ledger.budget,
        final_positive,
        log,
        field: current.field,
    })
}
