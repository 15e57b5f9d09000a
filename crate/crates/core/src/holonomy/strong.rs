//! Strong stable and unstable holonomies as telescoping limits.
//!
//! For `q` on the strong stable leaf of `p`,
//! `H^s_{p,q} = lim_n Aⁿ(q)⁻¹ Aⁿ(p)`, and for `q` on the strong unstable
//! leaf, `H^u_{p,q} = lim_n A⁻ⁿ(q)⁻¹ A⁻ⁿ(p)`. The partial products are
//! accumulated as a telescoping sum
//!
//! ```text
//! H_{n+1} = H_n + Aⁿ(q)⁻¹ A(qₙ)⁻¹ (A(pₙ) − A(qₙ)) Aⁿ(p)
//! ```
//!
//! so that each increment is formed from the small difference `A(pₙ) − A(qₙ)`
//! instead of by cancellation of two large products.

use nalgebra::DMatrix;
use serde::Serialize;

use super::bunching::FiberBunchingCertificate;
use crate::base::{
    leaf_offset, leaf_shift, Anchor, LeafKind, LeafPoint, SkewPoint, ON_LEAF_TOL,
};
use crate::cocycle::SkewCocycle;
use crate::error::{LabError, Result};
use crate::linalg::{op_norm, symplectic_inverse};
use crate::symplectic::{SymplecticMatrix, SYMPLECTIC_TOLERANCE};

/// Increment size below which the series is truncated.
pub const HOLONOMY_TRUNCATION: f64 = 1e-10;

/// Largest accepted `‖H_n − H_{n/2}‖`.
pub const HOLONOMY_RESIDUAL_TOL: f64 = 1e-8;

pub const HOLONOMY_MAX_ITERATES: usize = 400;

const MIN_STEPS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolonomyOperator {
    pub kind: LeafKind,
    pub p: SkewPoint,
    pub q: SkewPoint,
    /// Distance from `p` to `q` along the leaf.
    pub distance: f64,
    pub matrix: SymplecticMatrix,
    pub n_used: usize,
    /// `‖H_n − H_{n/2}‖`.
    pub residual: f64,
    /// Norms of the telescoping increments.
    pub trace: Vec<f64>,
    pub holder_constant: f64,
}

impl HolonomyOperator {
    /// `L · dist(p, q)^α`.
    pub fn holder_bound(&self, alpha: f64) -> f64 {
        self.holder_constant * self.distance.powf(alpha)
    }
}

fn check_certificate(c: &SkewCocycle, cert: &FiberBunchingCertificate) -> Result<()> {
    if !cert.pass {
        return Err(LabError::HolonomyRefused(format!(
            "fiber-bunching certificate failed (rate {:.4})",
            cert.theta_rate
        )));
    }
    if cert.alpha != c.field.alpha() || cert.nu != c.skew.nu() {
        return Err(LabError::HolonomyRefused(
            "certificate was issued for a different cocycle".into(),
        ));
    }
    Ok(())
}

/// Holonomy between two anchored points on one strong leaf.
pub fn leaf_holonomy(
    c: &SkewCocycle,
    cert: &FiberBunchingCertificate,
    p: &LeafPoint,
    q: &LeafPoint,
) -> Result<HolonomyOperator> {
    check_certificate(c, cert)?;
    if p.kind != q.kind || p.anchor != q.anchor {
        return Err(LabError::InvalidParameter(
            "holonomy endpoints must share an anchor and a leaf kind".into(),
        ));
    }
    let f = &c.skew;
    let kind = p.kind;
    let expected = p
        .t
        .shifted(leaf_shift(f, &p.anchor, kind, q.offset) - leaf_shift(f, &p.anchor, kind, p.offset));
    let miss = expected.distance(&q.t);
    if miss > ON_LEAF_TOL {
        return Err(LabError::NotOnLeaf {
            kind: kind.as_str(),
            detail: format!("fiber coordinate misses the strong leaf by {miss:.3e}"),
        });
    }
    telescope(c, cert, p, q)
}

/// Holonomy between `p` and `q`, where `q` must lie on the local strong
/// leaf of `p`.
pub fn strong_holonomy(
    c: &SkewCocycle,
    cert: &FiberBunchingCertificate,
    p: &SkewPoint,
    q: &SkewPoint,
    kind: LeafKind,
) -> Result<HolonomyOperator> {
    check_certificate(c, cert)?;
    let offset = leaf_offset(&c.skew, &p.x, &q.x, kind)?;
    let anchor = Anchor::Lattice(p.x);
    let a = LeafPoint::new(anchor.clone(), kind, 0.0, p.t);
    let b = LeafPoint::new(anchor, kind, offset, q.t);
    leaf_holonomy(c, cert, &a, &b)
}

fn telescope(
    c: &SkewCocycle,
    cert: &FiberBunchingCertificate,
    p: &LeafPoint,
    q: &LeafPoint,
) -> Result<HolonomyOperator> {
    let f = &c.skew;
    let g = f.base();
    let dim = c.field.dim();
    let mut h = DMatrix::<f64>::identity(dim, dim);
    let mut pn = DMatrix::<f64>::identity(dim, dim);
    let mut qinv = DMatrix::<f64>::identity(dim, dim);
    let mut history = vec![h.clone()];
    let mut trace = Vec::new();
    let (mut pp, mut qq) = (p.clone(), q.clone());
    for n in 1..=HOLONOMY_MAX_ITERATES {
        let inc = match p.kind {
            LeafKind::Stable => {
                let ap = c.field.matrix_at(&pp.point(g));
                let aq = c.field.matrix_at(&qq.point(g));
                let aq_inv = symplectic_inverse(&aq);
                let inc = &qinv * &aq_inv * (&ap - &aq) * &pn;
                pn = ap * pn;
                qinv *= aq_inv;
                pp = pp.forward(f);
                qq = qq.forward(f);
                inc
            }
            LeafKind::Unstable => {
                pp = pp.backward(f);
                qq = qq.backward(f);
                let ap = c.field.matrix_at(&pp.point(g));
                let aq = c.field.matrix_at(&qq.point(g));
                pn = symplectic_inverse(&ap) * pn;
                let inc = &qinv * (&aq - &ap) * &pn;
                qinv *= aq;
                inc
            }
        };
        if inc.iter().any(|x| !x.is_finite()) {
            return Err(LabError::NonFinite);
        }
        let size = op_norm(&inc);
        h += inc;
        trace.push(size);
        history.push(h.clone());
        if n >= MIN_STEPS && size < HOLONOMY_TRUNCATION {
            let residual = op_norm(&(&h - &history[n / 2]));
            if residual <= HOLONOMY_RESIDUAL_TOL {
                let mut m = SymplecticMatrix::with_tolerance(h, f64::INFINITY)?;
                if m.relative_drift() > SYMPLECTIC_TOLERANCE {
                    m = m.corrected();
                }
                let distance = (q.offset - p.offset).abs();
                return Ok(HolonomyOperator {
                    kind: p.kind,
                    p: p.point(g),
                    q: q.point(g),
                    distance,
                    matrix: m,
                    n_used: n,
                    residual,
                    trace,
                    holder_constant: cert.holder_constant,
                });
            }
        }
    }
    Err(LabError::HolonomyDivergence {
        n_max: HOLONOMY_MAX_ITERATES,
        last_increment: trace.last().copied().unwrap_or(f64::NAN),
        trace,
    })
}
