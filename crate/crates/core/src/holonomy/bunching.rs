//! Empirical fiber-bunching certificates.
//!
//! `LHS(n) = sup_x ‖Aⁿ(x)‖ ‖Aⁿ(x)⁻¹‖ ν^{nα}` is evaluated on a grid of
//! `M` for `n ≤ N` and fitted by `C₃ θⁿ` in the least-squares sense on
//! `log LHS`. The certificate passes when `θ ≤ 0.95` and `LHS` decreases
//! on `[N/2, N]`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::base::SkewPoint;
use crate::cocycle::{LinearCocycle, SkewCocycle};
use crate::error::{LabError, Result};
use crate::linalg::{op_norm, symplectic_inverse};

pub const MAX_BUNCHING_RATE: f64 = 0.95;

/// Allowance for evaluating `‖Aⁿ(q)⁻¹‖` and `‖Aⁿ(p)‖` at two nearby points
/// instead of one, in the Hölder constant bound.
const TWO_POINT_ALLOWANCE: f64 = 2.0;

/// Diameter of `𝕋² × S¹` in the quotient metric.
const DIAMETER: f64 = 0.866_025_403_784_438_6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiberBunchingCertificate {
    pub alpha: f64,
    pub nu: f64,
    pub n_max: usize,
    pub grid: usize,
    /// `LHS(n)` for `n = 1..=N`.
    pub lhs: Vec<f64>,
    pub theta_rate: f64,
    pub c3: f64,
    pub monotone: bool,
    pub pass: bool,
    /// Bound `L` in `‖H_{p,q} − I‖ ≤ L d(p, q)^α`.
    pub holder_constant: f64,
}

/// `‖m‖ ‖m⁻¹‖` for symplectic `m`.
fn condition(m: &DMatrix<f64>) -> f64 {
    op_norm(m) * op_norm(&symplectic_inverse(m))
}

fn fit_rate(lhs: &[f64]) -> (f64, f64) {
    let n = lhs.len() as f64;
    let xs: Vec<f64> = (1..=lhs.len()).map(|k| k as f64).collect();
    let ys: Vec<f64> = lhs.iter().map(|v| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let theta = slope.exp();
    let c3 = lhs
        .iter()
        .enumerate()
        .map(|(k, v)| v / theta.powi(k as i32 + 1))
        .fold(1.0f64, f64::max);
    (theta, c3)
}

pub fn certify_fiber_bunching(c: &SkewCocycle, n_max: usize, grid: usize) -> Result<FiberBunchingCertificate> {
    if n_max < 10 {
        return Err(LabError::InvalidParameter(format!(
            "bunching horizon must be at least 10, got {n_max}"
        )));
    }
    if grid == 0 {
        return Err(LabError::InvalidParameter("grid must be positive".into()));
    }
    let alpha = c.field.alpha();
    let nu = c.skew.nu();
    let dim = c.dim();
    let points: Vec<SkewPoint> = (0..grid * grid * grid)
        .map(|i| {
            let (a, b, k) = (i % grid, (i / grid) % grid, i / grid / grid);
            let u = |j: usize| (j as f64 + 0.5) / grid as f64;
            SkewPoint::new(u(a), u(b), u(k))
        })
        .collect();
    let per_point: Vec<Vec<f64>> = points
        .par_iter()
        .map(|x| {
            let mut p = DMatrix::identity(dim, dim);
            let mut y = *x;
            (1..=n_max)
                .map(|_| {
                    p = c.matrix(&y) * &p;
                    y = c.forward(&y);
                    condition(&p)
                })
                .collect()
        })
        .collect();
    let lhs: Vec<f64> = (0..n_max)
        .map(|k| {
            let sup = per_point.iter().map(|v| v[k]).fold(0.0f64, f64::max);
            sup * nu.powf((k + 1) as f64 * alpha)
        })
        .collect();
    if lhs.iter().any(|v| !v.is_finite()) {
        return Err(LabError::NonFinite);
    }
    let (theta_rate, c3) = fit_rate(&lhs);
    let monotone = (n_max / 2..n_max)
        .all(|n| lhs[n] <= lhs[n - 1] * (1.0 + 1e-12));
    let pass = theta_rate <= MAX_BUNCHING_RATE && monotone;
    let lip_theta = c.skew.theta().lipschitz_bound();
    let leaf_constant = 1.0 + lip_theta / (1.0 - nu);
    let sup = c.field.sup_norm_bound();
    let holder_a = c.field.lipschitz_bound() * DIAMETER.powf(1.0 - alpha);
    let holder_constant = if pass {
        TWO_POINT_ALLOWANCE * sup * holder_a * leaf_constant.powf(alpha) * c3 / (1.0 - theta_rate)
    } else {
        f64::INFINITY
    };
    Ok(FiberBunchingCertificate {
        alpha,
        nu,
        n_max,
        grid,
        lhs,
        theta_rate,
        c3,
        monotone,
        pass,
        holder_constant,
    })
}
