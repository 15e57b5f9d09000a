//! Small dense linear-algebra helpers shared by every module.
//!
//! All matrices are `nalgebra::DMatrix<f64>`; the dimensions involved here
//! are tiny (2d ≤ 8), so clarity wins over blocking or allocation tricks.

use nalgebra::{DMatrix, DVector};

/// Largest singular value.
pub fn op_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0_f64, |acc, &s| acc.max(s))
}

/// Smallest singular value (over `min(rows, cols)` values).
pub fn min_singular_value(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(f64::INFINITY, |acc, &s| acc.min(s))
}

/// The standard symplectic form `[[0, I_d], [-I_d, 0]]`.
pub fn standard_j(half_dim: usize) -> DMatrix<f64> {
    let n = 2 * half_dim;
    DMatrix::from_fn(n, n, |i, j| {
        if j == i + half_dim {
            1.0
        } else if i == j + half_dim {
            -1.0
        } else {
            0.0
        }
    })
}

/// `J v` without forming `J`.
pub fn apply_j(v: &DVector<f64>) -> DVector<f64> {
    let d = v.len() / 2;
    DVector::from_fn(v.len(), |i, _| if i < d { v[i + d] } else { -v[i - d] })
}

/// `J M` without forming `J`.
pub fn j_times(m: &DMatrix<f64>) -> DMatrix<f64> {
    let d = m.nrows() / 2;
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        if i < d {
            m[(i + d, j)]
        } else {
            -m[(i - d, j)]
        }
    })
}

/// Inverse of a symplectic matrix, `-J Aᵀ J`, assembled from transposed blocks.
///
/// Exact in floating point: only entries are moved and negated.
pub fn symplectic_inverse(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let d = n / 2;
    DMatrix::from_fn(n, n, |i, j| {
        // [[P, Q], [R, S]]^{-1} = [[Sᵀ, -Qᵀ], [-Rᵀ, Pᵀ]]
        match (i < d, j < d) {
            (true, true) => a[(j + d, i + d)],
            (true, false) => -a[(j - d, i + d)],
            (false, true) => -a[(j + d, i - d)],
            (false, false) => a[(j - d, i - d)],
        }
    })
}

/// Absolute drift `‖AᵀJA − J‖`.
pub fn symplectic_drift(a: &DMatrix<f64>) -> f64 {
    let d = a.nrows() / 2;
    let j = standard_j(d);
    op_norm(&(a.transpose() * j_times(a) - j))
}

/// Matrix exponential with closed forms for the common cases.
///
/// Nilpotent generators of order two (transvection generators) give `I + S`
/// exactly; 2×2 matrices use the Cayley–Hamilton closed form.
pub fn expm(s: &DMatrix<f64>) -> DMatrix<f64> {
    let n = s.nrows();
    let scale = s.amax();
    if scale == 0.0 {
        return DMatrix::identity(n, n);
    }
    let sq = s * s;
    if sq.amax() <= 1e-15 * scale * scale {
        return DMatrix::identity(n, n) + s;
    }
    if n == 2 {
        return expm2(s);
    }
    s.clone().exp()
}

fn expm2(s: &DMatrix<f64>) -> DMatrix<f64> {
    let half_trace = 0.5 * (s[(0, 0)] + s[(1, 1)]);
    let a = s[(0, 0)] - half_trace;
    let b = s[(0, 1)];
    let c = s[(1, 0)];
    // traceless part squares to delta * I
    let delta = a * a + b * c;
    let (ch, sh) = if delta > 0.0 {
        let r = delta.sqrt();
        (r.cosh(), r.sinh() / r)
    } else if delta < 0.0 {
        let r = (-delta).sqrt();
        (r.cos(), r.sin() / r)
    } else {
        (1.0, 1.0)
    };
    let e = half_trace.exp();
    DMatrix::from_row_slice(
        2,
        2,
        &[
            e * (ch + sh * a),
            e * sh * b,
            e * sh * c,
            e * (ch - sh * a),
        ],
    )
}

/// Orthonormal basis of the column space, rank decided at `tol · σ_max`.
pub fn column_space(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let rows = m.nrows();
    if m.ncols() == 0 || m.amax() == 0.0 {
        return DMatrix::zeros(rows, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > tol * smax)
        .collect();
    DMatrix::from_fn(rows, keep.len(), |i, j| u[(i, keep[j])])
}

/// Numerical rank at relative threshold `tol`.
pub fn rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 || m.amax() == 0.0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.max();
    sv.iter().filter(|&&s| s > tol * smax).count()
}

/// Orthonormal basis of the right null space `{x : M x = 0}`.
pub fn null_space(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let cols = m.ncols();
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    if m.nrows() == 0 || m.amax() == 0.0 {
        return DMatrix::identity(cols, cols);
    }
    // Pad with zero rows so the thin SVD returns a full set of right vectors.
    let padded = if m.nrows() < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.max();
    let null: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= tol * smax)
        .collect();
    DMatrix::from_fn(cols, null.len(), |i, j| v_t[(null[j], i)])
}

/// Thin QR of a frame: returns the orthonormal factor and `|R_ii|`.
pub fn qr_frame(frame: DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let k = frame.ncols();
    let qr = frame.qr();
    let r = qr.r();
    let diag = (0..k).map(|i| r[(i, i)].abs()).collect();
    (qr.q(), diag)
}

/// Spectral radius of a small real matrix.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 2 {
        let tr = m[(0, 0)] + m[(1, 1)];
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        let disc = tr * tr - 4.0 * det;
        return if disc >= 0.0 {
            let r = disc.sqrt();
            (0.5 * (tr + r)).abs().max((0.5 * (tr - r)).abs())
        } else {
            det.abs().sqrt()
        };
    }
    m.complex_eigenvalues()
        .iter()
        .fold(0.0_f64, |acc, z| acc.max(z.norm()))
}
