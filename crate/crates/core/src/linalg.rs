//! Small dense linear-algebra helpers shared by the geometric modules.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type RMat = DMatrix<f64>;
pub type CMat = DMatrix<Complex64>;

/// Default relative threshold for numerical rank.
pub const TOL_RANK_REL: f64 = 1e-8;
/// Default absolute threshold for numerical rank.
pub const TOL_RANK_ABS: f64 = 1e-12;

/// Singular values in non-increasing order.
pub fn singular_values(a: &RMat) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Singular values of a complex matrix in non-increasing order.
pub fn singular_values_c(a: &CMat) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

pub fn min_singular_value(a: &RMat) -> f64 {
    singular_values(a).last().copied().unwrap_or(0.0)
}

/// Operator 2-norm.
pub fn spectral_norm(a: &RMat) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

pub fn max_abs(a: &RMat) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

pub fn max_abs_c(a: &CMat) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.norm()))
}

/// Count of singular values above `max(tol_rel * s[0], tol_abs)`.
pub fn rank_from_singular_values(s: &[f64], tol_rel: f64, tol_abs: f64) -> usize {
    let Some(&top) = s.first() else { return 0 };
    let cut = (tol_rel * top).max(tol_abs);
    s.iter().filter(|&&x| x > cut).count()
}

pub fn numerical_rank(a: &RMat, tol_rel: f64, tol_abs: f64) -> usize {
    rank_from_singular_values(&singular_values(a), tol_rel, tol_abs)
}

pub fn numerical_rank_c(a: &CMat, tol_rel: f64, tol_abs: f64) -> usize {
    rank_from_singular_values(&singular_values_c(a), tol_rel, tol_abs)
}

pub fn complexify(a: &RMat) -> CMat {
    a.map(|x| Complex64::new(x, 0.0))
}

/// Strict pairs `(k, l)` with `k < l < n` in lexicographic order.
pub fn strict_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for k in 0..n {
        for l in k + 1..n {
            out.push((k, l));
        }
    }
    out
}

/// Position of the pair `(k, l)`, `k < l`, in [`strict_pairs`] order.
pub fn pair_index(n: usize, k: usize, l: usize) -> usize {
    debug_assert!(k < l && l < n);
    k * (2 * n - k - 1) / 2 + (l - k - 1)
}

pub fn identity(n: usize) -> RMat {
    RMat::identity(n, n)
}

/// Row-major nested vectors into a matrix; rows must have equal length.
pub fn from_rows(rows: &[Vec<f64>]) -> Option<RMat> {
    let n = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != c) {
        return None;
    }
    Some(RMat::from_fn(n, c, |i, j| rows[i][j]))
}

pub fn to_rows(a: &RMat) -> Vec<Vec<f64>> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)]).collect())
        .collect()
}

pub fn condition_number(a: &RMat) -> f64 {
    let s = singular_values(a);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}
