//! Point-dependent structures on a coordinate box.
//!
//! `J(x)` is a matrix of [`Expr`] entries; derivatives are taken
//! symbolically. With coordinate fields `X = ∂_i`, `Y = ∂_j` (which commute),
//! expanding `[JX, JY] − J[JX, Y] − J[X, JY] − [X, Y]` gives
//!
//! ```text
//! N^k_{ij} = J^l_i ∂_l J^k_j − J^l_j ∂_l J^k_i + J^k_l ∂_j J^l_i − J^k_l ∂_i J^l_j
//! ```
//!
//! where `J^a_b` is row `a`, column `b`.

mod expr;

pub use expr::{diff_expr, parse_expr, parse_expr_in, Expr};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::acs::{adapted_frame, Acs};
use crate::error::{Error, Result};
use crate::linalg::{self, RMat};
use crate::nijenhuis::{nijenhuis_frame_matrix, NijTensor, RankTol};

/// Bound on `‖J(x)² + I‖_max` at validation and scan points.
pub const PATCH_ACS_TOL: f64 = 1e-8;
const VALIDATION_PER_AXIS: usize = 3;

/// `{"dim": int, "entries": [["expr", ...], ...], "box": [[lo, hi], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchDoc {
    pub dim: i64,
    pub entries: Vec<Vec<String>>,
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
}

#[derive(Debug, Clone)]
pub struct PatchAcs {
    dim: usize,
    /// Row-major entries.
    entries: Vec<Expr>,
    /// `derivs[l][r * dim + c] = ∂_l J^r_c`.
    derivs: Vec<Vec<Expr>>,
    bounds: Vec<(f64, f64)>,
}

impl PatchAcs {
    pub fn new(dim: usize, entries: Vec<Expr>, bounds: Vec<(f64, f64)>) -> Result<Self> {
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::validation(format!("patch dimension must be even, got {dim}")));
        }
        if entries.len() != dim * dim {
            return Err(Error::validation("patch needs dim x dim entries"));
        }
        if bounds.len() != dim {
            return Err(Error::validation("box needs one [lo, hi] per coordinate"));
        }
        if let Some((i, _)) = bounds
            .iter()
            .enumerate()
            .find(|(_, (lo, hi))| !(lo.is_finite() && hi.is_finite() && lo <= hi))
        {
            return Err(Error::validation(format!("invalid box interval for x{}", i + 1)));
        }
        if let Some(v) = entries.iter().filter_map(Expr::max_var).max() {
            if v >= dim {
                return Err(Error::validation(format!("entry uses x{} beyond dimension {dim}", v + 1)));
            }
        }
        let derivs = (0..dim)
            .map(|l| entries.iter().map(|e| diff_expr(e, l)).collect())
            .collect();
        let patch = PatchAcs { dim, entries, derivs, bounds };
        patch.validate_grid(VALIDATION_PER_AXIS)?;
        Ok(patch)
    }

    pub fn from_doc(doc: &PatchDoc) -> Result<Self> {
        if doc.dim < 2 {
            return Err(Error::validation("patch dimension must be >= 2"));
        }
        let dim = doc.dim as usize;
        if doc.entries.len() != dim || doc.entries.iter().any(|r| r.len() != dim) {
            return Err(Error::validation("entries must be a dim x dim array"));
        }
        let entries = doc
            .entries
            .iter()
            .flatten()
            .map(|s| parse_expr_in(s, Some(dim)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, entries, doc.bounds.iter().map(|b| (b[0], b[1])).collect())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_doc(&serde_json::from_str(text)?)
    }

    /// Constant patch with the given matrix on a box.
    pub fn constant(j: &RMat, bounds: Vec<(f64, f64)>) -> Result<Self> {
        let n = j.nrows();
        Self::new(n, j.iter().copied().collect::<Vec<_>>().chunks(n).enumerate().fold(
            vec![Expr::num(0.0); n * n],
            |mut acc, (c, col)| {
                for (r, &v) in col.iter().enumerate() {
                    acc[r * n + c] = Expr::num(v);
                }
                acc
            },
        ), bounds)
    }

    pub fn to_doc(&self) -> PatchDoc {
        PatchDoc {
            dim: self.dim as i64,
            entries: self
                .entries
                .chunks(self.dim)
                .map(|row| row.iter().map(ToString::to_string).collect())
                .collect(),
            bounds: self.bounds.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn entry(&self, r: usize, c: usize) -> &Expr {
        &self.entries[r * self.dim + c]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim && x.iter().zip(&self.bounds).all(|(v, (lo, hi))| v >= lo && v <= hi)
    }

    fn eval_matrix(&self, exprs: &[Expr], x: &[f64]) -> Result<RMat> {
        let n = self.dim;
        let vals = exprs.iter().map(|e| e.eval(x)).collect::<Result<Vec<_>>>()?;
        Ok(RMat::from_row_slice(n, n, &vals))
    }

    /// `J(x)`; no box or `J² = −I` check.
    pub fn j_at(&self, x: &[f64]) -> Result<RMat> {
        self.eval_matrix(&self.entries, x)
    }

    /// `∂_l J(x)` for `l = 0..dim`.
    pub fn dj_at(&self, x: &[f64]) -> Result<Vec<RMat>> {
        self.derivs.iter().map(|d| self.eval_matrix(d, x)).collect()
    }

    /// `J(x)` checked against `J² = −I` at tolerance [`PATCH_ACS_TOL`].
    pub fn acs_at(&self, x: &[f64]) -> Result<Acs> {
        let j = self.j_at(x)?;
        let n = self.dim;
        let defect = linalg::max_abs(&(&j * &j + RMat::identity(n, n)));
        if !(defect <= PATCH_ACS_TOL) {
            return Err(Error::validation(format!(
                "J(x)^2 + I has max-norm {defect:.3e} at x = {x:?}"
            )));
        }
        Ok(Acs::new_unchecked(j))
    }

    /// Points of the uniform tensor grid, lexicographic in the index.
    pub fn grid_point(&self, per_axis: usize, mut index: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        for d in (0..self.dim).rev() {
            let i = index % per_axis;
            index /= per_axis;
            let (lo, hi) = self.bounds[d];
            x[d] = if per_axis == 1 { lo } else { lo + (hi - lo) * i as f64 / (per_axis - 1) as f64 };
        }
        x
    }

    pub fn grid_len(&self, per_axis: usize) -> Result<usize> {
        (0..self.dim)
            .try_fold(1usize, |acc, _| acc.checked_mul(per_axis))
            .ok_or_else(|| Error::validation("grid too large"))
    }

    fn validate_grid(&self, per_axis: usize) -> Result<()> {
        let n = self.grid_len(per_axis)?;
        (0..n).into_par_iter().try_for_each(|i| {
            let x = self.grid_point(per_axis, i);
            match self.acs_at(&x) {
                Ok(_) => Ok(()),
                Err(Error::Numerical(m)) => Err(Error::validation(m)),
                Err(e) => Err(e),
            }
        })
    }
}

fn tensor_from(dim: usize, f: impl Fn(usize, usize, usize) -> f64) -> NijTensor {
    let mut n = vec![0.0; dim * dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                n[(i * dim + j) * dim + k] = f(i, j, k);
            }
        }
    }
    NijTensor::from_components(dim, n)
}

fn coordinate_nijenhuis(j: &RMat, dj: &[RMat]) -> NijTensor {
    let d = j.nrows();
    tensor_from(d, |i, jj, k| {
        let mut acc = 0.0;
        for l in 0..d {
            acc += j[(l, i)] * dj[l][(k, jj)] - j[(l, jj)] * dj[l][(k, i)]
                + j[(k, l)] * dj[jj][(l, i)]
                - j[(k, l)] * dj[i][(l, jj)];
        }
        acc
    })
}

/// Nijenhuis tensor of the patch at `x`, from symbolic derivatives.
pub fn nijenhuis_patch(p: &PatchAcs, x: &[f64]) -> Result<NijTensor> {
    if !p.contains(x) {
        return Err(Error::validation(format!("point {x:?} outside the patch box")));
    }
    Ok(coordinate_nijenhuis(&p.j_at(x)?, &p.dj_at(x)?))
}

/// Same tensor with central differences of step `h` in place of symbolic derivatives.
pub fn nijenhuis_patch_fd(p: &PatchAcs, x: &[f64], h: f64) -> Result<NijTensor> {
    if !p.contains(x) {
        return Err(Error::validation(format!("point {x:?} outside the patch box")));
    }
    let dj = (0..p.dim)
        .map(|l| {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[l] += h;
            xm[l] -= h;
            Ok((p.j_at(&xp)? - p.j_at(&xm)?) / (2.0 * h))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(coordinate_nijenhuis(&p.j_at(x)?, &dj))
}

/// Lie bracket of vector fields given by expression components, at `x`.
fn field_bracket_at(a: &[Expr], b: &[Expr], x: &[f64]) -> Result<Vec<f64>> {
    let n = a.len();
    let av = a.iter().map(|e| e.eval(x)).collect::<Result<Vec<_>>>()?;
    let bv = b.iter().map(|e| e.eval(x)).collect::<Result<Vec<_>>>()?;
    let mut out = vec![0.0; n];
    for (k, o) in out.iter_mut().enumerate() {
        for l in 0..n {
            *o += av[l] * diff_expr(&b[k], l).eval(x)? - bv[l] * diff_expr(&a[k], l).eval(x)?;
        }
    }
    Ok(out)
}

fn apply_j_symbolic(p: &PatchAcs, v: &[Expr]) -> Vec<Expr> {
    let n = p.dim;
    (0..n)
        .map(|k| {
            (0..n).fold(Expr::num(0.0), |acc, l| {
                Expr::add(acc, Expr::mul(p.entry(k, l).clone(), v[l].clone()))
            })
        })
        .collect()
}

/// `N(X, Y)(x)` for arbitrary vector fields, computed directly from brackets
/// of the fields (no tensoriality assumed).
pub fn nijenhuis_fields(p: &PatchAcs, xf: &[Expr], yf: &[Expr], x: &[f64]) -> Result<Vec<f64>> {
    let n = p.dim;
    if xf.len() != n || yf.len() != n {
        return Err(Error::validation("vector fields must have dim components"));
    }
    let jx = apply_j_symbolic(p, xf);
    let jy = apply_j_symbolic(p, yf);
    let j = p.j_at(x)?;
    let t1 = field_bracket_at(&jx, &jy, x)?;
    let t2 = &j * nalgebra::DVector::from_vec(field_bracket_at(&jx, yf, x)?);
    let t3 = &j * nalgebra::DVector::from_vec(field_bracket_at(xf, &jy, x)?);
    let t4 = field_bracket_at(xf, yf, x)?;
    Ok((0..n).map(|k| t1[k] - t2[k] - t3[k] - t4[k]).collect())
}

/// Complex rank of `N_J` at a point: the rank of `G = M / 4` with
/// `M^j_{kl} = ω^j(N(v̄_k, v̄_l))` in the adapted frame of `J(x)`.
pub fn rank_at(p: &PatchAcs, x: &[f64], tol: RankTol) -> Result<usize> {
    let acs = p.acs_at(x)?;
    let frame = adapted_frame(&acs)?;
    let n = nijenhuis_patch(p, x)?;
    let g = nijenhuis_frame_matrix(&n, &frame) * num_complex::Complex64::new(0.25, 0.0);
    Ok(tol.rank(&linalg::singular_values_c(&g)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRank {
    pub k_min: usize,
    pub argmin: Vec<f64>,
    pub points: usize,
}

/// Minimum complex rank over a `per_axis^dim` grid of the box, with the
/// lexicographically first grid point attaining it.
pub fn min_rank_on_grid(p: &PatchAcs, per_axis: usize, tol: RankTol) -> Result<GridRank> {
    if per_axis < 2 {
        return Err(Error::validation("per_axis must be >= 2"));
    }
    let total = p.grid_len(per_axis)?;
    let (k_min, index) = (0..total)
        .into_par_iter()
        .map(|i| rank_at(p, &p.grid_point(per_axis, i), tol).map(|r| (r, i)))
        .try_reduce(|| (usize::MAX, usize::MAX), |a, b| Ok(a.min(b)))?;
    Ok(GridRank { k_min, argmin: p.grid_point(per_axis, index), points: total })
}
