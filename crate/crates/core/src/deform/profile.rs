use rayon::prelude::*;
use serde::Serialize;

use super::curve::{curve_eval, CurveL};
use crate::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::nijenhuis::{mu_bar_matrix, RankTol};

/// Rank of `N_{J_t}` sampled on a uniform grid along a curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankProfile {
    pub points: Vec<ProfilePoint>,
    /// Grid parameters where `I + L(t)` was singular.
    pub skipped: Vec<f64>,
    /// Index `k` of the reported singular value `σ_k` (1-based).
    pub k: usize,
    pub generic_rank: usize,
    /// Maximal runs of consecutive grid points with rank below `generic_rank`.
    pub exceptional: Vec<(f64, f64)>,
    pub flagged: usize,
    /// `rank(t) ≥ max(rank(t_lo), rank(t_hi))` at every unflagged point.
    pub semicontinuity_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub t: f64,
    pub rank: usize,
    pub sigma_k: f64,
}

impl RankProfile {
    pub fn flagged_fraction(&self) -> f64 {
        if self.points.is_empty() {
            0.0
        } else {
            self.flagged as f64 / self.points.len() as f64
        }
    }
}

/// Uniform grid written about the midpoint, so symmetric intervals are
/// sampled symmetrically and hit `t = 0` exactly when `n` is odd.
pub(crate) fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let centre = 0.5 * (lo + hi);
    let radius = 0.5 * (hi - lo);
    let last = (n - 1) as i64;
    (0..n as i64)
        .map(|i| match i {
            0 => lo,
            i if i == last => hi,
            i => centre + radius * ((2 * i - last) as f64 / last as f64),
        })
        .collect()
}

/// Singular values of `G(t)`, or `None` where the curve cannot be evaluated.
fn sigma_at(g: &LieAlgebra, curve: &CurveL, t: f64) -> Result<Option<Vec<f64>>> {
    match curve_eval(curve, t) {
        Ok(j) => Ok(Some(mu_bar_matrix(g, &j)?.singular_values())),
        Err(Error::Numerical(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn sigma_k_of(s: &[f64], k: usize) -> f64 {
    s.get(k - 1).copied().unwrap_or(0.0)
}

/// Sample the complex rank on `grid_n` uniform points of the curve's domain.
pub fn rank_profile(
    g: &LieAlgebra,
    curve: &CurveL,
    grid_n: usize,
    tol: RankTol,
) -> Result<RankProfile> {
    if grid_n < 2 {
        return Err(Error::validation("grid must have at least 2 points"));
    }
    if g.dim() != curve.dim() {
        return Err(Error::validation("algebra and curve dimensions differ"));
    }
    let (lo, hi) = curve.domain();
    let grid = uniform_grid(lo, hi, grid_n);
    let sampled: Vec<(f64, Option<Vec<f64>>)> = grid
        .par_iter()
        .map(|&t| sigma_at(g, curve, t).map(|s| (t, s)))
        .collect::<Result<_>>()?;

    let mut skipped = Vec::new();
    let mut evaluated = Vec::with_capacity(sampled.len());
    for (t, s) in sampled {
        match s {
            Some(s) => evaluated.push((t, tol.rank(&s), s)),
            None => skipped.push(t),
        }
    }
    let generic_rank = evaluated.iter().map(|p| p.1).max().unwrap_or(0);
    let k = generic_rank.max(1);
    let points: Vec<ProfilePoint> = evaluated
        .iter()
        .map(|(t, rank, s)| ProfilePoint { t: *t, rank: *rank, sigma_k: sigma_k_of(s, k) })
        .collect();

    let mut exceptional = Vec::new();
    let mut run: Option<(f64, f64)> = None;
    let mut flagged = 0;
    for p in &points {
        if p.rank < generic_rank {
            flagged += 1;
            run = Some(run.map_or((p.t, p.t), |(a, _)| (a, p.t)));
        } else if let Some(r) = run.take() {
            exceptional.push(r);
        }
    }
    exceptional.extend(run);

    let endpoint_max = match (points.first(), points.last()) {
        (Some(a), Some(b)) => a.rank.max(b.rank),
        _ => 0,
    };
    let semicontinuity_ok = points
        .iter()
        .filter(|p| p.rank >= generic_rank)
        .all(|p| p.rank >= endpoint_max);

    Ok(RankProfile { points, skipped, k, generic_rank, exceptional, flagged, semicontinuity_ok })
}

/// Localized rank drops of `σ_k` inside an interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefineResult {
    pub intervals: Vec<(f64, f64)>,
    /// `σ_k` was below threshold on every evaluated grid point.
    pub identically_below: bool,
}

/// Locate the parameters where the rank drops below `k` inside `interval`.
///
/// Flagged runs of a `grid_n` point scan are bracketed by their grid
/// neighbours and shrunk by halving around the smallest of three quarter
/// points, `max_iter` times. Each returned interval has width at most
/// `(hi − lo) · 2^{−max_iter}` and contains a local minimum of `σ_k` at which
/// the rank is below `k`.
pub fn refine_exceptional(
    g: &LieAlgebra,
    curve: &CurveL,
    k: usize,
    interval: (f64, f64),
    max_iter: usize,
    grid_n: usize,
    tol: RankTol,
) -> Result<RefineResult> {
    let (lo, hi) = interval;
    if k == 0 {
        return Err(Error::validation("k must be >= 1"));
    }
    if !(lo < hi) || !curve.contains(lo) || !curve.contains(hi) {
        return Err(Error::validation(format!(
            "interval [{lo}, {hi}] must be non-empty and inside the curve domain"
        )));
    }
    if grid_n < 3 {
        return Err(Error::validation("refinement grid needs at least 3 points"));
    }
    if g.dim() != curve.dim() {
        return Err(Error::validation("algebra and curve dimensions differ"));
    }
    let grid = uniform_grid(lo, hi, grid_n);
    let h = (hi - lo) / (grid_n - 1) as f64;
    let sampled: Vec<Option<Vec<f64>>> = grid
        .par_iter()
        .map(|&t| sigma_at(g, curve, t))
        .collect::<Result<_>>()?;

    let below: Vec<Option<bool>> = sampled
        .iter()
        .map(|s| s.as_ref().map(|s| tol.rank(s) < k))
        .collect();
    let evaluated = below.iter().flatten().count();
    if evaluated > 0 && below.iter().flatten().all(|&b| b) {
        return Ok(RefineResult { intervals: vec![], identically_below: true });
    }

    let mut runs = Vec::new();
    let mut start = None;
    for (i, b) in below.iter().enumerate() {
        match (b, start) {
            (Some(true), None) => start = Some(i),
            (Some(true), Some(_)) => {}
            (_, Some(s)) => {
                runs.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s, grid_n - 1));
    }

    let objective = |t: f64| -> Result<f64> {
        Ok(match sigma_at(g, curve, t)? {
            Some(s) => sigma_k_of(&s, k),
            None => f64::INFINITY,
        })
    };

    let mut intervals = Vec::new();
    for (first, last) in runs {
        let mut a = (grid[first] - h).max(lo);
        let mut b = (grid[last] + h).min(hi);
        for _ in 0..max_iter {
            let w = b - a;
            let mid = 0.5 * (a + b);
            let q1 = a + 0.25 * w;
            let q3 = a + 0.75 * w;
            let (f1, fm, f3) = (objective(q1)?, objective(mid)?, objective(q3)?);
            if fm <= f1 && fm <= f3 {
                a = q1;
                b = q3;
            } else if f1 < f3 {
                b = mid;
            } else {
                a = mid;
            }
        }
        let centre = 0.5 * (a + b);
        if let Some(s) = sigma_at(g, curve, centre)? {
            if tol.rank(&s) < k {
                intervals.push((a, b));
            }
        }
    }
    Ok(RefineResult { intervals, identically_below: false })
}
