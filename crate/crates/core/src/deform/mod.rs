//! Small deformations `J_L = (I + L) J₀ (I + L)⁻¹` and their inverse,
//! polynomial curves of structures, rank profiles along curves, Bernstein
//! approximation of sampled curves and the seeded perturbation search.

mod bernstein;
mod curve;
mod perturb;
mod profile;

pub use bernstein::{bernstein_curve, BernsteinFit, SamplesDoc, SampleDoc};
pub use curve::{catalog_curve, curve_eval, CurveDoc, CurveL, CURVE_CATALOG_NAMES};
pub use perturb::{perturb_to_rank, PerturbSuccess, LADDER_STEPS};
pub use profile::{
    rank_profile, refine_exceptional, RankProfile, RefineResult, ProfilePoint,
};

use crate::acs::{Acs, AntiCommEndo};
use crate::error::{Error, Result};
use crate::linalg::{self, RMat};

/// Smallest admissible singular value of `I + L` and `I − J₀J₁`.
pub const SINGULAR_TOL: f64 = 1e-10;

/// `(I + L) J₀ (I + L)⁻¹`.
pub fn deform(j0: &Acs, l: &AntiCommEndo) -> Result<Acs> {
    let lm = if l.base() == j0 {
        l.matrix().clone()
    } else {
        AntiCommEndo::new(l.matrix().clone(), j0)?.into_matrix()
    };
    deform_matrix(j0, &lm)
}

/// Same as [`deform`] for a raw matrix already known to anti-commute with `J₀`.
pub(crate) fn deform_matrix(j0: &Acs, l: &RMat) -> Result<Acs> {
    let n = j0.dim();
    let a = RMat::identity(n, n) + l;
    let smin = linalg::min_singular_value(&a);
    if !(smin > SINGULAR_TOL) {
        return Err(Error::numerical(format!(
            "I + L is singular: smallest singular value {smin:.3e}"
        )));
    }
    let inv = a
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::numerical("I + L is not invertible"))?;
    let j = &a * j0.matrix() * inv;
    Acs::new(j).map_err(|e| Error::numerical(format!("deformed structure lost J^2 = -I: {e}")))
}

/// `L = (I − J₀J₁)⁻¹ (I + J₀J₁)`, the datum with `deform(J₀, L) = J₁`.
pub fn recover_l(j0: &Acs, j1: &Acs) -> Result<AntiCommEndo> {
    if j0.dim() != j1.dim() {
        return Err(Error::validation(format!(
            "dimension mismatch: {} vs {}",
            j0.dim(),
            j1.dim()
        )));
    }
    let n = j0.dim();
    let prod = j0.matrix() * j1.matrix();
    let a = RMat::identity(n, n) - &prod;
    let smin = linalg::min_singular_value(&a);
    if !(smin > SINGULAR_TOL) {
        return Err(Error::numerical(format!(
            "I - J0 J1 is singular (smallest singular value {smin:.3e}): \
             J0 J1 has eigenvalue 1, J1 lies outside the chart at J0"
        )));
    }
    let lu = a.lu();
    let l = lu
        .solve(&(RMat::identity(n, n) + prod))
        .ok_or_else(|| Error::numerical("I - J0 J1 is not invertible"))?;
    // Exact in exact arithmetic; removes rounding drift for ill-conditioned J₀.
    AntiCommEndo::new(crate::acs::project_anticommuting(&l, j0.matrix()), j0)
}
