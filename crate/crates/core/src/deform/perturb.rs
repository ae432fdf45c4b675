use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::acs::{c0_distance, project_anticommuting, random_matrix, Acs};
use crate::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::linalg;
use crate::nijenhuis::{complex_rank, RankTol};

/// Step sizes `eps · 2^{−p}`, `p = 0..LADDER_STEPS`, tried along each direction.
pub const LADDER_STEPS: u32 = 11;

#[derive(Debug, Clone, Serialize)]
pub struct PerturbSuccess {
    #[serde(skip)]
    pub acs: Acs,
    pub distance: f64,
    pub rank: usize,
    /// 0-based index of the successful trial.
    pub trial: usize,
    pub step: f64,
}

/// Random search for a structure of rank `≥ k` within C⁰ distance `eps` of `J₀`.
///
/// Trial `i` draws a direction from the ChaCha stream `(seed, i)`, projects it
/// onto the matrices anti-commuting with `J₀`, normalizes it in spectral norm
/// and walks the step ladder. The lowest successful trial index wins, so the
/// result does not depend on how trials are scheduled across threads.
pub fn perturb_to_rank(
    g: &LieAlgebra,
    j0: &Acs,
    k: usize,
    eps: f64,
    trials: usize,
    seed: u64,
    tol: RankTol,
) -> Result<PerturbSuccess> {
    if !(eps > 0.0) {
        return Err(Error::validation("eps must be positive"));
    }
    if trials == 0 {
        return Err(Error::validation("trials must be >= 1"));
    }
    if g.dim() != j0.dim() {
        return Err(Error::validation("algebra and structure dimensions differ"));
    }
    let found = (0..trials)
        .into_par_iter()
        .map(|trial| run_trial(g, j0, k, eps, seed, trial, tol))
        .find_map_first(|r| match r {
            Ok(Some(s)) => Some(Ok(s)),
            Ok(None) => None,
            Err(e) => Some(Err(e)),
        });
    match found {
        Some(r) => r,
        None => Err(Error::Search(format!(
            "no structure of rank >= {k} within distance {eps:e} after {trials} trials \
             (evidence, not proof, that none exists)"
        ))),
    }
}

fn run_trial(
    g: &LieAlgebra,
    j0: &Acs,
    k: usize,
    eps: f64,
    seed: u64,
    trial: usize,
    tol: RankTol,
) -> Result<Option<PerturbSuccess>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let raw = random_matrix(j0.dim(), &mut rng);
    let dir = project_anticommuting(&raw, j0.matrix());
    let norm = linalg::spectral_norm(&dir);
    if !(norm > 0.0) {
        return Ok(None);
    }
    let dir = dir / norm;
    for p in 0..LADDER_STEPS {
        let step = eps * 0.5_f64.powi(p as i32);
        let j = match super::deform_matrix(j0, &(&dir * step)) {
            Ok(j) => j,
            Err(Error::Numerical(_)) => continue,
            Err(e) => return Err(e),
        };
        let distance = c0_distance(j0, &j)?;
        if distance > eps {
            continue;
        }
        let rank = complex_rank(g, &j, tol)?;
        if rank >= k {
            return Ok(Some(PerturbSuccess { acs: j, distance, rank, trial, step }));
        }
    }
    Ok(None)
}
