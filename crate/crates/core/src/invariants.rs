//! `h¹_{d+d^c}` and `b₁` at the level of invariant forms.
//!
//! Forms are acted on by pullback along `J⁻¹`: `(Jα)(X) = α(J⁻¹X)` on
//! 1-forms and `(Jβ)(X, Y) = β(J⁻¹X, J⁻¹Y)` on 2-forms, and
//! `d^c = J⁻¹ d J`. Under this action `Jα = −iα` on (1,0)-forms, so the two
//! computations below agree identically; the cross-check guards the code.

use serde::Serialize;

use crate::acs::{adapted_frame, Acs};
use crate::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::linalg::{self, strict_pairs, RMat};
use crate::nijenhuis::{complex_rank, RankTol};

/// Invariant-level report. For non-nilpotent algebras `b1` is the algebra
/// cohomology, not necessarily a Betti number of a compact quotient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub b1: usize,
    pub h1_ddc: usize,
    /// `2 · dim_ℂ(ker d ∩ A^{1,0})`.
    pub method_a: usize,
    /// `dim_ℂ(A¹ ∩ ker d ∩ ker d^c)`.
    pub method_b: usize,
    pub rank: usize,
}

fn check_dims(g: &LieAlgebra, j: &Acs) -> Result<()> {
    if g.dim() != j.dim() {
        return Err(Error::validation(format!(
            "algebra has dimension {} but structure has dimension {}",
            g.dim(),
            j.dim()
        )));
    }
    Ok(())
}

/// `dim ker d` on invariant real 1-forms.
pub fn b1(g: &LieAlgebra) -> usize {
    let tol = RankTol::default();
    g.dim() - tol.rank(&linalg::singular_values(&g.d_matrix()))
}

/// Action of `J` on 1-form coefficient vectors: `a ↦ J⁻ᵀ a`.
fn j_on_one_forms(j: &Acs) -> RMat {
    j.inverse().transpose()
}

/// Action of `J⁻¹` on 2-form coefficients: `(J⁻¹β)(e_i, e_j) = β(Je_i, Je_j)`.
fn j_inv_on_two_forms(j: &Acs) -> RMat {
    let n = j.dim();
    let jm = j.matrix();
    let pairs = strict_pairs(n);
    RMat::from_fn(pairs.len(), pairs.len(), |row, col| {
        let (i, jj) = pairs[row];
        let (a, b) = pairs[col];
        jm[(a, i)] * jm[(b, jj)] - jm[(b, i)] * jm[(a, jj)]
    })
}

/// Matrix of `d^c = J⁻¹ d J` on 1-forms.
pub fn dc_matrix(g: &LieAlgebra, j: &Acs) -> Result<RMat> {
    check_dims(g, j)?;
    Ok(j_inv_on_two_forms(j) * g.d_matrix() * j_on_one_forms(j))
}

pub fn h1_ddc(g: &LieAlgebra, j: &Acs) -> Result<InvariantReport> {
    check_dims(g, j)?;
    let tol = RankTol::default();
    let m = j.m();
    let d = g.d_matrix();

    let frame = adapted_frame(j)?;
    let d_a = linalg::complexify(&d) * frame.omega.transpose();
    let method_a = 2 * (m - tol.rank(&linalg::singular_values_c(&d_a)));

    let dc = dc_matrix(g, j)?;
    let stacked = RMat::from_fn(2 * d.nrows(), d.ncols(), |r, c| {
        if r < d.nrows() { d[(r, c)] } else { dc[(r - d.nrows(), c)] }
    });
    let method_b = g.dim() - tol.rank(&linalg::singular_values(&stacked));

    if method_a != method_b {
        return Err(Error::numerical(format!(
            "h1 computations disagree: method A = {method_a}, method B = {method_b}"
        )));
    }
    Ok(InvariantReport { b1: b1(g), h1_ddc: method_a, method_a, method_b, rank: complex_rank(g, j, tol)? })
}
