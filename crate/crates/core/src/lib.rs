//! Numerical toolkit for almost complex structures.
//!
//! * [`algebra`]: Lie algebras by structure constants, Chevalley–Eilenberg `d`.
//! * [`acs`]: structures `J` with `J² = −I`, adapted frames, C⁰ distance.
//! * [`nijenhuis`]: Nijenhuis tensors and their complex rank via `μ̄`.
//! * [`deform`]: small deformations, polynomial curves, rank profiles,
//!   Bernstein approximation and the perturbation search.
//! * [`patch`]: point-dependent structures on a coordinate box, with an
//!   expression parser and symbolic derivatives.
//! * [`invariants`]: `h¹_{d+d^c}` and `b₁` for invariant structures.
//! * [`cli`]: the `acstk` command-line front end and report emission.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acs;
pub mod algebra;
pub mod cli;
pub mod deform;
pub mod error;
pub mod invariants;
pub mod linalg;
pub mod nijenhuis;
pub mod patch;
pub mod report;

pub use acs::{adapted_frame, c0_distance, psi_from_l, random_acs, Acs, AdaptedFrame, AntiCommEndo};
pub use algebra::{catalog, ce_d, InvariantForm, LieAlgebra};
pub use deform::{
    bernstein_curve, curve_eval, deform, perturb_to_rank, rank_profile, recover_l,
    refine_exceptional, CurveL, RankProfile,
};
pub use error::{Error, Result};
pub use invariants::{b1, h1_ddc, InvariantReport};
pub use nijenhuis::{complex_rank, mu_bar_matrix, nijenhuis_invariant, MuBarMatrix, NijTensor, RankTol};
pub use patch::{diff_expr, min_rank_on_grid, nijenhuis_patch, parse_expr, Expr, PatchAcs};
