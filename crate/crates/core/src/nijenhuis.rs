//! Nijenhuis tensor of an invariant structure and its complex rank.
//!
//! The rank is read off the matrix `G` of `μ̄ = π^{0,2} ∘ d` in an adapted
//! coframe: `μ̄ ω^j = Σ_{k<l} G^j_{kl} ω̄^k ∧ ω̄^l`, so
//! `G^j_{kl} = dω^j(v̄_k, v̄_l) = −ω^j([v̄_k, v̄_l])`.
//! Evaluating the Nijenhuis tensor on the same pairs gives
//! `ω^j(N(v̄_k, v̄_l)) = 4 G^j_{kl}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::acs::{adapted_frame, Acs, AdaptedFrame};
use crate::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::linalg::{self, strict_pairs, CMat, RMat};

/// Two-threshold numerical rank: `σ_i > max(rel · σ_1, abs)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankTol {
    pub rel: f64,
    pub abs: f64,
}

impl Default for RankTol {
    fn default() -> Self {
        RankTol { rel: linalg::TOL_RANK_REL, abs: linalg::TOL_RANK_ABS }
    }
}

impl RankTol {
    pub fn new(rel: f64, abs: f64) -> Result<Self> {
        if !(rel > 0.0 && abs > 0.0) {
            return Err(Error::validation("rank tolerances must be positive"));
        }
        Ok(RankTol { rel, abs })
    }

    pub fn rank(&self, singular_values: &[f64]) -> usize {
        linalg::rank_from_singular_values(singular_values, self.rel, self.abs)
    }
}

/// Components `N^k_{ij}`, stored as `n[(i * dim + j) * dim + k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NijTensor {
    dim: usize,
    n: Vec<f64>,
}

impl NijTensor {
    pub(crate) fn from_components(dim: usize, n: Vec<f64>) -> Self {
        debug_assert_eq!(n.len(), dim * dim * dim);
        NijTensor { dim, n }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `N^k_{ij}` (0-based).
    pub fn component(&self, i: usize, j: usize, k: usize) -> f64 {
        self.n[(i * self.dim + j) * self.dim + k]
    }

    /// `N(e_i, e_j)` as a vector.
    pub fn on_basis(&self, i: usize, j: usize) -> &[f64] {
        let start = (i * self.dim + j) * self.dim;
        &self.n[start..start + self.dim]
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d];
        for (i, &xi) in x.iter().enumerate().take(d) {
            for (j, &yj) in y.iter().enumerate().take(d) {
                let w = xi * yj;
                if w == 0.0 {
                    continue;
                }
                for (o, v) in out.iter_mut().zip(self.on_basis(i, j)) {
                    *o += w * v;
                }
            }
        }
        out
    }

    /// Complex-bilinear extension `N_ℂ`.
    pub fn eval_c(&self, x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
        let d = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        for (i, &xi) in x.iter().enumerate().take(d) {
            for (j, &yj) in y.iter().enumerate().take(d) {
                let w = xi * yj;
                for (o, v) in out.iter_mut().zip(self.on_basis(i, j)) {
                    *o += w * v;
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.n.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }
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

fn column(a: &RMat, c: usize) -> Vec<f64> {
    a.column(c).iter().copied().collect()
}

fn apply(a: &RMat, x: &[f64]) -> Vec<f64> {
    (0..a.nrows())
        .map(|r| (0..a.ncols()).map(|c| a[(r, c)] * x[c]).sum())
        .collect()
}

/// `N(X, Y) = [JX, JY] − J[JX, Y] − J[X, JY] − [X, Y]` on all basis pairs.
pub fn nijenhuis_invariant(g: &LieAlgebra, j: &Acs) -> Result<NijTensor> {
    check_dims(g, j)?;
    let d = g.dim();
    let jm = j.matrix();
    let mut n = vec![0.0; d * d * d];
    let unit = |i: usize| {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        v
    };
    for a in 0..d {
        let ja = column(jm, a);
        let ea = unit(a);
        for b in a + 1..d {
            let jb = column(jm, b);
            let eb = unit(b);
            let t1 = g.bracket_unchecked(&ja, &jb);
            let t2 = apply(jm, &g.bracket_unchecked(&ja, &eb));
            let t3 = apply(jm, &g.bracket_unchecked(&ea, &jb));
            let t4 = g.bracket_unchecked(&ea, &eb);
            for k in 0..d {
                let v = t1[k] - t2[k] - t3[k] - t4[k];
                n[(a * d + b) * d + k] = v;
                n[(b * d + a) * d + k] = -v;
            }
        }
    }
    Ok(NijTensor::from_components(d, n))
}

/// Matrix of `μ̄` in the adapted coframe: `m` rows, `m(m−1)/2` columns
/// indexed by pairs `k < l` in lexicographic order.
#[derive(Debug, Clone)]
pub struct MuBarMatrix {
    pub g: CMat,
    pub frame: AdaptedFrame,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrixDoc {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MuBarMatrix {
    pub fn singular_values(&self) -> Vec<f64> {
        linalg::singular_values_c(&self.g)
    }

    pub fn rank(&self, tol: RankTol) -> usize {
        tol.rank(&self.singular_values())
    }

    pub fn to_doc(&self) -> ComplexMatrixDoc {
        complex_matrix_doc(&self.g)
    }
}

pub fn complex_matrix_doc(a: &CMat) -> ComplexMatrixDoc {
    let rows = |f: fn(&Complex64) -> f64| {
        (0..a.nrows())
            .map(|r| (0..a.ncols()).map(|c| f(&a[(r, c)])).collect())
            .collect()
    };
    ComplexMatrixDoc { re: rows(|z| z.re), im: rows(|z| z.im) }
}

/// `G^j_{kl} = −ω^j([v̄_k, v̄_l])`.
pub fn mu_bar_matrix(g: &LieAlgebra, j: &Acs) -> Result<MuBarMatrix> {
    check_dims(g, j)?;
    let frame = adapted_frame(j)?;
    let m = frame.m();
    let vbar = frame.v_bar();
    let cols: Vec<Vec<Complex64>> = (0..m).map(|c| vbar.column(c).iter().copied().collect()).collect();
    let pairs = strict_pairs(m);
    let mut out = CMat::zeros(m, pairs.len());
    for (p, &(k, l)) in pairs.iter().enumerate() {
        let w = g.bracket_c_unchecked(&cols[k], &cols[l]);
        for r in 0..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, wi) in w.iter().enumerate() {
                acc += frame.omega[(r, i)] * wi;
            }
            out[(r, p)] = -acc;
        }
    }
    Ok(MuBarMatrix { g: out, frame })
}

/// `M^j_{kl} = ω^j(N_ℂ(v̄_k, v̄_l))` for a given tensor and frame.
pub fn nijenhuis_frame_matrix(n: &NijTensor, frame: &AdaptedFrame) -> CMat {
    let m = frame.m();
    let vbar = frame.v_bar();
    let cols: Vec<Vec<Complex64>> = (0..m).map(|c| vbar.column(c).iter().copied().collect()).collect();
    let pairs = strict_pairs(m);
    let mut out = CMat::zeros(m, pairs.len());
    for (p, &(k, l)) in pairs.iter().enumerate() {
        let w = n.eval_c(&cols[k], &cols[l]);
        for r in 0..m {
            out[(r, p)] = (0..w.len()).map(|i| frame.omega[(r, i)] * w[i]).sum();
        }
    }
    out
}

/// Complex rank of `N_J`, computed as the numerical rank of `G`.
pub fn complex_rank(g: &LieAlgebra, j: &Acs, tol: RankTol) -> Result<usize> {
    Ok(mu_bar_matrix(g, j)?.rank(tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acs::{catalog_acs, random_acs};
    use crate::algebra::catalog;

    fn e(d: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        v
    }

    #[test]
    fn abelian_is_integrable() {
        let g = catalog("abelian6").unwrap();
        for seed in 0..5 {
            let j = random_acs(6, seed, false).unwrap();
            assert_eq!(nijenhuis_invariant(&g, &j).unwrap().max_abs(), 0.0);
            assert_eq!(complex_rank(&g, &j, RankTol::default()).unwrap(), 0);
            assert!(linalg::max_abs_c(&mu_bar_matrix(&g, &j).unwrap().g) == 0.0);
        }
    }

    #[test]
    fn heisenberg_ja_is_integrable() {
        let g = catalog("heis3xR3").unwrap();
        let n = nijenhuis_invariant(&g, &catalog_acs("ja").unwrap()).unwrap();
        assert_eq!(n.max_abs(), 0.0);
    }

    #[test]
    fn heisenberg_jb_tensor() {
        let g = catalog("heis3xR3").unwrap();
        let n = nijenhuis_invariant(&g, &catalog_acs("jb").unwrap()).unwrap();
        assert_eq!(n.on_basis(0, 1), &[0., 0., -1., 0., 0., 0.][..]);
        assert_eq!(n.on_basis(1, 0), &[0., 0., 1., 0., 0., 0.][..]);
        assert_eq!(n.on_basis(2, 3), &[0., 0., 1., 0., 0., 0.][..]);
        // Pairs involving e5 or e6 lie outside the support.
        for a in 0..6 {
            for b in 4..6 {
                assert!(n.on_basis(a, b).iter().all(|&x| x == 0.0));
            }
        }
        let rank = complex_rank(&g, &catalog_acs("jb").unwrap(), RankTol::default()).unwrap();
        assert_eq!(rank, 1);
        assert_eq!(complex_rank(&g, &catalog_acs("ja").unwrap(), RankTol::default()).unwrap(), 0);
    }

    #[test]
    fn heisenberg_jb_mu_bar_has_one_entry() {
        let g = catalog("heis3xR3").unwrap();
        let mu = mu_bar_matrix(&g, &catalog_acs("jb").unwrap()).unwrap();
        assert_eq!((mu.g.nrows(), mu.g.ncols()), (3, 3));
        let nonzero = mu.g.iter().filter(|z| z.norm() > 1e-14).count();
        assert_eq!(nonzero, 1);
    }

    #[test]
    fn shape_in_dimension_four() {
        let g = catalog("abelian4").unwrap();
        let mu = mu_bar_matrix(&g, &Acs::standard(4).unwrap()).unwrap();
        assert_eq!((mu.g.nrows(), mu.g.ncols()), (2, 1));
    }

    #[test]
    fn dimension_mismatch() {
        let g = catalog("abelian4").unwrap();
        assert!(nijenhuis_invariant(&g, &Acs::standard(6).unwrap()).is_err());
        assert!(complex_rank(&g, &Acs::standard(6).unwrap(), RankTol::default()).is_err());
    }

    #[test]
    fn contraction_identity_on_basis() {
        let g = catalog("free2step3gen").unwrap();
        let j = random_acs(6, 11, false).unwrap();
        let n = nijenhuis_invariant(&g, &j).unwrap();
        for a in 0..6 {
            for b in 0..6 {
                let ja = column(j.matrix(), a);
                let jb = column(j.matrix(), b);
                let lhs = n.eval(&ja, &jb);
                let rhs = n.eval(&e(6, a), &e(6, b));
                let scale = 1.0 + lhs.iter().chain(&rhs).fold(0.0_f64, |m, x| m.max(x.abs()));
                for k in 0..6 {
                    assert!((lhs[k] + rhs[k]).abs() < 1e-10 * scale);
                }
            }
        }
    }

    #[test]
    fn tolerances_must_be_positive() {
        assert!(RankTol::new(0.0, 1e-12).is_err());
        assert!(RankTol::new(1e-8, 1e-12).is_ok());
    }
}
