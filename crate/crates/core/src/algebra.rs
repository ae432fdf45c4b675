//! Real Lie algebras given by structure constants, with the
//! Chevalley–Eilenberg differential on invariant 1-forms.
//!
//! Convention: `[e_i, e_j] = Σ_k c^k_{ij} e_k` and, for a 1-form `α`,
//! `dα(X, Y) = −α([X, Y])`. Degree-2 forms are stored on the strict upper
//! triangle `i < j` in lexicographic order.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{pair_index, strict_pairs};

/// Absolute Jacobi tolerance for user-supplied constants.
pub const JACOBI_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    name: String,
    dim: usize,
    /// Dense constants, `c[(i * dim + j) * dim + k] = c^k_{ij}`.
    consts: Vec<f64>,
    /// Nonzero constants with `i < j`, used by the bracket engine.
    terms: Vec<(usize, usize, usize, f64)>,
}

/// On-disk form: `{"name", "dim", "brackets": [{"i","j","k","c"}]}`, 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraDoc {
    #[serde(default)]
    pub name: String,
    pub dim: i64,
    #[serde(default)]
    pub brackets: Vec<BracketEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BracketEntry {
    pub i: i64,
    pub j: i64,
    pub k: i64,
    pub c: f64,
}

/// Worst Jacobi residual found, with its (0-based) quadruple `(i, j, k, s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiDefect {
    pub residual: f64,
    pub at: (usize, usize, usize, usize),
}

impl LieAlgebra {
    /// Validate a parsed document and close it under antisymmetry.
    pub fn from_doc(doc: &AlgebraDoc) -> Result<Self> {
        if doc.dim < 2 || doc.dim % 2 != 0 {
            return Err(Error::validation(format!(
                "algebra dimension must be even and >= 2, got {}",
                doc.dim
            )));
        }
        let dim = doc.dim as usize;
        let mut consts = vec![0.0; dim * dim * dim];
        let mut seen = vec![false; dim * dim * dim];
        for (n, e) in doc.brackets.iter().enumerate() {
            for (label, v) in [("i", e.i), ("j", e.j), ("k", e.k)] {
                if v < 1 || v > doc.dim {
                    return Err(Error::validation(format!(
                        "bracket entry {n}: index {label} = {v} out of range 1..={dim}"
                    )));
                }
            }
            if e.i >= e.j {
                return Err(Error::validation(format!(
                    "bracket entry {n}: requires i < j, got i = {}, j = {}",
                    e.i, e.j
                )));
            }
            if !e.c.is_finite() {
                return Err(Error::validation(format!("bracket entry {n}: non-finite constant")));
            }
            let (i, j, k) = ((e.i - 1) as usize, (e.j - 1) as usize, (e.k - 1) as usize);
            let idx = (i * dim + j) * dim + k;
            if seen[idx] {
                return Err(Error::validation(format!(
                    "bracket entry {n}: duplicate constant for [e{}, e{}] -> e{}",
                    e.i, e.j, e.k
                )));
            }
            seen[idx] = true;
            consts[idx] = e.c;
            consts[(j * dim + i) * dim + k] = -e.c;
        }
        let g = Self::from_dense(doc.name.clone(), dim, consts);
        if let Some(defect) = g.jacobi_defect() {
            if defect.residual > JACOBI_TOL {
                let (i, j, k, s) = defect.at;
                return Err(Error::validation(format!(
                    "Jacobi identity violated: residual {:.3e} at (e{}, e{}, e{}) component e{}",
                    defect.residual,
                    i + 1,
                    j + 1,
                    k + 1,
                    s + 1
                )));
            }
        }
        Ok(g)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: AlgebraDoc = serde_json::from_str(text)?;
        Self::from_doc(&doc)
    }

    fn from_dense(name: String, dim: usize, consts: Vec<f64>) -> Self {
        let mut terms = Vec::new();
        for i in 0..dim {
            for j in i + 1..dim {
                for k in 0..dim {
                    let c = consts[(i * dim + j) * dim + k];
                    if c != 0.0 {
                        terms.push((i, j, k, c));
                    }
                }
            }
        }
        LieAlgebra { name, dim, consts, terms }
    }

    /// Sparse document form; `from_doc(&g.to_doc())` reproduces `g`.
    pub fn to_doc(&self) -> AlgebraDoc {
        AlgebraDoc {
            name: self.name.clone(),
            dim: self.dim as i64,
            brackets: self
                .terms
                .iter()
                .map(|&(i, j, k, c)| BracketEntry {
                    i: i as i64 + 1,
                    j: j as i64 + 1,
                    k: k as i64 + 1,
                    c,
                })
                .collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Half the dimension.
    pub fn m(&self) -> usize {
        self.dim / 2
    }

    /// `c^k_{ij}`, 0-based.
    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        self.consts[(i * self.dim + j) * self.dim + k]
    }

    pub fn is_abelian(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest Jacobi residual over all triples, or `None` in dimension < 3.
    pub fn jacobi_defect(&self) -> Option<JacobiDefect> {
        let n = self.dim;
        let mut worst: Option<JacobiDefect> = None;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    for s in 0..n {
                        let mut sum = 0.0;
                        for l in 0..n {
                            sum += self.c(i, j, l) * self.c(l, k, s)
                                + self.c(j, k, l) * self.c(l, i, s)
                                + self.c(k, i, l) * self.c(l, j, s);
                        }
                        let r = sum.abs();
                        if worst.is_none_or(|w| r > w.residual) {
                            worst = Some(JacobiDefect { residual: r, at: (i, j, k, s) });
                        }
                    }
                }
            }
        }
        worst
    }

    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len())?;
        self.check_len(y.len())?;
        Ok(self.bracket_unchecked(x, y))
    }

    pub(crate) fn bracket_unchecked(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for &(i, j, k, c) in &self.terms {
            out[k] += c * (x[i] * y[j] - x[j] * y[i]);
        }
        out
    }

    /// Complex-bilinear extension of the bracket.
    pub fn bracket_c(&self, x: &[Complex64], y: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(x.len())?;
        self.check_len(y.len())?;
        Ok(self.bracket_c_unchecked(x, y))
    }

    pub(crate) fn bracket_c_unchecked(&self, x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for &(i, j, k, c) in &self.terms {
            out[k] += (x[i] * y[j] - x[j] * y[i]) * c;
        }
        out
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::validation(format!(
                "vector length {len} does not match algebra dimension {}",
                self.dim
            )));
        }
        Ok(())
    }

    /// Matrix of `d` on 1-forms: row `pair_index(i, j)`, column `k`, entry `−c^k_{ij}`.
    pub fn d_matrix(&self) -> crate::linalg::RMat {
        let n = self.dim;
        let pairs = strict_pairs(n);
        crate::linalg::RMat::from_fn(pairs.len(), n, |p, k| {
            let (i, j) = pairs[p];
            -self.c(i, j, k)
        })
    }
}

/// Invariant complex form of degree 1 or 2 in the dual basis `e^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantForm {
    degree: u8,
    coeffs: Vec<Complex64>,
}

impl InvariantForm {
    pub fn one_form(coeffs: Vec<Complex64>) -> Self {
        InvariantForm { degree: 1, coeffs }
    }

    pub fn real_one_form(coeffs: &[f64]) -> Self {
        Self::one_form(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Degree-2 form from coefficients on `e^i ∧ e^j`, `i < j`, lexicographic.
    pub fn two_form(coeffs: Vec<Complex64>) -> Self {
        InvariantForm { degree: 2, coeffs }
    }

    /// The dual basis covector `e^i` (0-based) in dimension `dim`.
    pub fn dual_basis(dim: usize, i: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); dim];
        c[i] = Complex64::new(1.0, 0.0);
        Self::one_form(c)
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `e^i ∧ e^j` for a 2-form (antisymmetric in `i, j`).
    pub fn pair_coeff(&self, dim: usize, i: usize, j: usize) -> Complex64 {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => self.coeffs[pair_index(dim, i, j)],
            Greater => -self.coeffs[pair_index(dim, j, i)],
            Equal => Complex64::new(0.0, 0.0),
        }
    }

    /// Evaluate a 1-form on a complex vector.
    pub fn eval1(&self, x: &[Complex64]) -> Complex64 {
        self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Evaluate a 2-form on a pair of complex vectors.
    pub fn eval2(&self, dim: usize, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (p, (i, j)) in strict_pairs(dim).into_iter().enumerate() {
            acc += self.coeffs[p] * (x[i] * y[j] - x[j] * y[i]);
        }
        acc
    }
}

/// Chevalley–Eilenberg differential of an invariant 1-form.
pub fn ce_d(g: &LieAlgebra, alpha: &InvariantForm) -> Result<InvariantForm> {
    if alpha.degree != 1 {
        return Err(Error::validation(format!(
            "ce_d expects a 1-form, got degree {}",
            alpha.degree
        )));
    }
    if alpha.coeffs.len() != g.dim {
        return Err(Error::validation("form length does not match algebra dimension"));
    }
    let n = g.dim;
    let mut out = vec![Complex64::new(0.0, 0.0); n * (n - 1) / 2];
    for &(i, j, k, c) in &g.terms {
        out[pair_index(n, i, j)] -= alpha.coeffs[k] * c;
    }
    Ok(InvariantForm::two_form(out))
}

/// Names accepted by [`catalog`].
pub const CATALOG_NAMES: &[&str] = &["abelian<2m>", "heis3xR3", "free2step3gen"];

/// Built-in test algebras: `abelian<2m>` (e.g. `abelian6`), `heis3xR3`, `free2step3gen`.
pub fn catalog(name: &str) -> Result<LieAlgebra> {
    let entry = |i, j, k| BracketEntry { i, j, k, c: 1.0 };
    let doc = match name {
        "heis3xR3" => AlgebraDoc {
            name: name.into(),
            dim: 6,
            brackets: vec![entry(1, 2, 3)],
        },
        "free2step3gen" => AlgebraDoc {
            name: name.into(),
            dim: 6,
            brackets: vec![entry(1, 2, 4), entry(1, 3, 5), entry(2, 3, 6)],
        },
        _ => match name.strip_prefix("abelian").and_then(|d| d.parse::<i64>().ok()) {
            Some(dim) => AlgebraDoc { name: name.into(), dim, brackets: vec![] },
            None => {
                return Err(Error::validation(format!(
                    "unknown catalog algebra '{name}' (known: {})",
                    CATALOG_NAMES.join(", ")
                )))
            }
        },
    };
    LieAlgebra::from_doc(&doc)
}
