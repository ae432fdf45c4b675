use serde::{Deserialize, Serialize};

use crate::acs::{project_anticommuting, Acs, AntiCommEndo};
use crate::error::{Error, Result};
use crate::linalg::{self, RMat};

/// Polynomial curve of structures `J_t = deform(J₀, L(t))`,
/// `L(t) = Σ_{j=1..d} L_j t^j`, on a closed parameter interval.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveL {
    base: Acs,
    coeffs: Vec<RMat>,
    domain: (f64, f64),
}

/// `{"j0": matrix, "coeffs": [matrix, ...], "domain": [lo, hi]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveDoc {
    pub j0: Vec<Vec<f64>>,
    pub coeffs: Vec<Vec<Vec<f64>>>,
    pub domain: [f64; 2],
}

pub const CURVE_CATALOG_NAMES: &[&str] = &["tE", "tdiag"];

/// Built-in curves over `J_a` on `[−0.9, 0.9]` (6-dimensional):
/// `tE` with `E: e1 ↔ e3, e2 ↦ −e4, e4 ↦ −e2`, and `tdiag` with
/// `L(t) = t·diag(1, −1, 0, 0, 0, 0)`.
pub fn catalog_curve(name: &str) -> Result<CurveL> {
    let ja = crate::acs::catalog_acs("ja")?;
    let mut l = RMat::zeros(6, 6);
    match name {
        "tE" => {
            l[(2, 0)] = 1.0;
            l[(0, 2)] = 1.0;
            l[(3, 1)] = -1.0;
            l[(1, 3)] = -1.0;
        }
        "tdiag" => {
            l[(0, 0)] = 1.0;
            l[(1, 1)] = -1.0;
        }
        _ => {
            return Err(Error::validation(format!(
                "unknown catalog curve '{name}' (known: {})",
                CURVE_CATALOG_NAMES.join(", ")
            )))
        }
    }
    CurveL::new(ja, vec![l], (-0.9, 0.9))
}

impl CurveL {
    /// Validates that every coefficient anti-commutes with `base`.
    pub fn new(base: Acs, coeffs: Vec<RMat>, domain: (f64, f64)) -> Result<Self> {
        let (lo, hi) = domain;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::validation(format!("invalid curve domain [{lo}, {hi}]")));
        }
        for (j, c) in coeffs.iter().enumerate() {
            AntiCommEndo::new(c.clone(), &base)
                .map_err(|e| Error::validation(format!("coefficient L_{}: {e}", j + 1)))?;
        }
        Ok(CurveL { base, coeffs, domain })
    }

    /// First-order curve `L(t) = t L₁`.
    pub fn linear(l1: &AntiCommEndo, domain: (f64, f64)) -> Result<Self> {
        Self::new(l1.base().clone(), vec![l1.matrix().clone()], domain)
    }

    pub fn from_doc(doc: &CurveDoc) -> Result<Self> {
        let j0 = linalg::from_rows(&doc.j0).ok_or_else(|| Error::validation("ragged j0"))?;
        let base = Acs::new(j0)?;
        let n = base.dim();
        let coeffs = doc
            .coeffs
            .iter()
            .map(|rows| {
                let m = linalg::from_rows(rows)
                    .ok_or_else(|| Error::validation("ragged coefficient matrix"))?;
                if m.nrows() != n || m.ncols() != n {
                    return Err(Error::validation("coefficient shape does not match j0"));
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(base, coeffs, (doc.domain[0], doc.domain[1]))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_doc(&serde_json::from_str(text)?)
    }

    pub fn to_doc(&self) -> CurveDoc {
        CurveDoc {
            j0: linalg::to_rows(self.base.matrix()),
            coeffs: self.coeffs.iter().map(linalg::to_rows).collect(),
            domain: [self.domain.0, self.domain.1],
        }
    }

    pub fn base(&self) -> &Acs {
        &self.base
    }

    pub fn coeffs(&self) -> &[RMat] {
        &self.coeffs
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// `L(t)`, evaluated entrywise by compensated Horner and projected onto
    /// the matrices anti-commuting with `J₀`.
    pub fn l_at(&self, t: f64) -> RMat {
        let n = self.dim();
        let mut out = RMat::zeros(n, n);
        if self.coeffs.is_empty() || t == 0.0 {
            return out;
        }
        let mut poly = vec![0.0; self.coeffs.len() + 1];
        for r in 0..n {
            for c in 0..n {
                for (j, coeff) in self.coeffs.iter().enumerate() {
                    poly[j + 1] = coeff[(r, c)];
                }
                out[(r, c)] = compensated_horner(&poly, t);
            }
        }
        project_anticommuting(&out, self.base.matrix())
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.domain.0 && t <= self.domain.1
    }
}

/// Evaluate a curve at `t`: `deform(J₀, L(t))`, exactly `J₀` at `t = 0`.
pub fn curve_eval(curve: &CurveL, t: f64) -> Result<Acs> {
    if !curve.contains(t) {
        return Err(Error::validation(format!(
            "t = {t} outside curve domain [{}, {}]",
            curve.domain.0, curve.domain.1
        )));
    }
    if t == 0.0 {
        return Ok(curve.base.clone());
    }
    super::deform_matrix(&curve.base, &curve.l_at(t))
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let z = s - a;
    (s, (a - (s - z)) + (b - z))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Horner's scheme with error-free transformations; `coeffs[j]` multiplies `t^j`.
pub(crate) fn compensated_horner(coeffs: &[f64], t: f64) -> f64 {
    let Some((&top, rest)) = coeffs.split_last() else { return 0.0 };
    let mut s = top;
    let mut corr = 0.0;
    for &a in rest.iter().rev() {
        let (p, pe) = two_prod(s, t);
        let (ns, se) = two_sum(p, a);
        s = ns;
        corr = corr * t + (pe + se);
    }
    s + corr
}
