//! Bernstein approximation of a sampled curve of deformation data.
//!
//! The samples are joined piecewise linearly, the degree-`n` Bernstein
//! polynomial of that interpolant is expanded in the monomial basis with
//! exact rational arithmetic, and only then rounded. The monomial basis is
//! badly conditioned at high degree (coefficient sums near `1e15` at
//! `n = 40`), so the rounding residual at `t = 1` is folded back into the
//! linear coefficient; together with compensated evaluation in
//! [`CurveL::l_at`] this keeps both endpoints exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::curve::{curve_eval, CurveL};
use crate::acs::{c0_distance, project_anticommuting, Acs, AntiCommEndo};
use crate::error::{Error, Result};
use crate::linalg::{self, RMat};

/// Result of [`bernstein_curve`].
#[derive(Debug, Clone)]
pub struct BernsteinFit {
    pub curve: CurveL,
    pub degree: usize,
    /// `max_i ‖B(t_i) − L_i‖` in spectral norm.
    pub sup_error: f64,
    /// `max_i d_C⁰(curve_eval(B, t_i), deform(J₀, L_i))`.
    pub c0_error: f64,
}

/// `{"j0": matrix, "samples": [{"t": number, "l": matrix}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplesDoc {
    pub j0: Vec<Vec<f64>>,
    pub samples: Vec<SampleDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleDoc {
    pub t: f64,
    pub l: Vec<Vec<f64>>,
}

impl SamplesDoc {
    pub fn parse(&self) -> Result<(Acs, Vec<(f64, RMat)>)> {
        let j0 = Acs::new(
            linalg::from_rows(&self.j0).ok_or_else(|| Error::validation("ragged j0"))?,
        )?;
        let samples = self
            .samples
            .iter()
            .map(|s| {
                linalg::from_rows(&s.l)
                    .map(|m| (s.t, m))
                    .ok_or_else(|| Error::validation("ragged sample matrix"))
            })
            .collect::<Result<_>>()?;
        Ok((j0, samples))
    }
}

const UNIFORM_TOL: f64 = 1e-9;
const BASE_ZERO_TOL: f64 = 1e-14;

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite sample")
}

fn binomials(n: usize) -> Vec<Vec<BigInt>> {
    let mut rows = vec![vec![BigInt::from(1)]];
    for r in 1..=n {
        let prev = &rows[r - 1];
        let mut row = vec![BigInt::from(1); r + 1];
        for k in 1..r {
            row[k] = &prev[k - 1] + &prev[k];
        }
        rows.push(row);
    }
    rows
}

/// Fit a degree-`degree` Bernstein polynomial to uniformly spaced samples on `[0, 1]`.
pub fn bernstein_curve(j0: &Acs, samples: &[(f64, RMat)], degree: usize) -> Result<BernsteinFit> {
    if degree == 0 {
        return Err(Error::validation("degree must be >= 1"));
    }
    let count = samples.len();
    if count < 2 {
        return Err(Error::validation("need at least the samples at t = 0 and t = 1"));
    }
    if samples[0].0 != 0.0 || samples[count - 1].0 != 1.0 {
        return Err(Error::validation("missing endpoint samples at t = 0 and t = 1"));
    }
    for (i, (t, l)) in samples.iter().enumerate() {
        let expected = i as f64 / (count - 1) as f64;
        if !((t - expected).abs() <= UNIFORM_TOL) {
            return Err(Error::validation(format!(
                "sample {i}: t = {t} is not on the uniform grid (expected {expected})"
            )));
        }
        if l.iter().any(|x| !x.is_finite()) {
            return Err(Error::validation(format!("sample {i}: non-finite entry")));
        }
        AntiCommEndo::new(l.clone(), j0).map_err(|e| Error::validation(format!("sample {i}: {e}")))?;
        super::deform_matrix(j0, l)
            .map_err(|e| Error::numerical(format!("sample {i} at t = {t}: {e}")))?;
    }
    if linalg::max_abs(&samples[0].1) > BASE_ZERO_TOL {
        return Err(Error::validation("sample at t = 0 must be the zero endomorphism"));
    }

    let n = degree;
    let dim = j0.dim();
    let binom = binomials(n);
    let segments = count - 1;
    let last = &samples[count - 1].1;

    let mut coeffs = vec![RMat::zeros(dim, dim); n];
    let mut residual = RMat::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            // Control values f(k/n) of the piecewise-linear interpolant.
            let control: Vec<BigRational> = (0..=n)
                .map(|k| {
                    let scaled = k * segments;
                    let idx = scaled / n;
                    if idx >= segments {
                        return rat(samples[segments].1[(r, c)]);
                    }
                    let w = BigRational::new(BigInt::from(scaled % n), BigInt::from(n));
                    let a = rat(samples[idx].1[(r, c)]);
                    let b = rat(samples[idx + 1].1[(r, c)]);
                    &a + (b - &a) * w
                })
                .collect();
            let mut rounded_sum = BigRational::zero();
            for j in 1..=n {
                let mut cj = BigRational::zero();
                for (k, fk) in control.iter().enumerate().take(j + 1) {
                    let weight = &binom[n][k] * &binom[n - k][j - k];
                    let term = fk * BigRational::from_integer(weight);
                    if (j - k) % 2 == 0 {
                        cj += term;
                    } else {
                        cj -= term;
                    }
                }
                let x = cj.to_f64().unwrap_or(f64::NAN);
                coeffs[j - 1][(r, c)] = x;
                rounded_sum += rat(x);
            }
            residual[(r, c)] = (rat(last[(r, c)]) - rounded_sum).to_f64().unwrap_or(f64::NAN);
        }
    }
    coeffs[0] += project_anticommuting(&residual, j0.matrix());
    let curve = CurveL::new(j0.clone(), coeffs, (0.0, 1.0))?;

    let mut sup_error = 0.0_f64;
    let mut c0_error = 0.0_f64;
    for (t, l) in samples {
        sup_error = sup_error.max(linalg::spectral_norm(&(curve.l_at(*t) - l)));
        let approx = curve_eval(&curve, *t)?;
        let target = super::deform_matrix(j0, l)?;
        c0_error = c0_error.max(c0_distance(&approx, &target)?);
    }
    Ok(BernsteinFit { curve, degree, sup_error, c0_error })
}
