//! Almost complex structures on a real vector space `R^{2m}`: validation,
//! sampling, adapted (1,0)-frames, the C⁰ distance and the Ψ graph map.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, RMat};

/// Bound on `‖J² + I‖_max`.
pub const ACS_TOL: f64 = 1e-10;
/// Bound on `‖LJ₀ + J₀L‖_max`, scaled by `max(1, ‖L‖_max ‖J₀‖_max)`.
pub const ANTICOMM_TOL: f64 = 1e-10;
/// Smallest admissible singular value of an accumulating frame basis.
pub const FRAME_INDEP_TOL: f64 = 1e-8;
/// Condition-number ceiling for the conjugating matrix in [`random_acs`].
pub const SAMPLER_MAX_COND: f64 = 1e6;
const SAMPLER_MAX_TRIES: usize = 100;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct Acs {
    j: RMat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcsDoc {
    pub dim: i64,
    pub matrix: Vec<Vec<f64>>,
}

impl Acs {
    pub fn new(j: RMat) -> Result<Self> {
        let n = j.nrows();
        if n != j.ncols() || n == 0 || !n.is_multiple_of(2) {
            return Err(Error::validation(format!(
                "almost complex structure must be square of even side, got {}x{}",
                j.nrows(),
                j.ncols()
            )));
        }
        let defect = j_squared_defect(&j);
        if !(defect <= ACS_TOL) {
            return Err(Error::validation(format!(
                "J^2 + I has max-norm {defect:.3e} > {ACS_TOL:e}"
            )));
        }
        Ok(Acs { j })
    }

    /// Caller has already checked `J² = −I` at its own tolerance.
    pub(crate) fn new_unchecked(j: RMat) -> Self {
        Acs { j }
    }

    pub fn from_doc(doc: &AcsDoc) -> Result<Self> {
        let m = linalg::from_rows(&doc.matrix)
            .ok_or_else(|| Error::validation("ragged matrix rows"))?;
        if m.nrows() as i64 != doc.dim || m.ncols() as i64 != doc.dim {
            return Err(Error::validation(format!(
                "matrix is {}x{} but dim = {}",
                m.nrows(),
                m.ncols(),
                doc.dim
            )));
        }
        Self::new(m)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_doc(&serde_json::from_str(text)?)
    }

    pub fn to_doc(&self) -> AcsDoc {
        AcsDoc { dim: self.dim() as i64, matrix: linalg::to_rows(&self.j) }
    }

    pub fn matrix(&self) -> &RMat {
        &self.j
    }

    pub fn dim(&self) -> usize {
        self.j.nrows()
    }

    pub fn m(&self) -> usize {
        self.dim() / 2
    }

    /// `J⁻¹ = −J`.
    pub fn inverse(&self) -> RMat {
        -&self.j
    }

    /// Standard structure: blocks `[[0, −1], [1, 0]]`, so `J e_{2a−1} = e_{2a}`.
    pub fn standard(dim: usize) -> Result<Self> {
        Self::new(standard_matrix(dim, false)?)
    }

    /// The standard structure with its last block reversed.
    pub fn standard_flipped(dim: usize) -> Result<Self> {
        Self::new(standard_matrix(dim, true)?)
    }

    /// Structure given by images `J e_a = e_b` on pairs `(a, b)` (0-based),
    /// extended by `J e_b = −e_a`.
    pub fn from_pairs(dim: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut j = RMat::zeros(dim, dim);
        for &(a, b) in pairs {
            if a >= dim || b >= dim {
                return Err(Error::validation("pair index out of range"));
            }
            j[(b, a)] = 1.0;
            j[(a, b)] = -1.0;
        }
        Self::new(j)
    }
}

fn standard_matrix(dim: usize, flip_last: bool) -> Result<RMat> {
    if dim == 0 || !dim.is_multiple_of(2) {
        return Err(Error::validation(format!("dimension must be even and >= 2, got {dim}")));
    }
    let mut j = RMat::zeros(dim, dim);
    for a in 0..dim / 2 {
        let sign = if flip_last && a == dim / 2 - 1 { -1.0 } else { 1.0 };
        j[(2 * a + 1, 2 * a)] = sign;
        j[(2 * a, 2 * a + 1)] = -sign;
    }
    Ok(j)
}

fn j_squared_defect(j: &RMat) -> f64 {
    let n = j.nrows();
    linalg::max_abs(&(j * j + RMat::identity(n, n)))
}

/// Names accepted by [`catalog_acs`].
pub const ACS_CATALOG_NAMES: &[&str] = &["jstd<2m>", "ja", "jb"];

/// Built-in structures: `jstd<2m>`, and on `R^6` the Heisenberg test pair
/// `ja` (`Je1=e2, Je3=e4, Je5=e6`) and `jb` (`Je1=e3, Je2=e4, Je5=e6`).
pub fn catalog_acs(name: &str) -> Result<Acs> {
    match name {
        "ja" => Acs::from_pairs(6, &[(0, 1), (2, 3), (4, 5)]),
        "jb" => Acs::from_pairs(6, &[(0, 2), (1, 3), (4, 5)]),
        _ => match name.strip_prefix("jstd").and_then(|d| d.parse::<usize>().ok()) {
            Some(dim) => Acs::standard(dim),
            None => Err(Error::validation(format!(
                "unknown catalog structure '{name}' (known: {})",
                ACS_CATALOG_NAMES.join(", ")
            ))),
        },
    }
}

/// Seeded random structure `A J_base A⁻¹`, `A` with entries in `[−1, 1]`.
pub fn random_acs(dim: usize, seed: u64, flipped: bool) -> Result<Acs> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_acs_with(dim, &mut rng, flipped)
}

pub(crate) fn random_acs_with<R: Rng>(dim: usize, rng: &mut R, flipped: bool) -> Result<Acs> {
    let base = standard_matrix(dim, flipped)?;
    for _ in 0..SAMPLER_MAX_TRIES {
        let a = RMat::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..=1.0));
        if linalg::condition_number(&a) > SAMPLER_MAX_COND {
            continue;
        }
        let Some(inv) = a.clone().try_inverse() else { continue };
        let j = &a * &base * inv;
        if let Ok(acs) = Acs::new(j) {
            return Ok(acs);
        }
    }
    Err(Error::numerical("degenerate sampler: no well-conditioned conjugation found"))
}

/// Endomorphism anti-commuting with a base structure: a tangent vector to
/// the space of structures at `base`.
#[derive(Debug, Clone, PartialEq)]
pub struct AntiCommEndo {
    l: RMat,
    base: Acs,
}

impl AntiCommEndo {
    pub fn new(l: RMat, base: &Acs) -> Result<Self> {
        if l.nrows() != base.dim() || l.ncols() != base.dim() {
            return Err(Error::validation(format!(
                "endomorphism is {}x{}, base structure has dimension {}",
                l.nrows(),
                l.ncols(),
                base.dim()
            )));
        }
        let defect = anticommutator_defect(&l, base);
        let scale = (linalg::max_abs(&l) * linalg::max_abs(base.matrix())).max(1.0);
        if !(defect <= ANTICOMM_TOL * scale) {
            return Err(Error::validation(format!(
                "L J0 + J0 L has max-norm {defect:.3e}, exceeds {:.3e}",
                ANTICOMM_TOL * scale
            )));
        }
        Ok(AntiCommEndo { l, base: base.clone() })
    }

    pub fn zero(base: &Acs) -> Self {
        AntiCommEndo { l: RMat::zeros(base.dim(), base.dim()), base: base.clone() }
    }

    /// Orthogonal projection `L ↦ ½(L + J₀ L J₀)` onto the anti-commuting subspace.
    pub fn project(l: &RMat, base: &Acs) -> Result<Self> {
        Self::new(project_anticommuting(l, base.matrix()), base)
    }

    pub fn matrix(&self) -> &RMat {
        &self.l
    }

    pub fn base(&self) -> &Acs {
        &self.base
    }

    pub fn into_matrix(self) -> RMat {
        self.l
    }
}

pub(crate) fn project_anticommuting(l: &RMat, j0: &RMat) -> RMat {
    (l + j0 * l * j0) * 0.5
}

pub fn anticommutator_defect(l: &RMat, base: &Acs) -> f64 {
    let j = base.matrix();
    linalg::max_abs(&(l * j + j * l))
}

/// Adapted complex frame of a structure.
///
/// `u` holds real vectors `u_1..u_m` (columns) with `{u_j, J u_j}` a basis,
/// `v` the (1,0)-vectors `v_j = u_j − i J u_j` (columns) and `omega` the dual
/// (1,0)-coframe (rows): `ω^j(v_k) = δ_jk`, `ω^j(v̄_k) = 0`.
#[derive(Debug, Clone)]
pub struct AdaptedFrame {
    pub u: RMat,
    pub v: CMat,
    pub omega: CMat,
}

impl AdaptedFrame {
    pub fn m(&self) -> usize {
        self.v.ncols()
    }

    /// Conjugate vectors `v̄_j` as columns.
    pub fn v_bar(&self) -> CMat {
        self.v.map(|z| z.conj())
    }

    /// Coefficients of `ω^j` in the dual basis `e^i`.
    pub fn omega_row(&self, j: usize) -> Vec<Complex64> {
        self.omega.row(j).iter().copied().collect()
    }
}

/// Greedy scan of the standard basis: `e_i` joins the frame when
/// `{u_1, J u_1, …, e_i, J e_i}` stays independent.
pub fn adapted_frame(acs: &Acs) -> Result<AdaptedFrame> {
    let n = acs.dim();
    let m = acs.m();
    let j = acs.matrix();
    let mut chosen: Vec<usize> = Vec::with_capacity(m);
    for i in 0..n {
        if chosen.len() == m {
            break;
        }
        let cols: Vec<usize> = chosen.iter().copied().chain(std::iter::once(i)).collect();
        let basis = RMat::from_fn(n, 2 * cols.len(), |r, c| {
            let e = cols[c / 2];
            if c % 2 == 0 {
                if r == e { 1.0 } else { 0.0 }
            } else {
                j[(r, e)]
            }
        });
        let normalized = normalize_columns(basis);
        if linalg::min_singular_value(&normalized) > FRAME_INDEP_TOL {
            chosen.push(i);
        }
    }
    if chosen.len() != m {
        return Err(Error::numerical(format!(
            "adapted frame incomplete: found {} of {m} legs",
            chosen.len()
        )));
    }
    let u = RMat::from_fn(n, m, |r, c| if r == chosen[c] { 1.0 } else { 0.0 });
    let ju = j * &u;
    let v = CMat::from_fn(n, m, |r, c| Complex64::new(u[(r, c)], -ju[(r, c)]));
    let basis = CMat::from_fn(n, n, |r, c| if c < m { v[(r, c)] } else { v[(r, c - m)].conj() });
    let inv = basis
        .try_inverse()
        .ok_or_else(|| Error::numerical("adapted frame: complex basis is singular"))?;
    let omega = inv.rows(0, m).into_owned();
    Ok(AdaptedFrame { u, v, omega })
}

fn normalize_columns(mut a: RMat) -> RMat {
    for mut col in a.column_iter_mut() {
        let n = col.norm();
        if n > 0.0 {
            col /= n;
        }
    }
    a
}

/// `Ψ = ½(L − i J₀ L)` on the complexification.
///
/// `Ψ` kills `T^{1,0}` and maps `T^{0,1}` into `T^{1,0}`; the (0,1)-space of
/// the deformed structure is the graph `(id + Ψ) T^{0,1}`.
pub fn psi_from_l(l: &AntiCommEndo) -> CMat {
    let lc = linalg::complexify(l.matrix());
    let jl = linalg::complexify(&(l.base().matrix() * l.matrix()));
    (lc - jl * I) * Complex64::new(0.5, 0.0)
}

/// Columns `v_j + conj(Ψ v̄_j)`: the graph description of `T^{1,0}` for
/// `deform(J₀, L)`, built from the adapted frame of `J₀`.
pub fn deformed_holomorphic_vectors(l: &AntiCommEndo) -> Result<CMat> {
    let frame = adapted_frame(l.base())?;
    let psi = psi_from_l(l);
    let image = (&psi * frame.v_bar()).map(|z| z.conj());
    Ok(&frame.v + image)
}

/// `max_x ‖(J₀ − J₁)|_x‖` for invariant structures: the spectral norm of `J₀ − J₁`.
pub fn c0_distance(j0: &Acs, j1: &Acs) -> Result<f64> {
    if j0.dim() != j1.dim() {
        return Err(Error::validation(format!(
            "dimension mismatch: {} vs {}",
            j0.dim(),
            j1.dim()
        )));
    }
    Ok(linalg::spectral_norm(&(j0.matrix() - j1.matrix())))
}

/// Complexified action `J_ℂ` as a complex matrix.
pub fn complex_action(acs: &Acs) -> CMat {
    linalg::complexify(acs.matrix())
}

pub(crate) fn random_matrix<R: Rng>(n: usize, rng: &mut R) -> RMat {
    DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..=1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(a: f64, b: f64, c: f64, d: f64) -> RMat {
        RMat::from_row_slice(2, 2, &[a, b, c, d])
    }

    #[test]
    fn validates_roots_of_minus_identity() {
        assert!(Acs::standard(6).is_ok());
        assert!(Acs::new(RMat::identity(4, 4)).is_err());
        assert!(Acs::new(m2(0.0, -2.0, 0.5, 0.0)).is_ok());
        assert!(Acs::new(RMat::zeros(3, 3)).is_err());
    }

    #[test]
    fn random_structures_are_deterministic_and_valid() {
        let a = random_acs(4, 1, false).unwrap();
        let b = random_acs(4, 1, false).unwrap();
        assert_eq!(a, b);
        for seed in 0..50 {
            for flipped in [false, true] {
                let j = random_acs(6, seed, flipped).unwrap();
                assert!(j_squared_defect(j.matrix()) <= ACS_TOL);
            }
        }
    }

    #[test]
    fn two_dimensional_structures_are_traceless() {
        for seed in 0..20 {
            let j = random_acs(2, seed, seed % 2 == 0).unwrap();
            let m = j.matrix();
            // char poly of a root of −I is λ² + 1: trace 0, determinant 1.
            assert!(m.trace().abs() < 1e-9);
            assert!((m.determinant() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn orientation_flag_changes_orientation_class() {
        // det of the (1,0) basis orientation: sign of Pfaffian-like invariant
        // via det[u, Ju] for u = e1, compare structures in dim 2.
        let plus = Acs::standard(2).unwrap();
        let minus = Acs::standard_flipped(2).unwrap();
        let or = |j: &Acs| {
            let m = j.matrix();
            m[(1, 0)].signum()
        };
        assert_eq!(or(&plus), 1.0);
        assert_eq!(or(&minus), -1.0);
    }

    #[test]
    fn frame_of_standard_dim2() {
        let f = adapted_frame(&Acs::standard(2).unwrap()).unwrap();
        assert_eq!(f.v[(0, 0)], Complex64::new(1.0, 0.0));
        assert_eq!(f.v[(1, 0)], Complex64::new(0.0, -1.0));
        assert!((f.omega[(0, 0)] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((f.omega[(0, 1)] - Complex64::new(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn frame_of_standard_dim4_picks_e1_e3() {
        let f = adapted_frame(&Acs::standard(4).unwrap()).unwrap();
        assert_eq!(f.m(), 2);
        assert_eq!(f.u[(0, 0)], 1.0);
        assert_eq!(f.u[(2, 1)], 1.0);
    }

    #[test]
    fn frame_duality_for_random_structures() {
        for seed in 0..30 {
            let j = random_acs(8, seed, false).unwrap();
            let f = adapted_frame(&j).unwrap();
            let jc = complex_action(&j);
            let resid = &jc * &f.v - &f.v * I;
            assert!(linalg::max_abs_c(&resid) < 1e-10);
            let pair = &f.omega * &f.v - CMat::identity(4, 4);
            assert!(linalg::max_abs_c(&pair) < 1e-12);
            assert!(linalg::max_abs_c(&(&f.omega * f.v_bar())) < 1e-12);
        }
    }

    #[test]
    fn psi_on_standard_dim2() {
        let j0 = Acs::standard(2).unwrap();
        let l = AntiCommEndo::new(m2(1.0 / 3.0, 0.0, 0.0, -1.0 / 3.0), &j0).unwrap();
        let psi = psi_from_l(&l);
        let v = nalgebra::DVector::from_vec(vec![Complex64::new(1.0, 0.0), -I]);
        let vb = v.map(|z| z.conj());
        let pv = &psi * &v;
        let pvb = &psi * &vb;
        assert!(pv.iter().all(|z| z.norm() < 1e-15));
        let expected = &v * Complex64::new(1.0 / 3.0, 0.0);
        assert!((pvb - expected).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn psi_of_zero_is_zero() {
        let j0 = Acs::standard(4).unwrap();
        assert!(linalg::max_abs_c(&psi_from_l(&AntiCommEndo::zero(&j0))) == 0.0);
    }

    #[test]
    fn anticommutation_is_enforced() {
        let j0 = Acs::standard(2).unwrap();
        assert!(AntiCommEndo::new(RMat::identity(2, 2), &j0).is_err());
        assert!(AntiCommEndo::new(RMat::identity(4, 4), &j0).is_err());
    }

    #[test]
    fn c0_distance_examples() {
        let j0 = Acs::standard(2).unwrap();
        let j1 = Acs::new(m2(0.0, -2.0, 0.5, 0.0)).unwrap();
        assert_eq!(c0_distance(&j0, &j0).unwrap(), 0.0);
        assert!((c0_distance(&j0, &j1).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(c0_distance(&j0, &j1).unwrap(), c0_distance(&j1, &j0).unwrap());
        assert!(c0_distance(&j0, &Acs::standard(4).unwrap()).is_err());
    }

    #[test]
    fn catalog_structures() {
        let ja = catalog_acs("ja").unwrap();
        let jb = catalog_acs("jb").unwrap();
        assert_eq!(ja, Acs::standard(6).unwrap());
        // J_b e1 = e3, J_b e2 = e4
        assert_eq!(jb.matrix()[(2, 0)], 1.0);
        assert_eq!(jb.matrix()[(3, 1)], 1.0);
        assert_eq!(catalog_acs("jstd4").unwrap().dim(), 4);
        assert!(catalog_acs("jstd3").is_err());
        assert!(catalog_acs("nope").is_err());
    }

    #[test]
    fn doc_roundtrip_and_shape_errors() {
        let j = random_acs(4, 3, false).unwrap();
        assert_eq!(Acs::from_doc(&j.to_doc()).unwrap(), j);
        let bad = AcsDoc { dim: 4, matrix: vec![vec![0.0, -1.0], vec![1.0, 0.0]] };
        assert!(Acs::from_doc(&bad).is_err());
    }
}
