//! C ABI for `acstk`.
//!
//! Objects cross the boundary as opaque handles released with their `_free`
//! function. Every fallible call returns an [`AcstkStatus`]; on failure the
//! message is kept per thread and read with [`acstk_last_error_message`].
//! Matrices are dense, row-major `double` arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use acstk::acs::{catalog_acs, random_acs};
use acstk::linalg::{self, RMat};
use acstk::{Acs, AntiCommEndo, Error, LieAlgebra, RankTol};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcstkStatus {
    Ok = 0,
    /// Malformed input: bad JSON, wrong shapes, failed structural checks.
    Validation = 1,
    /// Singular or ill-conditioned computation.
    Numerical = 2,
    /// A search exhausted its budget.
    Search = 3,
    /// A required pointer argument was null.
    NullPointer = 4,
    /// An output buffer was too small.
    BufferTooSmall = 5,
    /// Internal panic caught at the boundary.
    Panic = 6,
}

/// Lie algebra handle.
pub struct AcstkAlgebra(LieAlgebra);

/// Almost complex structure handle.
pub struct AcstkAcs(Acs);

/// Invariants of an invariant structure.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AcstkInvariants {
    pub b1: usize,
    pub h1_ddc: usize,
    pub method_a: usize,
    pub method_b: usize,
    pub rank: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<Vec<u8>>) {
    let text = CString::new(msg).unwrap_or_else(|_| CString::from(c"error message contained NUL"));
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

enum Fail {
    Core(Error),
    Null(&'static str),
    Buffer { need: usize, got: usize },
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> AcstkStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AcstkStatus::Ok,
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            match e.exit_code() {
                2 => AcstkStatus::Numerical,
                3 => AcstkStatus::Search,
                _ => AcstkStatus::Validation,
            }
        }
        Ok(Err(Fail::Null(name))) => {
            set_error(format!("null pointer for argument '{name}'"));
            AcstkStatus::NullPointer
        }
        Ok(Err(Fail::Buffer { need, got })) => {
            set_error(format!("output buffer holds {got} values, {need} needed"));
            AcstkStatus::BufferTooSmall
        }
        Err(_) => {
            set_error("internal panic");
            AcstkStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(name))
}

unsafe fn as_str<'a>(p: *const c_char, name: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Core(Error::Validation(format!("{name} is not valid UTF-8"))))
}

unsafe fn read_square(data: *const f64, dim: usize, name: &'static str) -> Result<RMat, Fail> {
    if data.is_null() {
        return Err(Fail::Null(name));
    }
    let values = std::slice::from_raw_parts(data, dim * dim);
    Ok(RMat::from_row_slice(dim, dim, values))
}

unsafe fn write_out(values: &[f64], out: *mut f64, len: usize) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null("out"));
    }
    if len < values.len() {
        return Err(Fail::Buffer { need: values.len(), got: len });
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

fn row_major(m: &RMat) -> Vec<f64> {
    linalg::to_rows(m).into_iter().flatten().collect()
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. Free with
/// [`acstk_string_free`].
#[no_mangle]
pub extern "C" fn acstk_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().clone().map_or(ptr::null_mut(), CString::into_raw))
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn acstk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn acstk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn acstk_algebra_from_json(
    json: *const c_char,
    out: *mut *mut AcstkAlgebra,
) -> AcstkStatus {
    guard(|| {
        let g = LieAlgebra::from_json(as_str(json, "json")?)?;
        put(out, AcstkAlgebra(g))
    })
}

/// Built-in algebra by name (`abelian<2m>`, `heis3xR3`, `free2step3gen`).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn acstk_algebra_catalog(
    name: *const c_char,
    out: *mut *mut AcstkAlgebra,
) -> AcstkStatus {
    guard(|| {
        let g = acstk::catalog(as_str(name, "name")?)?;
        put(out, AcstkAlgebra(g))
    })
}

/// Dimension of the algebra, or 0 for NULL.
///
/// # Safety
/// `g` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn acstk_algebra_dim(g: *const AcstkAlgebra) -> usize {
    g.as_ref().map_or(0, |g| g.0.dim())
}

/// # Safety
/// `g` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn acstk_algebra_free(g: *mut AcstkAlgebra) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Structure from a row-major `dim × dim` matrix with `J² = −I`.
///
/// # Safety
/// `data` must point to `dim * dim` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn acstk_acs_new(
    data: *const f64,
    dim: usize,
    out: *mut *mut AcstkAcs,
) -> AcstkStatus {
    guard(|| {
        let j = Acs::new(read_square(data, dim, "data")?)?;
        put(out, AcstkAcs(j))
    })
}

/// Built-in structure by name (`jstd<2m>`, `ja`, `jb`).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn acstk_acs_catalog(name: *const c_char, out: *mut *mut AcstkAcs) -> AcstkStatus {
    guard(|| {
        let j = catalog_acs(as_str(name, "name")?)?;
        put(out, AcstkAcs(j))
    })
}

/// Seeded random structure.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn acstk_acs_random(
    dim: usize,
    seed: u64,
    flipped: bool,
    out: *mut *mut AcstkAcs,
) -> AcstkStatus {
    guard(|| put(out, AcstkAcs(random_acs(dim, seed, flipped)?)))
}

/// Dimension of the structure, or 0 for NULL.
///
/// # Safety
/// `j` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn acstk_acs_dim(j: *const AcstkAcs) -> usize {
    j.as_ref().map_or(0, |j| j.0.dim())
}

/// Copy the matrix, row-major, into `out` (`len ≥ dim²`).
///
/// # Safety
/// `j` must be a live handle; `out` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn acstk_acs_matrix(j: *const AcstkAcs, out: *mut f64, len: usize) -> AcstkStatus {
    guard(|| write_out(&row_major(as_ref(j, "j")?.0.matrix()), out, len))
}

/// # Safety
/// `j` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn acstk_acs_free(j: *mut AcstkAcs) {
    if !j.is_null() {
        drop(Box::from_raw(j));
    }
}

/// Complex rank of the Nijenhuis tensor.
///
/// # Safety
/// Handles must be live; `out_rank` must be writable.
#[no_mangle]
pub unsafe extern "C" fn acstk_complex_rank(
    g: *const AcstkAlgebra,
    j: *const AcstkAcs,
    tol_rel: f64,
    tol_abs: f64,
    out_rank: *mut usize,
) -> AcstkStatus {
    guard(|| {
        let tol = RankTol::new(tol_rel, tol_abs)?;
        let r = acstk::complex_rank(&as_ref(g, "g")?.0, &as_ref(j, "j")?.0, tol)?;
        if out_rank.is_null() {
            return Err(Fail::Null("out_rank"));
        }
        *out_rank = r;
        Ok(())
    })
}

/// Nijenhuis tensor components, `out[(i * dim + j) * dim + k] = N^k_{ij}`
/// (`len ≥ dim³`).
///
/// # Safety
/// Handles must be live; `out` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn acstk_nijenhuis(
    g: *const AcstkAlgebra,
    j: *const AcstkAcs,
    out: *mut f64,
    len: usize,
) -> AcstkStatus {
    guard(|| {
        let n = acstk::nijenhuis_invariant(&as_ref(g, "g")?.0, &as_ref(j, "j")?.0)?;
        let d = n.dim();
        let mut values = Vec::with_capacity(d * d * d);
        for a in 0..d {
            for b in 0..d {
                values.extend_from_slice(n.on_basis(a, b));
            }
        }
        write_out(&values, out, len)
    })
}

/// `(I + L) J₀ (I + L)⁻¹` for a row-major `L` anti-commuting with `J₀`.
///
/// # Safety
/// `j0` must be live; `l` must point to `dim²` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn acstk_deform(
    j0: *const AcstkAcs,
    l: *const f64,
    out: *mut *mut AcstkAcs,
) -> AcstkStatus {
    guard(|| {
        let base = &as_ref(j0, "j0")?.0;
        let l = AntiCommEndo::new(read_square(l, base.dim(), "l")?, base)?;
        put(out, AcstkAcs(acstk::deform(base, &l)?))
    })
}

/// `L = (I − J₀J₁)⁻¹(I + J₀J₁)`, row-major into `out` (`len ≥ dim²`).
///
/// # Safety
/// Handles must be live; `out` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn acstk_recover_l(
    j0: *const AcstkAcs,
    j1: *const AcstkAcs,
    out: *mut f64,
    len: usize,
) -> AcstkStatus {
    guard(|| {
        let l = acstk::recover_l(&as_ref(j0, "j0")?.0, &as_ref(j1, "j1")?.0)?;
        write_out(&row_major(l.matrix()), out, len)
    })
}

/// Operator-norm distance `‖J₀ − J₁‖`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn acstk_c0_distance(
    j0: *const AcstkAcs,
    j1: *const AcstkAcs,
    out: *mut f64,
) -> AcstkStatus {
    guard(|| {
        let d = acstk::c0_distance(&as_ref(j0, "j0")?.0, &as_ref(j1, "j1")?.0)?;
        write_out(&[d], out, 1)
    })
}

/// `h¹_{d+d^c}`, `b₁` and the complex rank, at default rank tolerances.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn acstk_invariants(
    g: *const AcstkAlgebra,
    j: *const AcstkAcs,
    out: *mut AcstkInvariants,
) -> AcstkStatus {
    guard(|| {
        let r = acstk::h1_ddc(&as_ref(g, "g")?.0, &as_ref(j, "j")?.0)?;
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        *out = AcstkInvariants {
            b1: r.b1,
            h1_ddc: r.h1_ddc,
            method_a: r.method_a,
            method_b: r.method_b,
            rank: r.rank,
        };
        Ok(())
    })
}
