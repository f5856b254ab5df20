//! C ABI over `mixedvol`. Bodies are opaque `MvPolytope` handles owned by
//! the caller and released with `mv_polytope_free`. Every fallible call
//! returns an `MvStatus`; on failure the message is available from
//! `mv_last_error_message` on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use mixedvol::functionals;
use mixedvol::inequalities;
use mixedvol::{ConvexPolytope, GeomError};

/// Opaque polytope handle.
pub struct MvPolytope {
    inner: ConvexPolytope,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MvStatus {
    Ok = 0,
    NullPointer = 1,
    DimensionMismatch = 2,
    InvalidParameter = 3,
    DegenerateHull = 4,
    LpFailure = 5,
    IllConditioned = 6,
    NoConvergence = 7,
    Precondition = 8,
    Json = 9,
    InvalidUtf8 = 10,
    Panic = 11,
}

/// Inequality selector for `mv_check`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MvCheck {
    Minkowski = 0,
    BetkeWeil = 1,
    BetkeWeilSelf = 2,
    ReverseMinkowski = 3,
    Linhart = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MvCheckResult {
    pub lhs: f64,
    pub rhs: f64,
    pub deficit: f64,
    pub tolerance: f64,
    pub satisfied: bool,
    /// True when the inputs match the equality case.
    pub equality_witness: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &GeomError) -> MvStatus {
    match e {
        GeomError::DimensionMismatch { .. } => MvStatus::DimensionMismatch,
        GeomError::InvalidParameter(_) => MvStatus::InvalidParameter,
        GeomError::DegenerateHull(_) => MvStatus::DegenerateHull,
        GeomError::Lp(_) => MvStatus::LpFailure,
        GeomError::IllConditioned(_) => MvStatus::IllConditioned,
        GeomError::NoConvergence(_) => MvStatus::NoConvergence,
        GeomError::Precondition(_) => MvStatus::Precondition,
        GeomError::Json(_) => MvStatus::Json,
    }
}

enum Fail {
    Geom(GeomError),
    Null,
    Utf8,
}

impl From<GeomError> for Fail {
    fn from(e: GeomError) -> Self {
        Fail::Geom(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> MvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            MvStatus::Ok
        }
        Ok(Err(Fail::Geom(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null)) => {
            set_error("null pointer argument".into());
            MvStatus::NullPointer
        }
        Ok(Err(Fail::Utf8)) => {
            set_error("string is not valid UTF-8".into());
            MvStatus::InvalidUtf8
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            MvStatus::Panic
        }
    }
}

unsafe fn body<'a>(p: *const MvPolytope) -> Result<&'a ConvexPolytope, Fail> {
    p.as_ref().map(|h| &h.inner).ok_or(Fail::Null)
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null);
    }
    out.write(v);
    Ok(())
}

fn boxed(p: ConvexPolytope) -> *mut MvPolytope {
    Box::into_raw(Box::new(MvPolytope { inner: p }))
}

/// Copy the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn mv_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = e.len().min(len - 1);
            std::ptr::copy_nonoverlapping(e.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        e.len()
    })
}

/// Build a polytope from `n_points` points of dimension `dim`, stored row-major in `coords`.
///
/// # Safety
/// `coords` must hold `dim * n_points` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mv_polytope_new(
    dim: usize,
    coords: *const f64,
    n_points: usize,
    out: *mut *mut MvPolytope,
) -> MvStatus {
    guard(|| {
        if coords.is_null() || out.is_null() {
            return Err(Fail::Null);
        }
        let flat = std::slice::from_raw_parts(coords, dim.saturating_mul(n_points));
        let pts = if dim == 0 { Vec::new() } else { flat.chunks(dim).map(<[f64]>::to_vec).collect() };
        let p = ConvexPolytope::new(dim, pts)?;
        put(out, boxed(p))
    })
}

/// Build a polytope from its JSON form `{"dim": n, "vertices": [[...], ...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mv_polytope_from_json(json: *const c_char, out: *mut *mut MvPolytope) -> MvStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return Err(Fail::Null);
        }
        let s = CStr::from_ptr(json).to_str().map_err(|_| Fail::Utf8)?;
        put(out, boxed(ConvexPolytope::from_json(s)?))
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `p` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mv_polytope_free(p: *mut MvPolytope) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Ambient dimension, or 0 for null.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mv_polytope_dim(p: *const MvPolytope) -> usize {
    p.as_ref().map_or(0, |h| h.inner.dim())
}

/// Number of vertices, or 0 for null.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mv_polytope_vertex_count(p: *const MvPolytope) -> usize {
    p.as_ref().map_or(0, |h| h.inner.vertices().len())
}

/// Copy vertex `i` into `out` (length `dim`).
///
/// # Safety
/// `p` must be a live handle and `out` valid for `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn mv_polytope_vertex(p: *const MvPolytope, i: usize, out: *mut f64) -> MvStatus {
    guard(|| {
        let k = body(p)?;
        if out.is_null() {
            return Err(Fail::Null);
        }
        let v = k.vertices().get(i).ok_or_else(|| {
            GeomError::InvalidParameter(format!("vertex index {i} out of range"))
        })?;
        std::ptr::copy_nonoverlapping(v.as_ptr(), out, v.len());
        Ok(())
    })
}

/// n-dimensional volume.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mv_volume(p: *const MvPolytope, out: *mut f64) -> MvStatus {
    guard(|| {
        let k = body(p)?;
        put(out, functionals::volume(k))
    })
}

/// Surface area (zero below full dimension).
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mv_surface_area(p: *const MvPolytope, out: *mut f64) -> MvStatus {
    guard(|| {
        let k = body(p)?;
        put(out, functionals::surface_area(k)?)
    })
}

/// First intrinsic volume.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mv_v1(p: *const MvPolytope, out: *mut f64) -> MvStatus {
    guard(|| {
        let k = body(p)?;
        put(out, functionals::v1(k)?)
    })
}

/// Radius of the smallest enclosing ball.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mv_circumradius(p: *const MvPolytope, out: *mut f64) -> MvStatus {
    guard(|| {
        let k = body(p)?;
        put(out, functionals::circumradius(k))
    })
}

/// Largest vertex distance.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mv_diameter(p: *const MvPolytope, out: *mut f64) -> MvStatus {
    guard(|| {
        let k = body(p)?;
        put(out, functionals::diameter(k))
    })
}

/// Mixed volume V(K, M, ..., M).
///
/// # Safety
/// `k`, `m` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mv_mixed_volume(k: *const MvPolytope, m: *const MvPolytope, out: *mut f64) -> MvStatus {
    guard(|| {
        let v = functionals::mixed_volume_1(body(k)?, body(m)?)?;
        put(out, v)
    })
}

/// Evaluate one inequality. `m` may be null for the single-body checks.
///
/// # Safety
/// `k` must be a live handle, `m` null or live, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mv_check(
    which: MvCheck,
    k: *const MvPolytope,
    m: *const MvPolytope,
    tolerance: f64,
    out: *mut MvCheckResult,
) -> MvStatus {
    guard(|| {
        let k = body(k)?;
        let rep = match which {
            MvCheck::Minkowski => inequalities::check_minkowski(k, body(m)?, tolerance)?,
            MvCheck::BetkeWeil => inequalities::check_betke_weil(k, body(m)?, tolerance)?,
            MvCheck::BetkeWeilSelf => inequalities::check_betke_weil_self(k, tolerance)?,
            MvCheck::ReverseMinkowski => inequalities::check_reverse_minkowski(k, body(m)?, tolerance)?,
            MvCheck::Linhart => inequalities::check_linhart(k, tolerance)?,
        };
        put(
            out,
            MvCheckResult {
                lhs: rep.lhs,
                rhs: rep.rhs,
                deficit: rep.deficit,
                tolerance: rep.tolerance,
                satisfied: rep.satisfied,
                equality_witness: rep.equality_witness.is_some(),
            },
        )
    })
}
