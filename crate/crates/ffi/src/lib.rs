//! C ABI over the spinfact library.
//!
//! Objects are exposed as opaque handles created by `*_new` functions and
//! released with the matching `*_free`. Every fallible call returns a
//! [`SpinfactStatus`]; on failure the message is available from
//! [`spinfact_last_error`]. Strings returned through out-parameters are owned
//! by the caller and released with [`spinfact_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use spinfact::factor::{FactorOptions, Factorization, Factorizer};
use spinfact::lie::{LieAlgebraModel, Mode};
use spinfact::pauli::schedule;
use spinfact::report::{to_json, AlgebraReport};
use spinfact::vqe::config::VqeConfig;
use spinfact::{Error, Family};

/// Result of a fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinfactStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Numerical = 4,
    NotConverged = 5,
    Io = 6,
    Panic = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SpinfactStatus {
    match e {
        Error::Invalid(_) => SpinfactStatus::InvalidArgument,
        Error::Parse { .. } | Error::Json(_) => SpinfactStatus::Parse,
        Error::Numerical(_) => SpinfactStatus::Numerical,
        Error::NotConverged { .. } => SpinfactStatus::NotConverged,
        Error::Io(_) => SpinfactStatus::Io,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SpinfactStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SpinfactStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            SpinfactStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            SpinfactStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Lib(Error::invalid(format!("{what} is not valid UTF-8"))))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(value);
    Ok(())
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn spinfact_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy of the calling thread's most recent error message, or NULL if none.
/// Release with `spinfact_string_free`.
#[no_mangle]
pub extern "C" fn spinfact_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spinfact_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// A generator algebra with its structure constants.
pub struct SpinfactAlgebra {
    model: LieAlgebraModel,
}

/// Builds the algebra of a family (`"s2-iiab"`, `"s2-ijaa"`, `"s4-singlet"`,
/// `"s4-triplet"`) in `"appendix"` or `"discovery"` mode.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spinfact_algebra_new(
    family: *const c_char,
    mode: *const c_char,
    out: *mut *mut SpinfactAlgebra,
) -> SpinfactStatus {
    guard(|| {
        let family: Family = str_arg(family, "family")?.parse()?;
        let mode: Mode = str_arg(mode, "mode")?.parse()?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let model = LieAlgebraModel::for_family(family, mode)?;
        put(out, Box::into_raw(Box::new(SpinfactAlgebra { model })), "out")
    })
}

/// # Safety
/// `alg` must be NULL or a handle from `spinfact_algebra_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spinfact_algebra_free(alg: *mut SpinfactAlgebra) {
    if !alg.is_null() {
        drop(Box::from_raw(alg));
    }
}

/// Writes the dimensions of the algebra, its center and its derived algebra.
///
/// # Safety
/// `alg` must be a live handle; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn spinfact_algebra_dimensions(
    alg: *const SpinfactAlgebra,
    dimension: *mut usize,
    center: *mut usize,
    derived: *mut usize,
) -> SpinfactStatus {
    guard(|| {
        let m = &ref_arg(alg, "algebra")?.model;
        put(dimension, m.dim(), "dimension")?;
        put(center, m.center().ncols(), "center")?;
        put(derived, m.derived().ncols(), "derived")
    })
}

/// Full structure report as JSON.
///
/// # Safety
/// `alg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spinfact_algebra_to_json(alg: *const SpinfactAlgebra, seed: u64, out: *mut *mut c_char) -> SpinfactStatus {
    guard(|| {
        let m = &ref_arg(alg, "algebra")?.model;
        let json = to_json(&AlgebraReport::from_model(m, seed)?)?;
        put(out, c_string(json), "out")
    })
}

/// Solver for exact product factorizations of one family's generator.
pub struct SpinfactFactorizer {
    inner: Factorizer,
}

/// A solved factorization.
pub struct SpinfactFactorization {
    inner: Factorization,
}

/// # Safety
/// `family` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spinfact_factorizer_new(family: *const c_char, out: *mut *mut SpinfactFactorizer) -> SpinfactStatus {
    guard(|| {
        let family: Family = str_arg(family, "family")?.parse()?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let inner = Factorizer::new(family)?;
        put(out, Box::into_raw(Box::new(SpinfactFactorizer { inner })), "out")
    })
}

/// # Safety
/// `fz` must be NULL or a live factorizer handle.
#[no_mangle]
pub unsafe extern "C" fn spinfact_factorizer_free(fz: *mut SpinfactFactorizer) {
    if !fz.is_null() {
        drop(Box::from_raw(fz));
    }
}

/// Number of factors in the product (central plus semisimple).
///
/// # Safety
/// `fz` must be a live handle; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spinfact_factorizer_factor_count(fz: *const SpinfactFactorizer, count: *mut usize) -> SpinfactStatus {
    guard(|| {
        let f = &ref_arg(fz, "factorizer")?.inner;
        put(count, f.center.len() + f.semisimple.len(), "count")
    })
}

/// Solves `exp(θG) = Π exp(t_k A_k)` with the default options and the given seed.
///
/// # Safety
/// `fz` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spinfact_factorize(
    fz: *const SpinfactFactorizer,
    theta: f64,
    seed: u64,
    out: *mut *mut SpinfactFactorization,
) -> SpinfactStatus {
    guard(|| {
        let f = &ref_arg(fz, "factorizer")?.inner;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        if !theta.is_finite() {
            return Err(Error::invalid("theta must be finite").into());
        }
        let inner = f.factorize(theta, &FactorOptions { seed, ..Default::default() })?;
        put(out, Box::into_raw(Box::new(SpinfactFactorization { inner })), "out")
    })
}

/// # Safety
/// `fac` must be NULL or a live factorization handle.
#[no_mangle]
pub unsafe extern "C" fn spinfact_factorization_free(fac: *mut SpinfactFactorization) {
    if !fac.is_null() {
        drop(Box::from_raw(fac));
    }
}

/// Optimizer cost and end-to-end Fock-space error of a factorization.
///
/// # Safety
/// `fac` must be a live handle; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn spinfact_factorization_residuals(
    fac: *const SpinfactFactorization,
    cost: *mut f64,
    fock: *mut f64,
) -> SpinfactStatus {
    guard(|| {
        let f = &ref_arg(fac, "factorization")?.inner;
        put(cost, f.cost_residual, "cost")?;
        put(fock, f.fock_residual, "fock")
    })
}

/// Copies up to `len` factor angles, central factors first, into `angles`;
/// writes the total count to `count`. Pass `len = 0` to query the count.
///
/// # Safety
/// `fac` must be a live handle; `angles` must hold `len` doubles; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spinfact_factorization_angles(
    fac: *const SpinfactFactorization,
    angles: *mut f64,
    len: usize,
    count: *mut usize,
) -> SpinfactStatus {
    guard(|| {
        let f = &ref_arg(fac, "factorization")?.inner;
        let all: Vec<f64> = f.central.iter().map(|c| c.angle).chain(f.semisimple.iter().map(|s| s.t)).collect();
        if len > 0 {
            if angles.is_null() {
                return Err(Failure::Null("angles"));
            }
            let n = len.min(all.len());
            ptr::copy_nonoverlapping(all.as_ptr(), angles, n);
        }
        put(count, all.len(), "count")
    })
}

/// Factorization as JSON.
///
/// # Safety
/// `fac` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spinfact_factorization_to_json(fac: *const SpinfactFactorization, out: *mut *mut c_char) -> SpinfactStatus {
    guard(|| {
        let f = &ref_arg(fac, "factorization")?.inner;
        put(out, c_string(to_json(f)?), "out")
    })
}

/// Pauli rotation schedule of a factorization as JSON, plus its distinct string count.
///
/// # Safety
/// Handles must be live and from the same family; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn spinfact_schedule_json(
    fz: *const SpinfactFactorizer,
    fac: *const SpinfactFactorization,
    total_strings: *mut usize,
    out: *mut *mut c_char,
) -> SpinfactStatus {
    guard(|| {
        let f = &ref_arg(fz, "factorizer")?.inner;
        let r = &ref_arg(fac, "factorization")?.inner;
        if f.family != r.family {
            return Err(Error::invalid(format!("factorization is for {}, factorizer for {}", r.family, f.family)).into());
        }
        let s = schedule(f, r)?;
        put(total_strings, s.total_strings, "total_strings")?;
        put(out, c_string(to_json(&s)?), "out")
    })
}

/// Runs adaptive VQE from a JSON configuration and returns the run record as JSON.
/// Returns `SPINFACT_STATUS_NOT_CONVERGED` (with the record still written) if the
/// gradient threshold was not reached.
///
/// # Safety
/// `config_json` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spinfact_vqe_run_json(config_json: *const c_char, out: *mut *mut c_char) -> SpinfactStatus {
    let mut converged = true;
    let status = guard(|| {
        let cfg: VqeConfig = serde_json::from_str(str_arg(config_json, "config_json")?).map_err(Error::from)?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let run = cfg.problem()?.run(cfg.pool, &cfg.adapt_options())?;
        converged = run.converged;
        put(out, c_string(to_json(&run)?), "out")
    });
    if status == SpinfactStatus::Ok && !converged {
        set_error("adaptive VQE did not reach the gradient threshold".into());
        return SpinfactStatus::NotConverged;
    }
    status
}
