//! C ABI over `pvcsp_core`.
//!
//! Objects are parsed from the text formats and handed out as opaque
//! pointers that must be released with the matching `*_free`. Every fallible
//! call returns a [`PvcspStatus`]; on failure the message is available from
//! [`pvcsp_last_error`] on the same thread until the next call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pvcsp_core::format::{as_frachom, parse_instance, parse_measure, parse_structure};
use pvcsp_core::oracle::{self, OracleClass};
use pvcsp_core::relax::{solve, Algorithm, Verdict};
use pvcsp_core::theory::{check_fractional_homomorphism, check_promise_fpol, PromiseFractionalPolymorphism};
use pvcsp_core::{Error, Instance, PromiseTemplate, ValuedStructure};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PvcspStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    /// Well-formed input the operation cannot accept (mismatched domains,
    /// unknown symbols, bad weights).
    Input = 4,
    Resource = 5,
    Invariant = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PvcspAlgorithm {
    Combined = 0,
    Blp = 1,
    Aip = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PvcspVerdict {
    Yes = 0,
    No = 1,
    /// Oracle only: neither side of the promise holds.
    Gap = 2,
}

pub struct PvcspStructure(ValuedStructure);
pub struct PvcspInstance(Instance);
pub struct PvcspMeasure(PromiseFractionalPolymorphism);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(PvcspStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse { .. } => PvcspStatus::Parse,
            Error::ResourceGuard { .. } => PvcspStatus::Resource,
            Error::Invariant(_) | Error::IndexMisalignment => PvcspStatus::Invariant,
            _ => PvcspStatus::Input,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(PvcspStatus::NullArgument, format!("`{what}` is null"))
}

/// Runs `f`, converting errors and panics into a status and the last error.
fn guarded(f: impl FnOnce() -> Result<(), Failure>) -> PvcspStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PvcspStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            PvcspStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(PvcspStatus::InvalidUtf8, format!("`{what}` is not valid UTF-8")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next `pvcsp_*` call on the same thread.
#[no_mangle]
pub extern "C" fn pvcsp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static, NUL-terminated crate version.
#[no_mangle]
pub extern "C" fn pvcsp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pvcsp_structure_parse(text: *const c_char, out: *mut *mut PvcspStructure) -> PvcspStatus {
    guarded(|| {
        let slot = self::out(out, "out")?;
        let s = parse_structure(self::text(text, "text")?)?;
        *slot = Box::into_raw(Box::new(PvcspStructure(s)));
        Ok(())
    })
}

/// # Safety
/// `s` must come from [`pvcsp_structure_parse`] and not be freed yet. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn pvcsp_structure_free(s: *mut PvcspStructure) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of domain elements, 0 for NULL.
///
/// # Safety
/// `s` must be NULL or a live structure handle.
#[no_mangle]
pub unsafe extern "C" fn pvcsp_structure_domain_size(s: *const PvcspStructure) -> usize {
    s.as_ref().map_or(0, |s| s.0.domain_size())
}

/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pvcsp_instance_parse(text: *const c_char, out: *mut *mut PvcspInstance) -> PvcspStatus {
    guarded(|| {
        let slot = self::out(out, "out")?;
        let i = parse_instance(self::text(text, "text")?)?;
        *slot = Box::into_raw(Box::new(PvcspInstance(i)));
        Ok(())
    })
}

/// # Safety
/// `i` must come from [`pvcsp_instance_parse`] and not be freed yet. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn pvcsp_instance_free(i: *mut PvcspInstance) {
    if !i.is_null() {
        drop(Box::from_raw(i));
    }
}

/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pvcsp_measure_parse(text: *const c_char, out: *mut *mut PvcspMeasure) -> PvcspStatus {
    guarded(|| {
        let slot = self::out(out, "out")?;
        let m = parse_measure(self::text(text, "text")?)?;
        *slot = Box::into_raw(Box::new(PvcspMeasure(m)));
        Ok(())
    })
}

/// # Safety
/// `m` must come from [`pvcsp_measure_parse`] and not be freed yet. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn pvcsp_measure_free(m: *mut PvcspMeasure) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Decides `instance` over `structure`; writes YES or NO.
///
/// # Safety
/// Handles must be live; `verdict` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pvcsp_solve(
    structure: *const PvcspStructure,
    instance: *const PvcspInstance,
    algorithm: PvcspAlgorithm,
    verdict: *mut PvcspVerdict,
) -> PvcspStatus {
    guarded(|| {
        let slot = out(verdict, "verdict")?;
        let delta = &deref(structure, "structure")?.0;
        let inst = &deref(instance, "instance")?.0;
        let algorithm = match algorithm {
            PvcspAlgorithm::Combined => Algorithm::Combined,
            PvcspAlgorithm::Blp => Algorithm::BlpOnly,
            PvcspAlgorithm::Aip => Algorithm::AipOnly,
        };
        *slot = match solve(algorithm, delta, inst)?.verdict {
            Verdict::Yes => PvcspVerdict::Yes,
            Verdict::No => PvcspVerdict::No,
        };
        Ok(())
    })
}

unsafe fn template(delta: *const PvcspStructure, gamma: *const PvcspStructure) -> Result<PromiseTemplate, Failure> {
    let delta = deref(delta, "delta")?.0.clone();
    Ok(match gamma.as_ref() {
        Some(g) => PromiseTemplate::new(delta, g.0.clone())?,
        None => PromiseTemplate::diagonal(delta),
    })
}

/// Brute-force classification; `gamma` may be NULL for `Γ = Δ`.
///
/// # Safety
/// `delta` and `instance` must be live handles, `gamma` live or NULL;
/// `verdict` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pvcsp_oracle(
    delta: *const PvcspStructure,
    gamma: *const PvcspStructure,
    instance: *const PvcspInstance,
    verdict: *mut PvcspVerdict,
) -> PvcspStatus {
    guarded(|| {
        let slot = out(verdict, "verdict")?;
        let tpl = template(delta, gamma)?;
        *slot = match oracle::pvcsp_oracle(&tpl, &deref(instance, "instance")?.0)? {
            OracleClass::Yes => PvcspVerdict::Yes,
            OracleClass::No => PvcspVerdict::No,
            OracleClass::Gap => PvcspVerdict::Gap,
        };
        Ok(())
    })
}

/// Checks the measure against `(delta, gamma)`: as a fractional
/// homomorphism when its arity is 1, as a polymorphism otherwise. `gamma`
/// may be NULL for `Γ = Δ`.
///
/// # Safety
/// `measure` and `delta` must be live handles, `gamma` live or NULL; `holds`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn pvcsp_check(
    measure: *const PvcspMeasure,
    delta: *const PvcspStructure,
    gamma: *const PvcspStructure,
    holds: *mut bool,
) -> PvcspStatus {
    guarded(|| {
        let slot = out(holds, "holds")?;
        let omega = &deref(measure, "measure")?.0;
        let tpl = template(delta, gamma)?;
        let outcome = if omega.arity == 1 {
            check_fractional_homomorphism(&as_frachom(omega)?, &tpl.delta, &tpl.gamma)?
        } else {
            check_promise_fpol(omega, &tpl)?
        };
        *slot = outcome.holds;
        Ok(())
    })
}
