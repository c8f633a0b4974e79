//! C interface to `infprod`.
//!
//! Objects are opaque handles created by `*_new` / `*_from_json` and released
//! with the matching `*_free`. Every fallible call returns an
//! [`InfprodStatus`]; on failure [`infprod_last_error`] describes the cause.
//! Outputs are written only on success.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use infprod::betanum::{BetaNumber, NumerationSystem};
use infprod::classify::{classify, MatrixFamily};
use infprod::gibbs::{weak_gibbs_verdict, Witness};
use infprod::io::{parse_family, parse_system};
use infprod::matcore::{Mat2, Vec2};
use infprod::measure::{monte_carlo, BernoulliMeasure, McTarget};
use infprod::prodsim::{convergence_probe, ProbeConfig};
use infprod::scalar::{rational_from_f64, Rational};
use infprod::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfprodStatus {
    Ok = 0,
    NullPointer = 1,
    /// Malformed text, bad UTF-8 or invalid numbers.
    Parse = 2,
    /// Input rejected by a precondition of the operation.
    Precondition = 3,
    /// An internal consistency check failed.
    Internal = 4,
    /// A Rust panic was caught at the boundary.
    Panic = 5,
}

/// A matrix family with its starting vector, in exact rationals.
pub struct InfprodFamily {
    family: MatrixFamily<Rational>,
}

/// A numeration system together with its Bernoulli measure.
pub struct InfprodSystem {
    measure: BernoulliMeasure,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct InfprodEstimate {
    pub value: f64,
    pub std_error: f64,
}

pub const INFPROD_WITNESS_A: u32 = 1;
pub const INFPROD_WITNESS_B: u32 = 2;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(InfprodStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse { .. } => InfprodStatus::Parse,
            _ if e.is_internal() => InfprodStatus::Internal,
            _ => InfprodStatus::Precondition,
        };
        Failure(status, e.to_string())
    }
}

fn precondition(e: impl Into<Error>) -> Failure {
    Failure::from(e.into())
}

fn null(what: &str) -> Failure {
    Failure(InfprodStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> InfprodStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => InfprodStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            InfprodStatus::Panic
        }
    }
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Failure(InfprodStatus::Parse, format!("{what}: {e}")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

fn exact(x: f64) -> Result<Rational, Failure> {
    rational_from_f64(x).ok_or_else(|| Failure(InfprodStatus::Parse, format!("{x} is not finite")))
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn infprod_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn infprod_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Family from row-major entries `a b c d` per matrix. Floats are converted
/// exactly.
#[no_mangle]
pub unsafe extern "C" fn infprod_family_new(
    entries: *const f64,
    count: usize,
    v1: f64,
    v2: f64,
    out_family: *mut *mut InfprodFamily,
) -> InfprodStatus {
    guard(|| {
        let out_family = out(out_family, "out_family")?;
        let e = slice(entries, 4 * count, "entries")?;
        let mut ms = Vec::with_capacity(count);
        for m in e.chunks_exact(4) {
            ms.push(Mat2::new(exact(m[0])?, exact(m[1])?, exact(m[2])?, exact(m[3])?).map_err(precondition)?);
        }
        let family = MatrixFamily::new(ms, Vec2::new(exact(v1)?, exact(v2)?)).map_err(precondition)?;
        *out_family = Box::into_raw(Box::new(InfprodFamily { family }));
        Ok(())
    })
}

/// Family from the JSON file format used by the command line tool.
#[no_mangle]
pub unsafe extern "C" fn infprod_family_from_json(json: *const c_char, out_family: *mut *mut InfprodFamily) -> InfprodStatus {
    guard(|| {
        let out_family = out(out_family, "out_family")?;
        let loaded = parse_family(text(json, "json")?, "json")?;
        *out_family = Box::into_raw(Box::new(InfprodFamily { family: loaded.family }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn infprod_family_free(family: *mut InfprodFamily) {
    if !family.is_null() {
        drop(Box::from_raw(family));
    }
}

/// Uniform-convergence verdict. Bit `k - 1` of `out_cases` is set when case
/// `k` holds.
#[no_mangle]
pub unsafe extern "C" fn infprod_classify(
    family: *const InfprodFamily,
    out_converges: *mut c_int,
    out_cases: *mut u32,
) -> InfprodStatus {
    guard(|| {
        let f = handle(family, "family")?;
        let (conv, cases) = (out(out_converges, "out_converges")?, out(out_cases, "out_cases")?);
        let v = classify(&f.family);
        *conv = c_int::from(v.converges);
        *cases = v.cases.iter().fold(0u32, |m, &c| m | 1 << (c - 1));
        Ok(())
    })
}

/// Numerical convergence probe; see the command line `probe` subcommand.
#[no_mangle]
pub unsafe extern "C" fn infprod_probe(
    family: *const InfprodFamily,
    depth: usize,
    samples: usize,
    seed: u64,
    threshold: f64,
    out_gap: *mut f64,
    out_converges: *mut c_int,
) -> InfprodStatus {
    guard(|| {
        let f = handle(family, "family")?;
        let (gap, conv) = (out(out_gap, "out_gap")?, out(out_converges, "out_converges")?);
        let cfg = ProbeConfig { depth, samples, seed, threshold };
        let r = convergence_probe(&f.family.to_f64(), &cfg).map_err(precondition)?;
        *gap = r.gap;
        *conv = c_int::from(r.converges);
        Ok(())
    })
}

/// System with base `x^2 = a x + b` and digit weights `num[i] / den[i]`
/// for the `a + 1` digits.
#[no_mangle]
pub unsafe extern "C" fn infprod_system_new(
    a: u32,
    b: u32,
    num: *const i64,
    den: *const i64,
    len: usize,
    out_system: *mut *mut InfprodSystem,
) -> InfprodStatus {
    guard(|| {
        let out_system = out(out_system, "out_system")?;
        let (n, d) = (slice(num, len, "num")?, slice(den, len, "den")?);
        let mut p = Vec::with_capacity(len);
        for (&n, &d) in n.iter().zip(d) {
            if d == 0 {
                return Err(Failure(InfprodStatus::Parse, "zero denominator".into()));
            }
            p.push(Rational::new(n.into(), d.into()));
        }
        let sys = NumerationSystem::new(a, b, p).map_err(precondition)?;
        let measure = BernoulliMeasure::new(sys).map_err(precondition)?;
        *out_system = Box::into_raw(Box::new(InfprodSystem { measure }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn infprod_system_from_json(json: *const c_char, out_system: *mut *mut InfprodSystem) -> InfprodStatus {
    guard(|| {
        let out_system = out(out_system, "out_system")?;
        let loaded = parse_system(text(json, "json")?, "json")?;
        let measure = BernoulliMeasure::new(loaded.system).map_err(precondition)?;
        *out_system = Box::into_raw(Box::new(InfprodSystem { measure }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn infprod_system_free(system: *mut InfprodSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Number of letters of the cylinder alphabet.
#[no_mangle]
pub unsafe extern "C" fn infprod_system_letters(system: *const InfprodSystem, out_letters: *mut usize) -> InfprodStatus {
    guard(|| {
        *out(out_letters, "out_letters")? = handle(system, "system")?.measure.system().letters();
        Ok(())
    })
}

/// `mu*` of the cylinder of `word`, from the exact matrix products.
#[no_mangle]
pub unsafe extern "C" fn infprod_cylinder_measure(
    system: *const InfprodSystem,
    word: *const usize,
    len: usize,
    out_value: *mut f64,
) -> InfprodStatus {
    guard(|| {
        let s = handle(system, "system")?;
        let value = out(out_value, "out_value")?;
        let w = slice(word, len, "word")?;
        *value = s.measure.cylinder_measure(w).map_err(precondition)?.value;
        Ok(())
    })
}

/// `mu_p([lo, hi])` (or `mu*` when `star` is nonzero). Endpoints are numbers
/// of the base field written like `"1/2"` or `"2-β"`.
#[no_mangle]
pub unsafe extern "C" fn infprod_interval_measure(
    system: *const InfprodSystem,
    lo: *const c_char,
    hi: *const c_char,
    star: c_int,
    tolerance: f64,
    out_estimate: *mut InfprodEstimate,
) -> InfprodStatus {
    guard(|| {
        let s = handle(system, "system")?;
        let est = out(out_estimate, "out_estimate")?;
        let base = s.measure.system().base();
        let lo = BetaNumber::parse(text(lo, "lo")?, base).map_err(precondition)?;
        let hi = BetaNumber::parse(text(hi, "hi")?, base).map_err(precondition)?;
        let r = if star != 0 {
            s.measure.mu_star(&lo, &hi, tolerance)
        } else {
            s.measure.mu_full_tol(&lo, &hi, tolerance)
        }
        .map_err(precondition)?;
        *est = InfprodEstimate { value: r.value, std_error: r.stderr };
        Ok(())
    })
}

/// Monte Carlo estimate of `mu_p([lo, hi])`, or of the fractional-part
/// measure when `fractional` is nonzero.
#[no_mangle]
pub unsafe extern "C" fn infprod_monte_carlo(
    system: *const InfprodSystem,
    lo: f64,
    hi: f64,
    samples: u64,
    seed: u64,
    fractional: c_int,
    out_estimate: *mut InfprodEstimate,
) -> InfprodStatus {
    guard(|| {
        let s = handle(system, "system")?;
        let est = out(out_estimate, "out_estimate")?;
        let target = if fractional != 0 { McTarget::Fractional } else { McTarget::Full };
        let r = monte_carlo(s.measure.system(), lo, hi, samples, seed, target).map_err(precondition)?;
        *est = InfprodEstimate { value: r.value, std_error: r.stderr };
        Ok(())
    })
}

/// Weak-Gibbs verdict from the two weight inequalities. `out_witnesses`
/// receives `INFPROD_WITNESS_A` / `INFPROD_WITNESS_B` bits.
#[no_mangle]
pub unsafe extern "C" fn infprod_weak_gibbs(
    system: *const InfprodSystem,
    out_weak_gibbs: *mut c_int,
    out_witnesses: *mut u32,
) -> InfprodStatus {
    guard(|| {
        let s = handle(system, "system")?;
        let (wg, wit) = (out(out_weak_gibbs, "out_weak_gibbs")?, out(out_witnesses, "out_witnesses")?);
        let v = weak_gibbs_verdict(s.measure.system());
        *wg = c_int::from(v.weak_gibbs);
        *wit = v.witnesses.iter().fold(0, |m, w| {
            m | match w {
                Witness::A { .. } => INFPROD_WITNESS_A,
                Witness::B { .. } => INFPROD_WITNESS_B,
            }
        });
        Ok(())
    })
}
