//! C ABI for `qmf-core`.
//!
//! Objects cross the boundary as opaque handles created by `qmf_*_new`/`parse`
//! functions and released by the matching `qmf_*_free`. Every fallible call
//! returns a [`QmfStatus`]; on failure `qmf_last_error` describes the cause.
//! Output pointers are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qmf_core::disorder::{sample_fields, FieldDistribution};
use qmf_core::exact_thermo::{model_pressure, Route};
use qmf_core::hamiltonian::ModelSpec;
use qmf_core::spin_algebra::{block_degeneracy, symbol_eval, PolynomialSymbol, TwoJ};
use qmf_core::varform::{
    deterministic_pressure, legendre_transform, variational_pressure, ConvexPotential,
    LambdaEvaluator, LambdaMethod, OptimizerOptions,
};
use qmf_core::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QmfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    SizeLimit = 3,
    Domain = 4,
    InvalidDistribution = 5,
    Parse = 6,
    NotHermitian = 7,
    DimensionMismatch = 8,
    QuadratureInadequate = 9,
    NonConvergence = 10,
    ContractViolation = 11,
    Config = 12,
    Io = 13,
    Panic = 14,
}

impl From<&Error> for QmfStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidArgument(_) => QmfStatus::InvalidArgument,
            Error::SizeLimit { .. } => QmfStatus::SizeLimit,
            Error::Domain(_) => QmfStatus::Domain,
            Error::InvalidDistribution(_) => QmfStatus::InvalidDistribution,
            Error::Parse { .. } => QmfStatus::Parse,
            Error::NotHermitian { .. } => QmfStatus::NotHermitian,
            Error::DimensionMismatch { .. } => QmfStatus::DimensionMismatch,
            Error::QuadratureInadequate(_) => QmfStatus::QuadratureInadequate,
            Error::NonConvergence { .. } => QmfStatus::NonConvergence,
            Error::ContractViolation(_) => QmfStatus::ContractViolation,
            Error::Config(_) => QmfStatus::Config,
            Error::Io { .. } => QmfStatus::Io,
        }
    }
}

/// Polynomial symbol `V(m)`.
pub struct QmfSymbol(PolynomialSymbol);

/// Distribution of the site fields.
pub struct QmfDistribution(FieldDistribution);

/// `Lambda(h) = E log 2 cosh |h + b|` with cached nodes.
pub struct QmfLambda(LambdaEvaluator);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Failure {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QmfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QmfStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            QmfStatus::NullPointer
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            QmfStatus::from(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            QmfStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn vec3(p: *const f64, what: &'static str) -> Result<[f64; 3], Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok([*p, *p.add(1), *p.add(2)])
}

unsafe fn write3(p: *mut f64, v: [f64; 3]) {
    if !p.is_null() {
        for (i, x) in v.iter().enumerate() {
            *p.add(i) = *x;
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Core(Error::InvalidArgument(format!("{what} is not UTF-8"))))
}

fn json_err(e: serde_json::Error) -> Failure {
    Failure::Core(Error::Config(e.to_string()))
}

/// Message of the last failure on this thread. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn qmf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn qmf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a symbol such as `"z^2; -0.5*x*y"`.
///
/// # Safety
/// `src` must be a NUL-terminated string and `result` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qmf_symbol_parse(src: *const c_char, result: *mut *mut QmfSymbol) -> QmfStatus {
    guard(|| {
        let s = text(src, "src")?;
        let slot = out(result, "result")?;
        let p: PolynomialSymbol = s.parse()?;
        *slot = Box::into_raw(Box::new(QmfSymbol(p)));
        Ok(())
    })
}

/// # Safety
/// `symbol` must come from `qmf_symbol_parse` and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qmf_symbol_free(symbol: *mut QmfSymbol) {
    if !symbol.is_null() {
        drop(Box::from_raw(symbol));
    }
}

/// `V(m)` for `|m| <= 1`.
///
/// # Safety
/// `m` points to three doubles; `value` is writable.
#[no_mangle]
pub unsafe extern "C" fn qmf_symbol_eval(symbol: *const QmfSymbol, m: *const f64, value: *mut f64) -> QmfStatus {
    guard(|| {
        let p = get(symbol, "symbol")?;
        let m = vec3(m, "m")?;
        let v = out(value, "value")?;
        *v = symbol_eval(&p.0, m)?;
        Ok(())
    })
}

/// Reads a distribution from JSON, e.g. `{"kind":"gaussian","mean":[0,0,0],"sigma":1}`.
///
/// # Safety
/// `json` must be NUL-terminated and `result` valid.
#[no_mangle]
pub unsafe extern "C" fn qmf_distribution_from_json(
    json: *const c_char,
    result: *mut *mut QmfDistribution,
) -> QmfStatus {
    guard(|| {
        let s = text(json, "json")?;
        let slot = out(result, "result")?;
        let d: FieldDistribution = serde_json::from_str(s).map_err(json_err)?;
        d.validate()?;
        *slot = Box::into_raw(Box::new(QmfDistribution(d)));
        Ok(())
    })
}

/// # Safety
/// `dist` must come from `qmf_distribution_from_json`. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qmf_distribution_free(dist: *mut QmfDistribution) {
    if !dist.is_null() {
        drop(Box::from_raw(dist));
    }
}

/// Builds an evaluator; `method_json` may be null for the automatic method.
///
/// # Safety
/// Pointers must be valid; `method_json` NUL-terminated if non-null.
#[no_mangle]
pub unsafe extern "C" fn qmf_lambda_new(
    dist: *const QmfDistribution,
    method_json: *const c_char,
    result: *mut *mut QmfLambda,
) -> QmfStatus {
    guard(|| {
        let d = get(dist, "dist")?;
        let slot = out(result, "result")?;
        let method: LambdaMethod = if method_json.is_null() {
            LambdaMethod::Auto
        } else {
            serde_json::from_str(text(method_json, "method_json")?).map_err(json_err)?
        };
        *slot = Box::into_raw(Box::new(QmfLambda(LambdaEvaluator::new(&d.0, method)?)));
        Ok(())
    })
}

/// # Safety
/// `ev` must come from `qmf_lambda_new`. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qmf_lambda_free(ev: *mut QmfLambda) {
    if !ev.is_null() {
        drop(Box::from_raw(ev));
    }
}

/// `Lambda(h)`
///
/// # Safety
/// `h` points to three doubles; `value` is writable.
#[no_mangle]
pub unsafe extern "C" fn qmf_lambda_value(ev: *const QmfLambda, h: *const f64, value: *mut f64) -> QmfStatus {
    guard(|| {
        let ev = get(ev, "ev")?;
        let h = vec3(h, "h")?;
        *out(value, "value")? = ev.0.value(h);
        Ok(())
    })
}

/// `grad Lambda(h)` written to `gradient[0..3]`.
///
/// # Safety
/// `h` and `gradient` point to three doubles each.
#[no_mangle]
pub unsafe extern "C" fn qmf_lambda_gradient(ev: *const QmfLambda, h: *const f64, gradient: *mut f64) -> QmfStatus {
    guard(|| {
        let ev = get(ev, "ev")?;
        let h = vec3(h, "h")?;
        if gradient.is_null() {
            return Err(Failure::Null("gradient"));
        }
        write3(gradient, ev.0.gradient(h));
        Ok(())
    })
}

/// `Lambda*(m)` and, if `field` is non-null, the dual field `h(m)`.
///
/// # Safety
/// `m` points to three doubles, `value` is writable, `field` is null or holds three doubles.
#[no_mangle]
pub unsafe extern "C" fn qmf_lambda_star(
    ev: *const QmfLambda,
    m: *const f64,
    value: *mut f64,
    field: *mut f64,
) -> QmfStatus {
    guard(|| {
        let ev = get(ev, "ev")?;
        let m = vec3(m, "m")?;
        let v = out(value, "value")?;
        let s = legendre_transform(&ev.0, m)?;
        *v = s.lambda_star;
        write3(field, s.h);
        Ok(())
    })
}

/// `sup_{|m| <= 1} V(m) - Lambda*(m)` with default optimizer settings.
///
/// # Safety
/// `value` is writable; `maximizer` is null or holds three doubles.
#[no_mangle]
pub unsafe extern "C" fn qmf_variational_pressure(
    symbol: *const QmfSymbol,
    ev: *const QmfLambda,
    value: *mut f64,
    maximizer: *mut f64,
) -> QmfStatus {
    guard(|| {
        let p = get(symbol, "symbol")?;
        let ev = get(ev, "ev")?;
        let v = out(value, "value")?;
        let r = variational_pressure(&p.0, &ev.0, &OptimizerOptions::default())?;
        *v = r.value;
        write3(maximizer, r.maximizer);
        Ok(())
    })
}

/// `max_r I(r) + max_Omega V(r e(Omega))`
///
/// # Safety
/// `value` is writable; `maximizer` is null or holds three doubles.
#[no_mangle]
pub unsafe extern "C" fn qmf_deterministic_pressure(
    symbol: *const QmfSymbol,
    value: *mut f64,
    maximizer: *mut f64,
) -> QmfStatus {
    guard(|| {
        let p = get(symbol, "symbol")?;
        let v = out(value, "value")?;
        let r = deterministic_pressure(&p.0, &OptimizerOptions::default())?;
        *v = r.value;
        write3(maximizer, r.maximizer);
        Ok(())
    })
}

/// Exact `p_N` for fields sampled from `dist` with `seed`.
///
/// # Safety
/// Handles must be valid; `value` is writable.
#[no_mangle]
pub unsafe extern "C" fn qmf_finite_pressure(
    symbol: *const QmfSymbol,
    dist: *const QmfDistribution,
    n_sites: usize,
    seed: u64,
    value: *mut f64,
) -> QmfStatus {
    guard(|| {
        let p = get(symbol, "symbol")?;
        let d = get(dist, "dist")?;
        let v = out(value, "value")?;
        let fields = sample_fields(&d.0, n_sites, seed)?;
        *v = model_pressure(&ModelSpec::new(p.0.clone(), fields), Route::Sectors)?;
        Ok(())
    })
}

/// Multiplicity of spin `two_j / 2` in `N` spins one half.
///
/// # Safety
/// `count` is writable.
#[no_mangle]
pub unsafe extern "C" fn qmf_block_degeneracy(n_sites: usize, two_j: u32, count: *mut u64) -> QmfStatus {
    guard(|| {
        let c = out(count, "count")?;
        let m = block_degeneracy(n_sites, TwoJ(two_j))?;
        *c = u64::try_from(m).map_err(|_| Error::SizeLimit {
            what: "degeneracy",
            value: usize::MAX,
            limit: u64::MAX as usize,
        })?;
        Ok(())
    })
}
