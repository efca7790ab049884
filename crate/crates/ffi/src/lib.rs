//! C interface to the `fwl` laboratory.
//!
//! Objects are opaque handles created by `fwl_*_new` style functions and
//! released with the matching `fwl_*_free`. Every fallible call returns an
//! [`FwlStatus`]; on failure `fwl_last_error_message` describes the error
//! for the calling thread. Strings returned through out-parameters are
//! owned by the caller and freed with [`fwl_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fwl::convexfn::{canonicalize, PolyhedralFn};
use fwl::harness::{self, Config, RunOptions};
use fwl::measures::{WeightSpec, WeightedFunction};
use fwl::transform::{inf_conv, Perturbation};
use fwl::variation::{exact_first_variation, VariationOptions};
use fwl::Error;

/// Result of a call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FwlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    UnknownScenario = 4,
    PerturbationTooLarge = 5,
    DomainCollapsed = 6,
    Singular = 7,
    Numerical = 8,
    Io = 9,
    Panic = 10,
}

/// Both sides of the first-variation identity for one scenario.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct FwlVariation {
    pub lhs: f64,
    pub rhs_bulk: f64,
    pub rhs_boundary: f64,
    pub rhs_total: f64,
    pub abs_err: f64,
    pub pass: bool,
}

/// A polyhedral function of one variable with compact domain.
pub struct FwlPolyhedral(PolyhedralFn);

/// A perturbation `ζ`.
pub struct FwlPerturbation(Perturbation);

/// A set of scenarios.
pub struct FwlSuite(Config);

/// Output format for [`fwl_suite_run`], passed as its integer value.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FwlFormat {
    Csv = 0,
    Json = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FwlStatus {
    match e {
        Error::Config(_) | Error::Json(_) => FwlStatus::Config,
        Error::UnknownScenario(_) => FwlStatus::UnknownScenario,
        Error::PerturbationTooLarge => FwlStatus::PerturbationTooLarge,
        Error::DomainCollapsed => FwlStatus::DomainCollapsed,
        Error::SingularBoundary | Error::SingularityHypothesis | Error::NonIntegrable(_) => FwlStatus::Singular,
        Error::EmptyGenerators
        | Error::UnboundedDomain(_)
        | Error::InvalidArgument(_)
        | Error::DimensionMismatch { .. }
        | Error::DegenerateBody(_)
        | Error::Unsupported(_) => FwlStatus::InvalidArgument,
        Error::Io(_) => FwlStatus::Io,
        _ => FwlStatus::Numerical,
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

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FwlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            FwlStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            FwlStatus::NullPointer
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
            set_error(format!("panic: {msg}"));
            FwlStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Lib(Error::InvalidArgument(format!("{what} is not UTF-8"))))
}

fn to_c(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure::Lib(Error::InvalidArgument("output contains a nul byte".into())))
}

fn weight(q: f64) -> fwl::Result<WeightSpec> {
    if q.is_nan() {
        Ok(WeightSpec::exp())
    } else {
        WeightSpec::exp_q(q)
    }
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next `fwl_*` call on the same thread.
#[no_mangle]
pub extern "C" fn fwl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn fwl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fwl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Lower convex envelope of the generators `(xs[i], zs[i])`.
///
/// # Safety
/// `xs` and `zs` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fwl_polyhedral_new(
    xs: *const f64,
    zs: *const f64,
    len: usize,
    out: *mut *mut FwlPolyhedral,
) -> FwlStatus {
    guard(|| {
        let out = self::out(out, "out")?;
        *out = ptr::null_mut();
        if len == 0 {
            return Err(Error::EmptyGenerators.into());
        }
        let (xs, zs) = (get(xs, "xs")?, get(zs, "zs")?);
        let xs = std::slice::from_raw_parts(xs, len);
        let zs = std::slice::from_raw_parts(zs, len);
        let pts: Vec<(f64, f64)> = xs.iter().copied().zip(zs.iter().copied()).collect();
        *out = Box::into_raw(Box::new(FwlPolyhedral(canonicalize(&pts)?)));
        Ok(())
    })
}

/// # Safety
/// `u` must come from this library and not have been freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn fwl_polyhedral_free(u: *mut FwlPolyhedral) {
    if !u.is_null() {
        drop(Box::from_raw(u));
    }
}

/// Endpoints of the domain.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fwl_polyhedral_domain(u: *const FwlPolyhedral, lo: *mut f64, hi: *mut f64) -> FwlStatus {
    guard(|| {
        let (a, b) = get(u, "u")?.0.domain();
        *out(lo, "lo")? = a;
        *out(hi, "hi")? = b;
        Ok(())
    })
}

/// `u(x)`, `+∞` outside the domain.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fwl_polyhedral_evaluate(u: *const FwlPolyhedral, x: f64, value: *mut f64) -> FwlStatus {
    guard(|| {
        *out(value, "value")? = get(u, "u")?.0.evaluate(x);
        Ok(())
    })
}

/// `u*(y)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fwl_polyhedral_conjugate(u: *const FwlPolyhedral, y: f64, value: *mut f64) -> FwlStatus {
    guard(|| {
        *out(value, "value")? = get(u, "u")?.0.conjugate().evaluate(y);
        Ok(())
    })
}

/// Infimal convolution `u □ v` as a new handle.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fwl_polyhedral_inf_conv(
    u: *const FwlPolyhedral,
    v: *const FwlPolyhedral,
    result: *mut *mut FwlPolyhedral,
) -> FwlStatus {
    guard(|| {
        let result = out(result, "out")?;
        *result = ptr::null_mut();
        let w = inf_conv(&get(u, "u")?.0, &get(v, "v")?.0);
        *result = Box::into_raw(Box::new(FwlPolyhedral(w)));
        Ok(())
    })
}

/// `μ_q(u) = ∫ e^{−u} |x|^{q−1} dx`; pass `q = NaN` for the plain volume.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fwl_polyhedral_measure(u: *const FwlPolyhedral, q: f64, value: *mut f64) -> FwlStatus {
    guard(|| {
        let u = get(u, "u")?;
        *out(value, "value")? = u.0.epigraph_measure(&weight(q)?)?.value;
        Ok(())
    })
}

/// Perturbation from its JSON form, e.g. `{"kind": "norm", "coeff": 1}`.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fwl_perturbation_from_json(
    json: *const c_char,
    result: *mut *mut FwlPerturbation,
) -> FwlStatus {
    guard(|| {
        let result = out(result, "out")?;
        *result = ptr::null_mut();
        let z: Perturbation = serde_json::from_str(text(json, "json")?).map_err(Error::from)?;
        *result = Box::into_raw(Box::new(FwlPerturbation(z)));
        Ok(())
    })
}

/// # Safety
/// `z` must come from this library and not have been freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn fwl_perturbation_free(z: *mut FwlPerturbation) {
    if !z.is_null() {
        drop(Box::from_raw(z));
    }
}

/// Finite-difference derivative of `t ↦ μ_q((u* + tζ)*)` at `0` against
/// the bulk + boundary formula, on the exact track. `q = NaN` selects the
/// plain volume.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fwl_first_variation(
    u: *const FwlPolyhedral,
    zeta: *const FwlPerturbation,
    q: f64,
    result: *mut FwlVariation,
) -> FwlStatus {
    guard(|| {
        let result = out(result, "out")?;
        let (u, z) = (get(u, "u")?, get(zeta, "zeta")?);
        let r = exact_first_variation("ffi", &u.0, &z.0, &weight(q)?, &VariationOptions::default())?;
        *result = FwlVariation {
            lhs: r.lhs,
            rhs_bulk: r.rhs_bulk,
            rhs_boundary: r.rhs_boundary,
            rhs_total: r.rhs_total,
            abs_err: r.abs_err,
            pass: r.pass,
        };
        Ok(())
    })
}

/// The built-in standard suite.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fwl_suite_standard(result: *mut *mut FwlSuite) -> FwlStatus {
    guard(|| {
        *out(result, "out")? = Box::into_raw(Box::new(FwlSuite(Config::standard())));
        Ok(())
    })
}

/// A suite parsed from a JSON document with a `scenarios` array.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fwl_suite_from_json(json: *const c_char, result: *mut *mut FwlSuite) -> FwlStatus {
    guard(|| {
        let result = out(result, "out")?;
        *result = ptr::null_mut();
        let c = Config::parse(text(json, "json")?)?;
        *result = Box::into_raw(Box::new(FwlSuite(c)));
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not have been freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn fwl_suite_free(s: *mut FwlSuite) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of scenarios in the suite.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fwl_suite_len(s: *const FwlSuite, len: *mut usize) -> FwlStatus {
    guard(|| {
        *out(len, "len")? = get(s, "suite")?.0.scenarios.len();
        Ok(())
    })
}

/// Runs one scenario (or all when `scenario` is null) and writes the
/// report to `*report`, to be freed with [`fwl_string_free`]. `*all_passed`
/// tells whether every record passed; a failing identity is not an error.
///
/// # Safety
/// Pointers must be valid; `scenario` may be null.
#[no_mangle]
pub unsafe extern "C" fn fwl_suite_run(
    s: *const FwlSuite,
    scenario: *const c_char,
    seed: u64,
    format: u32,
    report: *mut *mut c_char,
    all_passed: *mut bool,
) -> FwlStatus {
    guard(|| {
        let report = out(report, "report")?;
        *report = ptr::null_mut();
        let all_passed = out(all_passed, "all_passed")?;
        let suite = &get(s, "suite")?.0;
        let names: Vec<String> = if scenario.is_null() {
            Vec::new()
        } else {
            vec![text(scenario, "scenario")?.to_string()]
        };
        let selected = suite.select(&names)?;
        let opts = RunOptions {
            seed,
            ..Default::default()
        };
        let records = harness::run_scenarios(&selected, &opts);
        let body = match format {
            f if f == FwlFormat::Csv as u32 => harness::reports_csv(&records)?,
            f if f == FwlFormat::Json as u32 => harness::reports_json(&records)?,
            f => return Err(Error::InvalidArgument(format!("unknown format {f}")).into()),
        };
        *all_passed = records.iter().all(|r| r.passed());
        *report = to_c(body)?;
        Ok(())
    })
}
