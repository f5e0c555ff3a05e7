//! C ABI over `ballspace`. Series and certificates are opaque handles
//! owned by the caller and released with their `_free` function. Every
//! call returns a [`BsStatus`]; on failure the message is available from
//! [`bs_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ballspace::counterexample::{build_certificate, verify_certificate, Certificate, CertificateConfig};
use ballspace::kernel::{drewnowski_integral, kernel_coeffs, nawrocki_search, KernelParams, SearchBudget};
use ballspace::numerics::RadialSeries;
use ballspace::quadrature::QuadratureSpec;
use ballspace::spaces::{MultiIndex, SpaceSpec};
use ballspace::toeplitz::{apply_toeplitz, solve_toeplitz_disk};
use ballspace::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BsStatus {
    Ok = 0,
    CheckFailed = 1,
    NullPointer = 2,
    InvalidArgument = 3,
    NonConvergence = 4,
    BudgetExceeded = 5,
    ParseError = 6,
    IoError = 7,
    Panic = 8,
}

pub struct BsSeries(RadialSeries);

pub struct BsCertificate(Certificate);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> BsStatus {
    match e {
        Error::NonConvergence { .. } => BsStatus::NonConvergence,
        Error::BudgetExceeded { .. } | Error::TruncationBudget { .. } => BsStatus::BudgetExceeded,
        Error::Verification(_) => BsStatus::CheckFailed,
        Error::Parse(_) | Error::Json(_) => BsStatus::ParseError,
        Error::Io(_) => BsStatus::IoError,
        _ => BsStatus::InvalidArgument,
    }
}

struct Fail(BsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> BsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BsStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".to_string());
            BsStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(BsStatus::NullPointer, format!("{what} is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(BsStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

fn space_arg(s: &str) -> Result<SpaceSpec, Fail> {
    Ok(s.parse::<SpaceSpec>()?)
}

/// Message of the last failed call on this thread, or null. The caller
/// frees it with [`bs_string_free`].
#[no_mangle]
pub extern "C" fn bs_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn bs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Squared norm of `z^alpha` in `space` (`"ball:<d>"` or `"disk:<n>"`),
/// as a natural log.
///
/// # Safety
/// `space` must be a C string, `alpha` must point to `len` values and
/// `out_logmag` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bs_norm_sq(
    space: *const c_char,
    alpha: *const u32,
    len: usize,
    out_logmag: *mut f64,
) -> BsStatus {
    guard(|| {
        let space = space_arg(str_arg(space, "space")?)?;
        if alpha.is_null() {
            return Err(null("alpha"));
        }
        let alpha = std::slice::from_raw_parts(alpha, len).to_vec();
        let w = space.monomial_norm_sq(&MultiIndex::new(alpha)?)?;
        write_out(out_logmag, w.logmag(), "out_logmag")
    })
}

/// # Safety
/// `values` must point to `len` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bs_series_from_values(
    values: *const f64,
    len: usize,
    out: *mut *mut BsSeries,
) -> BsStatus {
    guard(|| {
        if values.is_null() || len == 0 {
            return Err(Fail(BsStatus::InvalidArgument, "need at least one value".into()));
        }
        let s = RadialSeries::from_f64s(std::slice::from_raw_parts(values, len));
        write_out(out, Box::into_raw(Box::new(BsSeries(s))), "out")
    })
}

/// Parses the `k,sign,logmag` CSV form.
///
/// # Safety
/// `csv` must be a C string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bs_series_from_csv(csv: *const c_char, out: *mut *mut BsSeries) -> BsStatus {
    guard(|| {
        let text = str_arg(csv, "csv")?;
        let s = RadialSeries::read_csv(text.as_bytes())?;
        write_out(out, Box::into_raw(Box::new(BsSeries(s))), "out")
    })
}

/// Number of stored coefficients (truncation degree plus one), or 0 for
/// a null handle.
///
/// # Safety
/// `s` must be null or a live series handle.
#[no_mangle]
pub unsafe extern "C" fn bs_series_len(s: *const BsSeries) -> usize {
    s.as_ref().map_or(0, |s| s.0.trunc_degree() + 1)
}

/// Coefficient `k` as a sign in `{-1, 0, 1}` and a natural-log magnitude.
///
/// # Safety
/// `s` must be a live series handle and both outputs writable.
#[no_mangle]
pub unsafe extern "C" fn bs_series_get(
    s: *const BsSeries,
    k: usize,
    out_sign: *mut i8,
    out_logmag: *mut f64,
) -> BsStatus {
    guard(|| {
        let s = borrow(s, "series")?;
        if k > s.0.trunc_degree() {
            return Err(Fail(
                BsStatus::InvalidArgument,
                format!("degree {k} is beyond the truncation {}", s.0.trunc_degree()),
            ));
        }
        let c = s.0.coeff(k);
        write_out(out_sign, c.sign(), "out_sign")?;
        write_out(out_logmag, c.logmag(), "out_logmag")
    })
}

/// CSV form of a series, freed with [`bs_string_free`]; null on error.
///
/// # Safety
/// `s` must be null or a live series handle.
#[no_mangle]
pub unsafe extern "C" fn bs_series_to_csv(s: *const BsSeries) -> *mut c_char {
    match s.as_ref() {
        Some(s) => owned_string(s.0.to_csv_string()),
        None => {
            set_error("series is null".to_string());
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `s` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn bs_series_free(s: *mut BsSeries) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Taylor coefficients of `F_{c, r e_1}` in `z_1` up to degree `n`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bs_kernel_coeffs(d: u32, c: f64, r: f64, n: usize, out: *mut *mut BsSeries) -> BsStatus {
    guard(|| {
        let p = KernelParams::new(d, c, r)?;
        let s = kernel_coeffs(&p, n);
        write_out(out, Box::into_raw(Box::new(BsSeries(s))), "out")
    })
}

/// `∫ log(1 + c|F|) dσ` with relative tolerance `tol`.
///
/// # Safety
/// Both outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn bs_drewnowski(
    d: u32,
    c: f64,
    r: f64,
    tol: f64,
    out_value: *mut f64,
    out_error: *mut f64,
) -> BsStatus {
    guard(|| {
        let p = KernelParams::new(d, c, r)?;
        let quad = QuadratureSpec {
            tolerance: tol,
            ..QuadratureSpec::default()
        };
        quad.validate()?;
        let est = drewnowski_integral(&p, &quad)?;
        write_out(out_value, est.value, "out_value")?;
        write_out(out_error, est.est_error, "out_error")
    })
}

/// The radius maximizing the normalized `i`-th kernel coefficient.
///
/// # Safety
/// Both outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn bs_nawrocki(
    d: u32,
    c: f64,
    i: u64,
    out_r_star: *mut f64,
    out_log_value: *mut f64,
) -> BsStatus {
    guard(|| {
        let found = nawrocki_search(d, c, i, &SearchBudget::default())?;
        write_out(out_r_star, found.r_star, "out_r_star")?;
        write_out(out_log_value, found.log_value, "out_log_value")
    })
}

/// `T_{m̄} g` on a one-variable space.
///
/// # Safety
/// `space` must be a C string, `m` and `g` live handles, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bs_toeplitz_apply(
    space: *const c_char,
    m: *const BsSeries,
    g: *const BsSeries,
    out: *mut *mut BsSeries,
) -> BsStatus {
    guard(|| {
        let space = space_arg(str_arg(space, "space")?)?;
        let m = borrow(m, "symbol")?;
        let g = borrow(g, "series")?;
        let t = apply_toeplitz(&m.0, &g.0, &space);
        write_out(out, Box::into_raw(Box::new(BsSeries(t))), "out")
    })
}

/// Solves `T_{m̄} g = f` up to degree `n` on a one-variable space.
///
/// # Safety
/// `space` must be a C string, `m` and `f` live handles, outputs writable.
#[no_mangle]
pub unsafe extern "C" fn bs_toeplitz_solve(
    space: *const c_char,
    m: *const BsSeries,
    f: *const BsSeries,
    n: usize,
    out: *mut *mut BsSeries,
    out_residual: *mut f64,
) -> BsStatus {
    guard(|| {
        let space = space_arg(str_arg(space, "space")?)?;
        let m = borrow(m, "symbol")?;
        let f = borrow(f, "series")?;
        let sol = solve_toeplitz_disk(&m.0, &f.0, &space, n)?;
        write_out(out_residual, sol.residual, "out_residual")?;
        write_out(out, Box::into_raw(Box::new(BsSeries(sol.g))), "out")
    })
}

/// Builds a certificate from a TOML config (null for the defaults).
///
/// # Safety
/// `config_toml` must be null or a C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bs_certificate_build(
    config_toml: *const c_char,
    out: *mut *mut BsCertificate,
) -> BsStatus {
    guard(|| {
        let cfg = if config_toml.is_null() {
            CertificateConfig::default()
        } else {
            CertificateConfig::from_toml_str(str_arg(config_toml, "config_toml")?)?
        };
        let cert = build_certificate(&cfg)?;
        write_out(out, Box::into_raw(Box::new(BsCertificate(cert))), "out")
    })
}

/// # Safety
/// `json` must be a C string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bs_certificate_from_json(
    json: *const c_char,
    out: *mut *mut BsCertificate,
) -> BsStatus {
    guard(|| {
        let cert = Certificate::from_json(str_arg(json, "json")?)?;
        write_out(out, Box::into_raw(Box::new(BsCertificate(cert))), "out")
    })
}

/// JSON form, freed with [`bs_string_free`]; null on error.
///
/// # Safety
/// `cert` must be null or a live certificate handle.
#[no_mangle]
pub unsafe extern "C" fn bs_certificate_to_json(cert: *const BsCertificate) -> *mut c_char {
    let Some(cert) = cert.as_ref() else {
        set_error("certificate is null".to_string());
        return ptr::null_mut();
    };
    match cert.0.to_json() {
        Ok(s) => owned_string(s),
        Err(e) => {
            set_error(e.to_string());
            ptr::null_mut()
        }
    }
}

/// Number of levels, or 0 for a null handle.
///
/// # Safety
/// `cert` must be null or a live certificate handle.
#[no_mangle]
pub unsafe extern "C" fn bs_certificate_levels(cert: *const BsCertificate) -> usize {
    cert.as_ref().map_or(0, |c| c.0.levels.len())
}

/// Recomputes every inequality. Returns `CheckFailed` with the failed
/// checks in [`bs_last_error`] when any of them does not hold.
///
/// # Safety
/// `cert` must be a live certificate handle.
#[no_mangle]
pub unsafe extern "C" fn bs_certificate_verify(cert: *const BsCertificate) -> BsStatus {
    guard(|| {
        let cert = borrow(cert, "certificate")?;
        verify_certificate(&cert.0)?.into_result()?;
        Ok(())
    })
}

/// # Safety
/// `cert` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn bs_certificate_free(cert: *mut BsCertificate) {
    if !cert.is_null() {
        drop(Box::from_raw(cert));
    }
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn bs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
