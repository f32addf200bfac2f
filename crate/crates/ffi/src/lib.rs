//! C interface to `ellsym2`.
//!
//! Every function returns an [`Ellsym2Status`]; results go through out
//! pointers. On failure a message is available from
//! [`ellsym2_last_error_message`] on the same thread. Strings handed out by
//! the library must be released with [`ellsym2_string_free`], contexts with
//! [`ellsym2_context_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ellsym2::elliptic_polylog::{
    eval_divisor, reg3_det, xi1, xi2, Coord, CurveContext, EllipticFn, TorsionPoint,
};
use ellsym2::eisenstein_kronecker::{k_ab, EKSeriesSpec};
use ellsym2::hecke_lseries::{f_qexp, g_qexp, l_chi4, l_g};
use ellsym2::suites::{Runner, Suite, SuiteConfig};
use ellsym2::{Complex, Error, PrecisionContext};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ellsym2Status {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Unsupported = 4,
    Convergence = 5,
    Io = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

pub const ELLSYM2_FN_L31: c_int = 0;
pub const ELLSYM2_FN_L32: c_int = 1;
pub const ELLSYM2_FN_DE: c_int = 2;
pub const ELLSYM2_FN_JE: c_int = 3;

pub const ELLSYM2_FORM_F: c_int = 0;
pub const ELLSYM2_FORM_G: c_int = 1;

/// Precision settings and the lattice `Zτ + Z` the elliptic functions live on.
pub struct Ellsym2Context {
    cc: CurveContext,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> Ellsym2Status {
    match e {
        Error::Parse(_) | Error::Precondition(_) => Ellsym2Status::InvalidArgument,
        Error::Domain(_) => Ellsym2Status::Domain,
        Error::Unsupported(_) => Ellsym2Status::Unsupported,
        Error::Convergence(_) => Ellsym2Status::Convergence,
        Error::Io(_) => Ellsym2Status::Io,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), (Ellsym2Status, String)>>(f: F) -> Ellsym2Status {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            Ellsym2Status::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&msg);
            Ellsym2Status::Panic
        }
    }
}

fn lib<T>(r: ellsym2::Result<T>) -> Result<T, (Ellsym2Status, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), (Ellsym2Status, String)> {
    if p.is_null() {
        Err((Ellsym2Status::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

fn invalid(msg: impl Into<String>) -> (Ellsym2Status, String) {
    (Ellsym2Status::InvalidArgument, msg.into())
}

fn elliptic_fn(code: c_int) -> Result<EllipticFn, (Ellsym2Status, String)> {
    match code {
        ELLSYM2_FN_L31 => Ok(EllipticFn::L31),
        ELLSYM2_FN_L32 => Ok(EllipticFn::L32),
        ELLSYM2_FN_DE => Ok(EllipticFn::De),
        ELLSYM2_FN_JE => Ok(EllipticFn::Je),
        other => Err(invalid(format!("unknown function code {other}"))),
    }
}

fn point(xi_num: i64, xi_den: i64, eta_num: i64, eta_den: i64) -> Result<TorsionPoint, (Ellsym2Status, String)> {
    lib(Coord::exact(xi_num, xi_den)
        .and_then(|xi| Ok((xi, Coord::exact(eta_num, eta_den)?)))
        .and_then(|(xi, eta)| TorsionPoint::new(xi, eta)))
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn ellsym2_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ellsym2_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Context for `τ = i` (the congruent number curves) at `digits` decimal digits.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ellsym2_context_new(digits: u32, out: *mut *mut Ellsym2Context) -> Ellsym2Status {
    guard(|| {
        non_null(out, "out")?;
        let ctx = lib(PrecisionContext::new(digits))?;
        let cc = CurveContext::square(&ctx);
        *out = Box::into_raw(Box::new(Ellsym2Context { cc }));
        Ok(())
    })
}

/// Context for `τ = tau_re + i·tau_im` with `tau_im > 0`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ellsym2_context_new_tau(
    digits: u32,
    tau_re: f64,
    tau_im: f64,
    out: *mut *mut Ellsym2Context,
) -> Ellsym2Status {
    guard(|| {
        non_null(out, "out")?;
        if !(tau_re.is_finite() && tau_im.is_finite()) {
            return Err(invalid("τ must be finite"));
        }
        let ctx = lib(PrecisionContext::new(digits))?;
        let tau = Complex::from_f64(ctx.prec(), tau_re, tau_im);
        let cc = lib(CurveContext::new(tau, &ctx))?;
        *out = Box::into_raw(Box::new(Ellsym2Context { cc }));
        Ok(())
    })
}

/// # Safety
/// `ctx` must come from `ellsym2_context_new*` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ellsym2_context_free(ctx: *mut Ellsym2Context) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ellsym2_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// One of `ELLSYM2_FN_*` at the torsion point `(ξ, η)`, rounded to double.
///
/// # Safety
/// `ctx` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ellsym2_eval(
    ctx: *const Ellsym2Context,
    function: c_int,
    xi_num: i64,
    xi_den: i64,
    eta_num: i64,
    eta_den: i64,
    out: *mut f64,
) -> Ellsym2Status {
    guard(|| {
        non_null(ctx, "ctx")?;
        non_null(out, "out")?;
        let f = elliptic_fn(function)?;
        let pt = point(xi_num, xi_den, eta_num, eta_den)?;
        *out = lib(f.eval(&(*ctx).cc, &pt))?.to_f64();
        Ok(())
    })
}

/// Like [`ellsym2_eval`] but returns the full-precision decimal string;
/// release it with [`ellsym2_string_free`].
///
/// # Safety
/// `ctx` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ellsym2_eval_string(
    ctx: *const Ellsym2Context,
    function: c_int,
    xi_num: i64,
    xi_den: i64,
    eta_num: i64,
    eta_den: i64,
    out: *mut *mut c_char,
) -> Ellsym2Status {
    guard(|| {
        non_null(ctx, "ctx")?;
        non_null(out, "out")?;
        let f = elliptic_fn(function)?;
        let pt = point(xi_num, xi_den, eta_num, eta_den)?;
        let c = &(*ctx).cc;
        let v = lib(f.eval(c, &pt))?;
        let s = c.ctx().format(&v);
        *out = CString::new(s).expect("no NUL in digits").into_raw();
        Ok(())
    })
}

/// `ℒ₃₁(ξ₁)ℒ₃₂(ξ₂) − ℒ₃₁(ξ₂)ℒ₃₂(ξ₁)` for the two divisors of the main identity.
///
/// # Safety
/// `ctx` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ellsym2_reg3_det(ctx: *const Ellsym2Context, out: *mut f64) -> Ellsym2Status {
    guard(|| {
        non_null(ctx, "ctx")?;
        non_null(out, "out")?;
        *out = lib(reg3_det(&(*ctx).cc, &xi1(), &xi2()))?.to_f64();
        Ok(())
    })
}

/// `function` extended linearly to the divisor `Σ coeffs[k]·(ξ_k, η_k)`;
/// `points` holds `count` rows of `(ξ_num, ξ_den, η_num, η_den)`.
///
/// # Safety
/// `ctx` and `out` must be valid; `coeffs` and `points` must hold `count`
/// and `4·count` elements.
#[no_mangle]
pub unsafe extern "C" fn ellsym2_eval_divisor(
    ctx: *const Ellsym2Context,
    function: c_int,
    coeffs: *const i64,
    points: *const i64,
    count: usize,
    out: *mut f64,
) -> Ellsym2Status {
    guard(|| {
        non_null(ctx, "ctx")?;
        non_null(out, "out")?;
        if count > 0 {
            non_null(coeffs, "coeffs")?;
            non_null(points, "points")?;
        }
        let f = elliptic_fn(function)?;
        let mut terms = Vec::with_capacity(count);
        for k in 0..count {
            let row = std::slice::from_raw_parts(points.add(4 * k), 4);
            terms.push((*coeffs.add(k), point(row[0], row[1], row[2], row[3])?));
        }
        let div = ellsym2::elliptic_polylog::Divisor::from_terms(terms);
        *out = lib(eval_divisor(f, &(*ctx).cc, &div))?.to_f64();
        Ok(())
    })
}

/// Truncated `K_{a,b}` at `(ξ, η)`, with the bound on the omitted tail.
///
/// # Safety
/// `ctx`, `re`, `im` and `tail_bound` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ellsym2_kab(
    ctx: *const Ellsym2Context,
    a: u32,
    b: u32,
    xi_num: i64,
    xi_den: i64,
    eta_num: i64,
    eta_den: i64,
    radius: u64,
    re: *mut f64,
    im: *mut f64,
    tail_bound: *mut f64,
) -> Ellsym2Status {
    guard(|| {
        non_null(ctx, "ctx")?;
        non_null(re, "re")?;
        non_null(im, "im")?;
        non_null(tail_bound, "tail_bound")?;
        let pt = point(xi_num, xi_den, eta_num, eta_den)?;
        let k = lib(k_ab(&(*ctx).cc, &EKSeriesSpec::new(a, b, pt, radius)))?;
        *re = k.value.re;
        *im = k.value.im;
        *tail_bound = k.tail_bound;
        Ok(())
    })
}

/// `L(g, s)` for `s ∈ {1, 2, 3}`.
///
/// # Safety
/// `ctx` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ellsym2_l_g(ctx: *const Ellsym2Context, s: u32, out: *mut f64) -> Ellsym2Status {
    guard(|| {
        non_null(ctx, "ctx")?;
        non_null(out, "out")?;
        *out = lib(l_g(s, (*ctx).cc.ctx()))?.to_f64();
        Ok(())
    })
}

/// `L(χ₋₄, t)` for integer `t >= 1`.
///
/// # Safety
/// `ctx` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ellsym2_l_chi4(ctx: *const Ellsym2Context, t: u32, out: *mut f64) -> Ellsym2Status {
    guard(|| {
        non_null(ctx, "ctx")?;
        non_null(out, "out")?;
        *out = lib(l_chi4(t, (*ctx).cc.ctx()))?.to_f64();
        Ok(())
    })
}

/// Writes `a_1..a_n` of `ELLSYM2_FORM_F` or `ELLSYM2_FORM_G` into `out[0..n]`.
///
/// # Safety
/// `out` must hold `len` elements; `BufferTooSmall` is returned when `len < n`.
#[no_mangle]
pub unsafe extern "C" fn ellsym2_coefficients(form: c_int, n: usize, out: *mut i64, len: usize) -> Ellsym2Status {
    guard(|| {
        non_null(out, "out")?;
        if len < n {
            return Err((Ellsym2Status::BufferTooSmall, format!("need {n} slots, got {len}")));
        }
        let q = match form {
            ELLSYM2_FORM_F => lib(f_qexp(n))?,
            ELLSYM2_FORM_G => lib(g_qexp(n))?,
            other => return Err(invalid(format!("unknown form code {other}"))),
        };
        ptr::copy_nonoverlapping(q.coeffs().as_ptr(), out, n);
        Ok(())
    })
}

/// Runs a verification suite by name. `json_lines` receives one JSON report
/// per line (release with [`ellsym2_string_free`]); `all_passed` is 1 iff
/// every report passed. `radius` and `prime_bound` of 0 select the defaults.
///
/// # Safety
/// `suite` must be a NUL-terminated string; the out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ellsym2_verify_json(
    suite: *const c_char,
    digits: u32,
    radius: u64,
    prime_bound: u64,
    quick: c_int,
    json_lines: *mut *mut c_char,
    all_passed: *mut c_int,
) -> Ellsym2Status {
    guard(|| {
        non_null(suite, "suite")?;
        non_null(json_lines, "json_lines")?;
        non_null(all_passed, "all_passed")?;
        let name = CStr::from_ptr(suite).to_str().map_err(|_| invalid("suite is not UTF-8"))?;
        let suite: Suite = lib(name.parse())?;
        let cfg = SuiteConfig {
            digits,
            radius: (radius > 0).then_some(radius),
            prime_bound: (prime_bound > 0).then_some(prime_bound),
            quick: quick != 0,
            cache_dir: ellsym2::curve_analytics::cache_dir_from_env(),
        };
        let reports = lib(Runner::new(cfg).and_then(|mut r| r.run(suite)))?;
        let mut text = String::new();
        for r in &reports {
            text.push_str(&r.to_json_line());
            text.push('\n');
        }
        *all_passed = c_int::from(reports.iter().all(|r| r.passed()));
        *json_lines = CString::new(text).expect("JSON has no NUL").into_raw();
        Ok(())
    })
}
