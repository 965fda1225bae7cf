//! C interface to `polydist`.
//!
//! Objects cross the boundary as opaque handles (`PdPolynomial`,
//! `PdAnalysis`) created and destroyed by this library. Every fallible call
//! returns a `PdStatus`; on failure the message is kept per thread and can be
//! copied out with `pd_last_error_message`.
//!
//! Matrices are exchanged as separate real/imaginary `double` arrays in
//! row-major order; polynomial coefficients are concatenated `A_0, …, A_m`.

use std::cell::RefCell;
use std::ffi::CString;
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use polydist::analysis::{analyze, Analysis, AnalysisOptions, Mode};
use polydist::pencil::sample_curve;
use polydist::perturbation::{verify_multiple, Verdict};
use polydist::report::AnalysisReport;
use polydist::{CMat, Complex64, Error, MatrixPolynomial, WeightSet};

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidPolynomial = 3,
    /// The numerical pipeline stopped early; the analysis handle is still
    /// produced and carries the partial report.
    Numerical = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdMode {
    Auto = 0,
    SinglePair = 1,
    Corrected = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdVerdict {
    /// No verification was reached.
    Unavailable = 0,
    MultipleDefective = 1,
    MultipleSemisimple = 2,
    SimpleEigenvalue = 3,
    NotAnEigenvalue = 4,
}

impl From<Option<Verdict>> for PdVerdict {
    fn from(v: Option<Verdict>) -> Self {
        match v {
            None => PdVerdict::Unavailable,
            Some(Verdict::MultipleDefective) => PdVerdict::MultipleDefective,
            Some(Verdict::MultipleSemisimple) => PdVerdict::MultipleSemisimple,
            Some(Verdict::SimpleEigenvalue) => PdVerdict::SimpleEigenvalue,
            Some(Verdict::NotAnEigenvalue) => PdVerdict::NotAnEigenvalue,
        }
    }
}

/// Opaque matrix polynomial.
pub struct PdPolynomial {
    inner: MatrixPolynomial,
}

/// Opaque analysis result.
pub struct PdAnalysis {
    polynomial: MatrixPolynomial,
    weights: WeightSet,
    inner: Analysis,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> PdStatus {
    match e {
        Error::InvalidPolynomial(_)
        | Error::SingularLeadingCoefficient { .. }
        | Error::NonFinite => PdStatus::InvalidPolynomial,
        e if e.is_input_error() => PdStatus::InvalidArgument,
        _ => PdStatus::Numerical,
    }
}

fn fail(e: &Error) -> PdStatus {
    set_error(format!("[{}] {e}", e.code()));
    status_of(e)
}

fn guard(f: impl FnOnce() -> PdStatus) -> PdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            PdStatus::Panic
        }
    }
}

macro_rules! non_null {
    ($($p:expr),+) => {
        $(if $p.is_null() {
            set_error(concat!("null pointer: ", stringify!($p)));
            return PdStatus::NullPointer;
        })+
    };
}

/// Copy the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length in bytes, excluding
/// the terminator.
///
/// # Safety
/// `buf` must be NULL or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn pd_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Create a polynomial from `m + 1` row-major `n × n` coefficients.
///
/// `im` may be NULL for real coefficients.
///
/// # Safety
/// `re` (and `im` when not NULL) must point to `n * n * (m + 1)` doubles;
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_polynomial_new(
    n: usize,
    m: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut PdPolynomial,
) -> PdStatus {
    non_null!(re, out);
    guard(|| {
        if n == 0 {
            set_error("n must be positive");
            return PdStatus::InvalidArgument;
        }
        let block = n * n;
        let total = block * (m + 1);
        let re = std::slice::from_raw_parts(re, total);
        let im = (!im.is_null()).then(|| std::slice::from_raw_parts(im, total));
        let coeffs = (0..=m)
            .map(|j| {
                CMat::from_fn(n, n, |r, c| {
                    let k = j * block + r * n + c;
                    Complex64::new(re[k], im.map_or(0.0, |x| x[k]))
                })
            })
            .collect();
        match MatrixPolynomial::new(coeffs) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(PdPolynomial { inner: p }));
                PdStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// # Safety
/// `poly` must be NULL or a handle from `pd_polynomial_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pd_polynomial_free(poly: *mut PdPolynomial) {
    if !poly.is_null() {
        drop(Box::from_raw(poly));
    }
}

/// # Safety
/// `poly` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pd_polynomial_dim(poly: *const PdPolynomial) -> usize {
    if poly.is_null() {
        return 0;
    }
    (*poly).inner.dim()
}

/// # Safety
/// `poly` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pd_polynomial_degree(poly: *const PdPolynomial) -> usize {
    if poly.is_null() {
        return 0;
    }
    (*poly).inner.degree()
}

unsafe fn write_matrix(m: &CMat, re: *mut f64, im: *mut f64) {
    let n = m.ncols();
    for r in 0..m.nrows() {
        for c in 0..n {
            let z = m[(r, c)];
            *re.add(r * n + c) = z.re;
            if !im.is_null() {
                *im.add(r * n + c) = z.im;
            }
        }
    }
}

/// Evaluate `P(z)` into row-major `n × n` buffers.
///
/// # Safety
/// `poly` must be a live handle; `re` (and `im` unless NULL) must point to
/// `n * n` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn pd_polynomial_evaluate(
    poly: *const PdPolynomial,
    z_re: f64,
    z_im: f64,
    re: *mut f64,
    im: *mut f64,
) -> PdStatus {
    non_null!(poly, re);
    guard(|| {
        write_matrix(&(*poly).inner.evaluate(Complex64::new(z_re, z_im)), re, im);
        PdStatus::Ok
    })
}

/// Run the full construction.
///
/// `weights` may be NULL for all-ones weights; otherwise it holds `m + 1`
/// values. On `PdStatus::Ok` or `PdStatus::Numerical` a handle is written to
/// `out` and must be released with `pd_analysis_free`.
///
/// # Safety
/// `poly` must be a live handle, `weights` NULL or `weights_len` readable
/// doubles, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_analyze(
    poly: *const PdPolynomial,
    weights: *const f64,
    weights_len: usize,
    mu_re: f64,
    mu_im: f64,
    mode: PdMode,
    out: *mut *mut PdAnalysis,
) -> PdStatus {
    non_null!(poly, out);
    guard(|| {
        let p = &(*poly).inner;
        let w = if weights.is_null() {
            WeightSet::uniform(p.degree())
        } else {
            match WeightSet::new(std::slice::from_raw_parts(weights, weights_len).to_vec()) {
                Ok(w) => w,
                Err(e) => return fail(&e),
            }
        };
        let opts = AnalysisOptions {
            mode: match mode {
                PdMode::Auto => Mode::Auto,
                PdMode::SinglePair => Mode::SinglePair,
                PdMode::Corrected => Mode::Corrected,
            },
            ..Default::default()
        };
        match analyze(p, &w, Complex64::new(mu_re, mu_im), &opts) {
            Ok(a) => {
                let status = match &a.error {
                    Some(e) => fail(e),
                    None => PdStatus::Ok,
                };
                *out = Box::into_raw(Box::new(PdAnalysis {
                    polynomial: p.clone(),
                    weights: w,
                    inner: a,
                }));
                status
            }
            Err(e) => fail(&e),
        }
    })
}

/// # Safety
/// `analysis` must be NULL or a handle from `pd_analyze` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pd_analysis_free(analysis: *mut PdAnalysis) {
    if !analysis.is_null() {
        drop(Box::from_raw(analysis));
    }
}

/// `γ*`, or NaN when the search did not complete.
///
/// # Safety
/// `analysis` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pd_analysis_gamma_star(analysis: *const PdAnalysis) -> f64 {
    if analysis.is_null() {
        return f64::NAN;
    }
    (*analysis)
        .inner
        .record
        .as_ref()
        .map_or(f64::NAN, |r| r.gamma_star)
}

/// `s*`, or NaN when the search did not complete.
///
/// # Safety
/// `analysis` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pd_analysis_s_star(analysis: *const PdAnalysis) -> f64 {
    if analysis.is_null() {
        return f64::NAN;
    }
    (*analysis)
        .inner
        .record
        .as_ref()
        .map_or(f64::NAN, |r| r.s_star)
}

/// Whether `s_{2n-1}` and `s_{2n-2}` coalesced at `γ*`.
///
/// # Safety
/// `analysis` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pd_analysis_coalesced(analysis: *const PdAnalysis) -> bool {
    !analysis.is_null()
        && (*analysis)
            .inner
            .record
            .as_ref()
            .is_some_and(|r| r.coalesced)
}

/// Whether the corrected singular pair was used.
///
/// # Safety
/// `analysis` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pd_analysis_corrected(analysis: *const PdAnalysis) -> bool {
    !analysis.is_null() && (*analysis).inner.correction.is_some()
}

/// # Safety
/// `analysis` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pd_analysis_verdict(analysis: *const PdAnalysis) -> PdVerdict {
    if analysis.is_null() {
        return PdVerdict::Unavailable;
    }
    (*analysis).inner.verdict().into()
}

/// Copy the coefficients of `Q(λ)` (`n * n * (m + 1)` values, `A_0` first,
/// row-major) into the caller's buffers.
///
/// # Safety
/// `analysis` must be a live handle; `re` (and `im` unless NULL) must point
/// to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn pd_analysis_q_coefficients(
    analysis: *const PdAnalysis,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> PdStatus {
    non_null!(analysis, re);
    guard(|| {
        let Some(q) = (*analysis).inner.q() else {
            set_error("no perturbed polynomial was constructed");
            return PdStatus::Numerical;
        };
        let block = q.dim() * q.dim();
        if len < block * q.coeffs().len() {
            set_error(format!(
                "buffer holds {len} values, need {}",
                block * q.coeffs().len()
            ));
            return PdStatus::BufferTooSmall;
        }
        for (j, a) in q.coeffs().iter().enumerate() {
            let im_j = if im.is_null() { im } else { im.add(j * block) };
            write_matrix(a, re.add(j * block), im_j);
        }
        PdStatus::Ok
    })
}

/// JSON report of the analysis, as produced by the `analyze` command. Free
/// with `pd_string_free`. NULL on failure.
///
/// # Safety
/// `analysis` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pd_analysis_report_json(analysis: *const PdAnalysis) -> *mut c_char {
    if analysis.is_null() {
        return ptr::null_mut();
    }
    let a = &*analysis;
    let json = AnalysisReport::new(&a.polynomial, &a.weights, &a.inner).to_json();
    CString::new(json).map_or(ptr::null_mut(), CString::into_raw)
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Sample `s_{2n-1}` and `s_{2n-2}` of `F[P(μ); γ]` at `count` uniformly
/// spaced `γ` in `[gamma_lo, gamma_hi]`.
///
/// # Safety
/// `poly` must be a live handle; the three output arrays must each hold
/// `count` doubles.
#[no_mangle]
pub unsafe extern "C" fn pd_sample_curve(
    poly: *const PdPolynomial,
    mu_re: f64,
    mu_im: f64,
    gamma_lo: f64,
    gamma_hi: f64,
    count: usize,
    gamma_out: *mut f64,
    s_lo_out: *mut f64,
    s_hi_out: *mut f64,
) -> PdStatus {
    non_null!(poly, gamma_out, s_lo_out, s_hi_out);
    guard(|| {
        match sample_curve(
            &(*poly).inner,
            Complex64::new(mu_re, mu_im),
            gamma_lo,
            gamma_hi,
            count,
        ) {
            Ok(samples) => {
                for (i, s) in samples.iter().enumerate() {
                    *gamma_out.add(i) = s.gamma;
                    *s_lo_out.add(i) = s.s_lo;
                    *s_hi_out.add(i) = s.s_hi;
                }
                PdStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Check whether `μ` is a multiple eigenvalue of `q`. `reference` (the
/// unperturbed polynomial) may be NULL. Any of the output pointers may be
/// NULL.
///
/// # Safety
/// `q` must be a live handle; `reference` NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pd_verify_multiple(
    q: *const PdPolynomial,
    reference: *const PdPolynomial,
    mu_re: f64,
    mu_im: f64,
    tol: f64,
    verdict: *mut PdVerdict,
    eigen_residual: *mut f64,
    slope_residual: *mut f64,
) -> PdStatus {
    non_null!(q);
    guard(|| {
        let reference = (!reference.is_null()).then(|| &(*reference).inner);
        match verify_multiple(&(*q).inner, Complex64::new(mu_re, mu_im), tol, reference) {
            Ok(r) => {
                if !verdict.is_null() {
                    *verdict = Some(r.verdict).into();
                }
                if !eigen_residual.is_null() {
                    *eigen_residual = r.eigen_residual;
                }
                if !slope_residual.is_null() {
                    *slope_residual = r.slope_residual;
                }
                PdStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}
