//! C interface to `dac-dist`.
//!
//! Every function returns a [`DacStatus`]; results come back through out
//! pointers. Objects that own memory (solver grids, polynomial
//! approximations, histograms) are opaque handles released with their
//! `*_free` function. After a failure, `dac_last_error_message` returns a
//! description of the last error on the calling thread.
//!
//! Bit sequences are `uint8_t` arrays where any nonzero byte is a one.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use dac_dist::analytic::{closed_form_sqrt2, GaussianApprox, PiecewisePolyApprox, PolyCase};
use dac_dist::codec::{self, IntervalState, OverlapSpec, TernarySymbol};
use dac_dist::empirical::{self, Histogram, Metric, SampleConfig, SeqLen};
use dac_dist::solver::{self, DiscretizedDistribution, SolverConfig, SolverReport};
use dac_dist::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DacStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    NotConverged = 3,
    Degenerate = 4,
    Unsupported = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DacSymbol {
    Zero = 0,
    Ambiguous = 1,
    One = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DacMetric {
    L1 = 0,
    Mse = 1,
    Linf = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DacPolyCase {
    A1 = 0,
    A2 = 1,
    A3 = 2,
    A4 = 3,
    B = 4,
    Recursive = 5,
}

/// Converged (or capped) solver grid together with its report.
pub struct DacDistribution {
    dist: DiscretizedDistribution,
    report: SolverReport,
}

pub struct DacPolyApprox {
    inner: PiecewisePolyApprox,
}

pub struct DacHistogram {
    inner: Histogram,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(err: &Error) -> DacStatus {
    match err {
        Error::Degenerate => DacStatus::Degenerate,
        Error::Unsupported { .. } | Error::DepthExceeded(_) => DacStatus::Unsupported,
        _ => DacStatus::InvalidArgument,
    }
}

fn fail(err: Error) -> DacStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

fn null(name: &str) -> DacStatus {
    set_error(format!("null pointer: {name}"));
    DacStatus::NullPointer
}

/// Runs `f`, turning a panic into `DacStatus::Panic`.
fn guard(f: impl FnOnce() -> DacStatus) -> DacStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            DacStatus::Panic
        }
    }
}

unsafe fn bits_from(ptr: *const u8, len: usize) -> Option<Vec<bool>> {
    if ptr.is_null() {
        return if len == 0 { Some(Vec::new()) } else { None };
    }
    Some(slice::from_raw_parts(ptr, len).iter().map(|&b| b != 0).collect())
}

unsafe fn copy_out(src: &[f64], buf: *mut f64, len: usize) -> DacStatus {
    if buf.is_null() {
        return null("buf");
    }
    if len < src.len() {
        set_error(format!("buffer holds {len} values, {} needed", src.len()));
        return DacStatus::BufferTooSmall;
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    DacStatus::Ok
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dac_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length in
/// bytes, excluding the terminator.
#[no_mangle]
pub unsafe extern "C" fn dac_last_error_message(buf: *mut c_char, len: usize) -> usize {
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

#[no_mangle]
pub unsafe extern "C" fn dac_encode(
    bits: *const u8,
    len: usize,
    q: f64,
    low: *mut f64,
    width: *mut f64,
) -> DacStatus {
    guard(|| {
        if low.is_null() || width.is_null() {
            return null("low/width");
        }
        let Some(bits) = bits_from(bits, len) else {
            return null("bits");
        };
        match OverlapSpec::from_q(q).and_then(|s| codec::encode(&bits, &s)) {
            Ok(iv) => {
                *low = iv.low;
                *width = iv.width;
                DacStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn dac_codeword_value(low: f64, width: f64, out: *mut f64) -> DacStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        match IntervalState::new(low, width) {
            Ok(iv) => {
                *out = codec::codeword_value(&iv);
                DacStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn dac_classify(u: f64, q: f64, out: *mut DacSymbol) -> DacStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        match OverlapSpec::from_q(q).and_then(|s| codec::classify(u, &s)) {
            Ok(sym) => {
                *out = match sym {
                    TernarySymbol::Zero => DacSymbol::Zero,
                    TernarySymbol::Ambiguous => DacSymbol::Ambiguous,
                    TernarySymbol::One => DacSymbol::One,
                };
                DacStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// M-algorithm decode of `len` symbols. `out_bits` receives `len` bytes
/// (0 or 1); `out_metric` the Hamming distance to `side_info`.
#[no_mangle]
pub unsafe extern "C" fn dac_decode(
    u: f64,
    q: f64,
    side_info: *const u8,
    len: usize,
    m: usize,
    out_bits: *mut u8,
    out_metric: *mut usize,
) -> DacStatus {
    guard(|| {
        if out_metric.is_null() || (out_bits.is_null() && len > 0) {
            return null("out_bits/out_metric");
        }
        let Some(side) = bits_from(side_info, len) else {
            return null("side_info");
        };
        match OverlapSpec::from_q(q).and_then(|s| codec::decode(u, &s, &side, len, m)) {
            Ok(path) => {
                for (i, &b) in path.symbols.iter().enumerate() {
                    *out_bits.add(i) = u8::from(b);
                }
                *out_metric = path.metric;
                DacStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Runs the grid solver. On `Ok` or `NotConverged`, `*out` receives a
/// handle to free with [`dac_distribution_free`].
#[no_mangle]
pub unsafe extern "C" fn dac_solve(
    q: f64,
    cells: usize,
    delta: f64,
    max_iters: usize,
    out: *mut *mut DacDistribution,
) -> DacStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        *out = ptr::null_mut();
        let result = OverlapSpec::from_q(q).and_then(|spec| {
            let config = SolverConfig::new(cells, delta, max_iters)?;
            solver::solve(&spec, &config)
        });
        match result {
            Ok((dist, report)) => {
                let converged = report.converged;
                *out = Box::into_raw(Box::new(DacDistribution { dist, report }));
                if converged {
                    DacStatus::Ok
                } else {
                    set_error(format!("no convergence after {max_iters} iterations"));
                    DacStatus::NotConverged
                }
            }
            Err(e) => fail(e),
        }
    })
}

/// Number of grid values, `N + 1`.
#[no_mangle]
pub unsafe extern "C" fn dac_distribution_len(dist: *const DacDistribution) -> usize {
    dist.as_ref().map_or(0, |d| d.dist.values().len())
}

#[no_mangle]
pub unsafe extern "C" fn dac_distribution_values(
    dist: *const DacDistribution,
    buf: *mut f64,
    len: usize,
) -> DacStatus {
    match dist.as_ref() {
        Some(d) => copy_out(d.dist.values(), buf, len),
        None => null("dist"),
    }
}

#[no_mangle]
pub unsafe extern "C" fn dac_distribution_iterations(dist: *const DacDistribution) -> usize {
    dist.as_ref().map_or(0, |d| d.report.iterations)
}

#[no_mangle]
pub unsafe extern "C" fn dac_distribution_final_mse(dist: *const DacDistribution) -> f64 {
    dist.as_ref().map_or(f64::NAN, |d| d.report.final_mse)
}

#[no_mangle]
pub unsafe extern "C" fn dac_distribution_free(dist: *mut DacDistribution) {
    if !dist.is_null() {
        drop(Box::from_raw(dist));
    }
}

#[no_mangle]
pub unsafe extern "C" fn dac_closed_form_sqrt2(u: f64, out: *mut f64) -> DacStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        match closed_form_sqrt2(u) {
            Ok(v) => {
                *out = v;
                DacStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn dac_poly_new(q: f64, out: *mut *mut DacPolyApprox) -> DacStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        *out = ptr::null_mut();
        match OverlapSpec::from_q(q).and_then(|s| PiecewisePolyApprox::new(&s)) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(DacPolyApprox { inner }));
                DacStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Evaluates on `[0, 1]` (the right half by symmetry).
#[no_mangle]
pub unsafe extern "C" fn dac_poly_eval(
    approx: *const DacPolyApprox,
    u: f64,
    out: *mut f64,
) -> DacStatus {
    guard(|| {
        let (Some(a), false) = (approx.as_ref(), out.is_null()) else {
            return null("approx/out");
        };
        match a.inner.eval_full(u) {
            Ok(v) => {
                *out = v;
                DacStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn dac_poly_lambda(approx: *const DacPolyApprox) -> f64 {
    approx.as_ref().map_or(f64::NAN, |a| a.inner.lambda())
}

#[no_mangle]
pub unsafe extern "C" fn dac_poly_c(approx: *const DacPolyApprox) -> f64 {
    approx.as_ref().map_or(f64::NAN, |a| a.inner.c())
}

#[no_mangle]
pub unsafe extern "C" fn dac_poly_case(
    approx: *const DacPolyApprox,
    out: *mut DacPolyCase,
) -> DacStatus {
    let (Some(a), false) = (approx.as_ref(), out.is_null()) else {
        return null("approx/out");
    };
    *out = match a.inner.case() {
        PolyCase::A1 => DacPolyCase::A1,
        PolyCase::A2 => DacPolyCase::A2,
        PolyCase::A3 => DacPolyCase::A3,
        PolyCase::A4 => DacPolyCase::A4,
        PolyCase::B => DacPolyCase::B,
        PolyCase::Recursive => DacPolyCase::Recursive,
    };
    DacStatus::Ok
}

#[no_mangle]
pub unsafe extern "C" fn dac_poly_free(approx: *mut DacPolyApprox) {
    if !approx.is_null() {
        drop(Box::from_raw(approx));
    }
}

#[no_mangle]
pub unsafe extern "C" fn dac_gaussian_sigma2(q: f64, out: *mut f64) -> DacStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        match OverlapSpec::from_q(q).and_then(|s| dac_dist::analytic::gaussian_sigma2(&s)) {
            Ok(v) => {
                *out = v;
                DacStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn dac_gaussian_eval(sigma2: f64, u: f64, out: *mut f64) -> DacStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        match GaussianApprox::new(sigma2) {
            Ok(g) => {
                *out = g.eval(u);
                DacStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Monte Carlo histogram; `seq_len = 0` picks the length from `q`.
#[no_mangle]
pub unsafe extern "C" fn dac_sample_histogram(
    q: f64,
    samples: u64,
    bins: usize,
    seed: u64,
    seq_len: usize,
    out: *mut *mut DacHistogram,
) -> DacStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        *out = ptr::null_mut();
        let len = if seq_len == 0 { SeqLen::Auto } else { SeqLen::Fixed(seq_len) };
        let result = OverlapSpec::from_q(q).and_then(|spec| {
            let config = SampleConfig::new(samples, bins, seed)?.with_seq_len(len)?;
            empirical::sample_histogram(&spec, &config)
        });
        match result {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(DacHistogram { inner }));
                DacStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn dac_histogram_bins(hist: *const DacHistogram) -> usize {
    hist.as_ref().map_or(0, |h| h.inner.bins())
}

#[no_mangle]
pub unsafe extern "C" fn dac_histogram_density(
    hist: *const DacHistogram,
    buf: *mut f64,
    len: usize,
) -> DacStatus {
    match hist.as_ref() {
        Some(h) => copy_out(h.inner.density(), buf, len),
        None => null("hist"),
    }
}

#[no_mangle]
pub unsafe extern "C" fn dac_histogram_counts(
    hist: *const DacHistogram,
    buf: *mut u64,
    len: usize,
) -> DacStatus {
    let Some(h) = hist.as_ref() else {
        return null("hist");
    };
    let counts = h.inner.counts();
    if buf.is_null() {
        return null("buf");
    }
    if len < counts.len() {
        set_error(format!("buffer holds {len} values, {} needed", counts.len()));
        return DacStatus::BufferTooSmall;
    }
    ptr::copy_nonoverlapping(counts.as_ptr(), buf, counts.len());
    DacStatus::Ok
}

#[no_mangle]
pub unsafe extern "C" fn dac_histogram_free(hist: *mut DacHistogram) {
    if !hist.is_null() {
        drop(Box::from_raw(hist));
    }
}

#[no_mangle]
pub unsafe extern "C" fn dac_distance(
    a: *const f64,
    b: *const f64,
    len: usize,
    metric: DacMetric,
    out: *mut f64,
) -> DacStatus {
    guard(|| {
        if a.is_null() || b.is_null() || out.is_null() {
            return null("a/b/out");
        }
        let metric = match metric {
            DacMetric::L1 => Metric::L1,
            DacMetric::Mse => Metric::Mse,
            DacMetric::Linf => Metric::Linf,
        };
        let (a, b) = (slice::from_raw_parts(a, len), slice::from_raw_parts(b, len));
        match empirical::distance(a, b, metric) {
            Ok(v) => {
                *out = v;
                DacStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Human-readable name of a status code, as a static string.
#[no_mangle]
pub extern "C" fn dac_status_name(status: DacStatus) -> *const c_char {
    let s: &'static CStr = match status {
        DacStatus::Ok => c"ok",
        DacStatus::InvalidArgument => c"invalid argument",
        DacStatus::NullPointer => c"null pointer",
        DacStatus::NotConverged => c"not converged",
        DacStatus::Degenerate => c"degenerate distribution",
        DacStatus::Unsupported => c"unsupported parameter range",
        DacStatus::BufferTooSmall => c"buffer too small",
        DacStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}
