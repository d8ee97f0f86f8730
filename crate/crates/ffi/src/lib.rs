//! C ABI over `volscale`.
//!
//! Every fallible function returns a [`VsStatus`] and writes results through
//! out-pointers. On failure a description is available from
//! [`vs_last_error_message`] on the same thread. Series and results are opaque
//! heap handles owned by the caller and released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;
use std::slice;

use volscale::fluctuation::{AnalysisConfig, GridKind, MultifractalResult};
use volscale::{synth, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    SeriesTooShort = 3,
    DegenerateInput = 4,
    InsufficientData = 5,
    BufferTooSmall = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VsGrid {
    Log = 0,
    Dyadic = 1,
}

/// Which per-q column of a multifractal result to copy.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VsMfField {
    Q = 0,
    H = 1,
    HStderr = 2,
    Tau = 3,
    Alpha = 4,
    FAlpha = 5,
}

/// Analysis parameters. `s_max == 0` means a quarter of the series length.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct VsMfdfaConfig {
    pub q_min: f64,
    pub q_max: f64,
    pub q_step: f64,
    pub s_min: usize,
    pub s_max: usize,
    pub n_scales: usize,
    pub grid: VsGrid,
    pub detrend_order: usize,
}

/// A sequence of samples.
pub struct VsSeries(Vec<f64>);

/// Generalized Hurst exponents and singularity spectrum.
pub struct VsMfResult(MultifractalResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> VsStatus {
    match err {
        Error::SeriesTooShort { .. } => VsStatus::SeriesTooShort,
        Error::DegenerateInput(_) => VsStatus::DegenerateInput,
        Error::InsufficientData(_) => VsStatus::InsufficientData,
        Error::Internal(_) | Error::Io { .. } | Error::Csv(_) | Error::Json(_) => VsStatus::Internal,
        _ => VsStatus::InvalidArgument,
    }
}

fn fail(status: VsStatus, msg: impl Into<String>) -> VsStatus {
    set_error(msg.into());
    status
}

fn guard(f: impl FnOnce() -> Result<(), VsStatus> + UnwindSafe) -> VsStatus {
    match catch_unwind(f) {
        Ok(Ok(())) => VsStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(VsStatus::Internal, "panic inside volscale"),
    }
}

fn lift<T>(r: volscale::Result<T>) -> Result<T, VsStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), VsStatus> {
    if p.is_null() {
        Err(fail(VsStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

unsafe fn put_series(out: *mut *mut VsSeries, values: Vec<f64>) {
    *out = Box::into_raw(Box::new(VsSeries(values)));
}

unsafe fn copy_out(src: &[f64], buf: *mut f64, cap: usize, written: *mut usize) -> Result<(), VsStatus> {
    if !written.is_null() {
        *written = src.len();
    }
    if cap < src.len() {
        return Err(fail(
            VsStatus::BufferTooSmall,
            format!("buffer holds {cap} values, {} needed", src.len()),
        ));
    }
    if !src.is_empty() {
        non_null(buf, "buf")?;
        ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    }
    Ok(())
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn vs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Copies `len` values into a new series.
///
/// # Safety
/// `data` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vs_series_new(data: *const f64, len: usize, out: *mut *mut VsSeries) -> VsStatus {
    guard(|| {
        non_null(out, "out")?;
        if len > 0 {
            non_null(data, "data")?;
        }
        let values = if len == 0 { Vec::new() } else { slice::from_raw_parts(data, len).to_vec() };
        put_series(out, values);
        Ok(())
    })
}

/// # Safety
/// `series` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vs_series_free(series: *mut VsSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Number of samples, 0 for NULL.
///
/// # Safety
/// `series` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vs_series_len(series: *const VsSeries) -> usize {
    series.as_ref().map_or(0, |s| s.0.len())
}

/// Copies samples into `buf`. `written` (optional) receives the series
/// length even when the buffer is too small.
///
/// # Safety
/// `series` must be a live handle and `buf` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn vs_series_copy(
    series: *const VsSeries,
    buf: *mut f64,
    cap: usize,
    written: *mut usize,
) -> VsStatus {
    guard(|| {
        non_null(series, "series")?;
        copy_out(&(*series).0, buf, cap, written)
    })
}

/// Fractional Gaussian noise with Hurst index `hurst`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vs_gen_fgn(hurst: f64, len: usize, seed: u64, out: *mut *mut VsSeries) -> VsStatus {
    guard(|| {
        non_null(out, "out")?;
        put_series(out, lift(synth::gen_fgn(hurst, len, seed))?);
        Ok(())
    })
}

/// Binomial multiplicative cascade of length `2^levels`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vs_gen_cascade(
    p: f64,
    levels: u32,
    randomize: bool,
    seed: u64,
    out: *mut *mut VsSeries,
) -> VsStatus {
    guard(|| {
        non_null(out, "out")?;
        put_series(out, lift(synth::gen_cascade(p, levels, randomize, seed))?);
        Ok(())
    })
}

/// Random permutation of `series` into a new handle.
///
/// # Safety
/// `series` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vs_shuffle(series: *const VsSeries, seed: u64, out: *mut *mut VsSeries) -> VsStatus {
    guard(|| {
        non_null(series, "series")?;
        non_null(out, "out")?;
        put_series(out, synth::shuffle(&(*series).0, seed));
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn vs_mfdfa_config_default() -> VsMfdfaConfig {
    let d = AnalysisConfig::default();
    VsMfdfaConfig {
        q_min: d.q_min,
        q_max: d.q_max,
        q_step: d.q_step,
        s_min: d.s_min,
        s_max: d.s_max.unwrap_or(0),
        n_scales: d.n_scales,
        grid: VsGrid::Log,
        detrend_order: d.detrend_order,
    }
}

unsafe fn analysis_config(config: *const VsMfdfaConfig) -> AnalysisConfig {
    let c = config.as_ref().copied().unwrap_or_else(|| vs_mfdfa_config_default());
    AnalysisConfig {
        q_min: c.q_min,
        q_max: c.q_max,
        q_step: c.q_step,
        s_min: c.s_min,
        s_max: (c.s_max > 0).then_some(c.s_max),
        n_scales: c.n_scales,
        grid: match c.grid {
            VsGrid::Log => GridKind::Log,
            VsGrid::Dyadic => GridKind::Dyadic,
        },
        detrend_order: c.detrend_order,
    }
}

/// Runs MF-DFA. A NULL `config` uses the defaults.
///
/// # Safety
/// `series` must be a live handle, `config` NULL or readable, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vs_mfdfa(
    series: *const VsSeries,
    config: *const VsMfdfaConfig,
    out: *mut *mut VsMfResult,
) -> VsStatus {
    guard(|| {
        non_null(series, "series")?;
        non_null(out, "out")?;
        let (_, result) = lift(analysis_config(config).mfdfa(&(*series).0))?;
        *out = Box::into_raw(Box::new(VsMfResult(result)));
        Ok(())
    })
}

/// DFA Hurst index and its standard error. Only the scale settings of
/// `config` are used.
///
/// # Safety
/// `series` must be a live handle, `config` NULL or readable, `hurst`
/// writable, `stderr_out` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn vs_dfa(
    series: *const VsSeries,
    config: *const VsMfdfaConfig,
    hurst: *mut f64,
    stderr_out: *mut f64,
) -> VsStatus {
    guard(|| {
        non_null(series, "series")?;
        non_null(hurst, "hurst")?;
        let r = lift(analysis_config(config).dfa(&(*series).0))?;
        *hurst = r.hurst;
        if !stderr_out.is_null() {
            *stderr_out = r.stderr;
        }
        Ok(())
    })
}

/// Least squares fit of `log10 y` against `log10 x`.
///
/// # Safety
/// `x` and `y` must hold `n` doubles; `slope` writable; `intercept` and
/// `slope_stderr` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn vs_loglog_fit(
    x: *const f64,
    y: *const f64,
    n: usize,
    slope: *mut f64,
    intercept: *mut f64,
    slope_stderr: *mut f64,
) -> VsStatus {
    guard(|| {
        non_null(x, "x")?;
        non_null(y, "y")?;
        non_null(slope, "slope")?;
        let fit = lift(volscale::fluctuation::loglog_fit(
            slice::from_raw_parts(x, n),
            slice::from_raw_parts(y, n),
        ))?;
        *slope = fit.slope;
        if !intercept.is_null() {
            *intercept = fit.intercept;
        }
        if !slope_stderr.is_null() {
            *slope_stderr = fit.slope_stderr;
        }
        Ok(())
    })
}

/// # Safety
/// `result` must be NULL or a handle from [`vs_mfdfa`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vs_mf_result_free(result: *mut VsMfResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Number of q values, 0 for NULL.
///
/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vs_mf_result_len(result: *const VsMfResult) -> usize {
    result.as_ref().map_or(0, |r| r.0.q.len())
}

/// `h(2)`. Fails with `InvalidArgument` when the q grid lacks 2.
///
/// # Safety
/// `result` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vs_mf_result_hurst(result: *const VsMfResult, out: *mut f64) -> VsStatus {
    guard(|| {
        non_null(result, "result")?;
        non_null(out, "out")?;
        *out = (*result)
            .0
            .hurst
            .ok_or_else(|| fail(VsStatus::InvalidArgument, "q grid does not contain 2"))?;
        Ok(())
    })
}

/// # Safety
/// `result` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vs_mf_result_delta_h(result: *const VsMfResult, out: *mut f64) -> VsStatus {
    guard(|| {
        non_null(result, "result")?;
        non_null(out, "out")?;
        *out = (*result).0.delta_h;
        Ok(())
    })
}

/// # Safety
/// `result` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vs_mf_result_delta_alpha(result: *const VsMfResult, out: *mut f64) -> VsStatus {
    guard(|| {
        non_null(result, "result")?;
        non_null(out, "out")?;
        *out = (*result).0.delta_alpha;
        Ok(())
    })
}

/// Copies one per-q column into `buf`.
///
/// # Safety
/// `result` must be a live handle, `buf` must hold `cap` doubles, `written`
/// NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn vs_mf_result_copy(
    result: *const VsMfResult,
    field: VsMfField,
    buf: *mut f64,
    cap: usize,
    written: *mut usize,
) -> VsStatus {
    guard(|| {
        non_null(result, "result")?;
        let r = &(*result).0;
        let src = match field {
            VsMfField::Q => &r.q,
            VsMfField::H => &r.h,
            VsMfField::HStderr => &r.h_stderr,
            VsMfField::Tau => &r.tau,
            VsMfField::Alpha => &r.alpha,
            VsMfField::FAlpha => &r.f_alpha,
        };
        copy_out(src, buf, cap, written)
    })
}
