//! C ABI over `cyclic_inpaint`.
//!
//! Objects are opaque heap handles released with their `*_free` function.
//! Every fallible call returns a [`CipStatus`]; on failure the message is
//! available from [`cip_last_error`] on the same thread until the next call.
//! Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use cyclic_inpaint::{init, io, model, solver, synth, Error, Mask, ModelKind, PhaseImage, SolverConfig, Weights};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CipStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    ShapeMismatch = 3,
    OutOfRange = 4,
    Io = 5,
    Format = 6,
    Numerical = 7,
    Panic = 8,
}

/// Phase image with values in `[-pi, pi)`, row-major.
pub struct CipImage(PhaseImage);

/// Known/unknown pixel mask.
pub struct CipMask(Mask);

/// Result of a solver run: final image and energy trace.
pub struct CipReport(solver::SolverReport);

/// Regularizer weights; all nonnegative, at least one positive.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct CipWeights {
    /// Horizontal, vertical, diagonal, anti-diagonal first-order weights.
    pub alpha: [f64; 4],
    /// Horizontal, vertical second-order weights.
    pub beta: [f64; 2],
    /// Mixed second-order weight.
    pub gamma: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct CipSolverConfig {
    pub lambda0: f64,
    pub max_sweeps: usize,
    /// 0 records only the first and last energy.
    pub record_energy_every: usize,
    pub parallel: bool,
    /// Data-fidelity model instead of exact interpolation.
    pub noisy: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> CipStatus {
    match e {
        Error::InvalidArgument(_) | Error::ConstraintViolation { .. } => CipStatus::InvalidArgument,
        Error::ShapeMismatch { .. } => CipStatus::ShapeMismatch,
        Error::OutOfRange { .. } => CipStatus::OutOfRange,
        Error::Io { .. } => CipStatus::Io,
        Error::Format { .. } => CipStatus::Format,
        Error::Numerical { .. } => CipStatus::Numerical,
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

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> CipStatus {
    set_error(String::new());
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => CipStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            CipStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".to_string());
            CipStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn c_path<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Lib(Error::InvalidArgument("path is not valid UTF-8".to_string())))
}

fn weights(w: &CipWeights) -> Result<Weights, Error> {
    Weights::new(w.alpha, w.beta, w.gamma)
}

fn kind(noisy: bool) -> ModelKind {
    if noisy {
        ModelKind::Noisy
    } else {
        ModelKind::Noiseless
    }
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(p))));
    }
}

/// Message of the last failed call on this thread; empty after success.
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn cip_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Defaults: lambda0 = pi/2, 700 sweeps, energy every sweep, parallel, noiseless.
#[no_mangle]
pub extern "C" fn cip_solver_config_default() -> CipSolverConfig {
    let d = SolverConfig::default();
    CipSolverConfig {
        lambda0: d.lambda0,
        max_sweeps: d.max_sweeps,
        record_energy_every: d.record_energy_every,
        parallel: d.parallel,
        noisy: false,
    }
}

/// Copies `rows * cols` values from `data`; values must lie in `[-pi, pi)`.
///
/// # Safety
/// `data` must point to `rows * cols` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cip_image_new(rows: usize, cols: usize, data: *const f64, out: *mut *mut CipImage) -> CipStatus {
    guard(|| {
        let n = rows.checked_mul(cols).ok_or_else(|| Error::InvalidArgument("size overflow".to_string()))?;
        let data = get(data, "data").map(|d| slice::from_raw_parts(d, n))?;
        put(out, CipImage(PhaseImage::new(rows, cols, data.to_vec())?))
    })
}

/// # Safety
/// `image` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cip_image_free(image: *mut CipImage) {
    free(image)
}

/// # Safety
/// `image` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn cip_image_rows(image: *const CipImage) -> usize {
    image.as_ref().map_or(0, |i| i.0.rows())
}

/// # Safety
/// `image` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn cip_image_cols(image: *const CipImage) -> usize {
    image.as_ref().map_or(0, |i| i.0.cols())
}

/// Copies the pixels into `out`, which holds `len >= rows * cols` doubles.
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn cip_image_copy(image: *const CipImage, out: *mut f64, len: usize) -> CipStatus {
    guard(|| {
        let src = get(image, "image")?.0.as_slice();
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        if len < src.len() {
            return Err(Error::InvalidArgument(format!("buffer holds {len} values, need {}", src.len())).into());
        }
        ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
        Ok(())
    })
}

/// `known[i] != 0` marks pixel `i` (row-major) as known.
///
/// # Safety
/// `known` must point to `rows * cols` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cip_mask_new(rows: usize, cols: usize, known: *const u8, out: *mut *mut CipMask) -> CipStatus {
    guard(|| {
        let n = rows.checked_mul(cols).ok_or_else(|| Error::InvalidArgument("size overflow".to_string()))?;
        let known = get(known, "known").map(|k| slice::from_raw_parts(k, n))?;
        put(out, CipMask(Mask::new(rows, cols, known.iter().map(|&b| b != 0).collect())?))
    })
}

/// # Safety
/// `mask` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cip_mask_free(mask: *mut CipMask) {
    free(mask)
}

/// # Safety
/// `path` must be a NUL-terminated UTF-8 string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cip_read_phase(path: *const c_char, out: *mut *mut CipImage) -> CipStatus {
    guard(|| put(out, CipImage(io::read_phase(c_path(path)?)?)))
}

/// # Safety
/// `path` must be a NUL-terminated UTF-8 string; `image` a live handle.
#[no_mangle]
pub unsafe extern "C" fn cip_write_phase(path: *const c_char, image: *const CipImage) -> CipStatus {
    guard(|| Ok(io::write_phase(c_path(path)?, &get(image, "image")?.0)?))
}

/// # Safety
/// `path` must be a NUL-terminated UTF-8 string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cip_read_mask(path: *const c_char, out: *mut *mut CipMask) -> CipStatus {
    guard(|| put(out, CipMask(io::read_mask(c_path(path)?)?)))
}

/// Fills unknown pixels of `f` by zero-difference extrapolation.
///
/// # Safety
/// Handles must be live; `weights` readable; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cip_initialize(
    f: *const CipImage,
    mask: *const CipMask,
    weights_: *const CipWeights,
    out: *mut *mut CipImage,
) -> CipStatus {
    guard(|| {
        let w = weights(get(weights_, "weights")?)?;
        put(out, CipImage(init::initialize(&get(f, "f")?.0, &get(mask, "mask")?.0, &w)?))
    })
}

/// Runs initialization (noiseless) or starts from `f` (noisy), then the
/// cyclic proximal point iteration.
///
/// # Safety
/// Handles must be live; `weights` and `config` readable; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cip_inpaint(
    f: *const CipImage,
    mask: *const CipMask,
    weights_: *const CipWeights,
    config: *const CipSolverConfig,
    out: *mut *mut CipReport,
) -> CipStatus {
    guard(|| {
        let f = &get(f, "f")?.0;
        let mask = &get(mask, "mask")?.0;
        let w = weights(get(weights_, "weights")?)?;
        let c = get(config, "config")?;
        let kind = kind(c.noisy);
        let config = SolverConfig {
            lambda0: c.lambda0,
            max_sweeps: c.max_sweeps,
            order: None,
            record_energy_every: c.record_energy_every,
            parallel: c.parallel,
        };
        let x0 = match kind {
            ModelKind::Noiseless => init::initialize(f, mask, &w)?,
            ModelKind::Noisy => f.clone(),
        };
        put(out, CipReport(solver::run_cppa(&x0, f, mask, &w, kind, &config)?))
    })
}

/// # Safety
/// `report` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cip_report_free(report: *mut CipReport) {
    free(report)
}

/// New image handle holding a copy of the final image.
///
/// # Safety
/// `report` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cip_report_image(report: *const CipReport, out: *mut *mut CipImage) -> CipStatus {
    guard(|| put(out, CipImage(get(report, "report")?.0.image.clone())))
}

/// Number of recorded energy samples.
///
/// # Safety
/// `report` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn cip_report_trace_len(report: *const CipReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.energy_trace.len())
}

/// Copies up to `len` trace samples; either output may be null.
///
/// # Safety
/// Non-null outputs must point to `len` writable elements.
#[no_mangle]
pub unsafe extern "C" fn cip_report_trace(
    report: *const CipReport,
    sweeps: *mut usize,
    energies: *mut f64,
    len: usize,
) -> CipStatus {
    guard(|| {
        let trace = &get(report, "report")?.0.energy_trace;
        for (i, &(k, e)) in trace.iter().take(len).enumerate() {
            if !sweeps.is_null() {
                *sweeps.add(i) = k;
            }
            if !energies.is_null() {
                *energies.add(i) = e;
            }
        }
        Ok(())
    })
}

/// # Safety
/// Handles must be live; `weights` readable; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cip_energy(
    x: *const CipImage,
    f: *const CipImage,
    mask: *const CipMask,
    weights_: *const CipWeights,
    noisy: bool,
    out: *mut f64,
) -> CipStatus {
    guard(|| {
        let w = weights(get(weights_, "weights")?)?;
        let e = model::energy(&get(x, "x")?.0, &get(f, "f")?.0, &get(mask, "mask")?.0, &w, kind(noisy))?;
        out.as_mut().map(|o| *o = e).ok_or(Failure::Null("out"))
    })
}

/// Mean squared and maximum geodesic distance between two images.
///
/// # Safety
/// Handles must be live; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn cip_cyclic_error(
    x: *const CipImage,
    y: *const CipImage,
    mse: *mut f64,
    max: *mut f64,
) -> CipStatus {
    guard(|| {
        let (m, x) = synth::cyclic_error(&get(x, "x")?.0, &get(y, "y")?.0)?;
        *mse.as_mut().ok_or(Failure::Null("mse"))? = m;
        *max.as_mut().ok_or(Failure::Null("max"))? = x;
        Ok(())
    })
}
