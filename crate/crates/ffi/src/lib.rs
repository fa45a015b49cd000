//! C ABI for the drifg library.
//!
//! Complex images cross the boundary as opaque [`DrifgImage`] handles that
//! the caller releases with [`drifg_image_free`]. Sample data is exchanged as
//! row-major `double` arrays with real and imaginary parts interleaved.
//! Every fallible function returns a [`DrifgStatus`]; on failure a message
//! is available from [`drifg_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use drifg::evaluation::{rrmse_db, PhaseField};
use drifg::operators::modulation_from_reference;
use drifg::{
    decimate, fista_recover, io, make_band_selection, ComplexImage, Error, ModulationField, Ratio, RealField,
    RecoveryConfig, WaveletConfig, WaveletFamily,
};
use num_complex::Complex64;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DrifgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Dimension = 3,
    NonFinite = 4,
    Io = 5,
    Format = 6,
    TooLarge = 7,
    Config = 8,
    Panic = 99,
}

/// Wavelet family selector for [`DrifgRecoveryOptions`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DrifgWavelet {
    Haar = 0,
    Db2 = 1,
    Db4 = 2,
}

/// Solver settings; obtain defaults from [`drifg_recovery_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DrifgRecoveryOptions {
    pub lambda: f64,
    pub max_iters: usize,
    pub step: f64,
    pub rel_tol: f64,
    pub normalize_input: bool,
    pub adaptive_restart: bool,
    pub wavelet: DrifgWavelet,
    pub wavelet_levels: u32,
}

/// Opaque complex image.
pub struct DrifgImage {
    inner: ComplexImage,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> DrifgStatus {
    match e {
        Error::Dimension(_) => DrifgStatus::Dimension,
        Error::InvalidParameter(_) => DrifgStatus::InvalidParameter,
        Error::NonFinite(_) => DrifgStatus::NonFinite,
        Error::TooLarge { .. } => DrifgStatus::TooLarge,
        Error::Format(_) => DrifgStatus::Format,
        Error::Config(_) => DrifgStatus::Config,
        Error::Io(_) => DrifgStatus::Io,
    }
}

struct Failure(DrifgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(DrifgStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DrifgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            DrifgStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            DrifgStatus::Panic
        }
    }
}

unsafe fn image_ref<'a>(img: *const DrifgImage, what: &str) -> Result<&'a ComplexImage, Failure> {
    img.as_ref().map(|h| &h.inner).ok_or_else(|| null(what))
}

unsafe fn put_image(out: *mut *mut DrifgImage, img: ComplexImage) {
    *out = Box::into_raw(Box::new(DrifgImage { inner: img }));
}

unsafe fn path_arg<'a>(path: *const c_char) -> Result<&'a Path, Failure> {
    if path.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(path)
        .to_str()
        .map_err(|_| Failure(DrifgStatus::InvalidParameter, "path is not valid UTF-8".into()))?;
    Ok(Path::new(s))
}

fn ratio(num: u32, den: u32) -> Result<Ratio, Failure> {
    Ok(Ratio::new(num, den)?)
}

unsafe fn real_slice<'a>(data: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

/// Creates an image from `2 * rows * cols` interleaved doubles.
///
/// # Safety
/// `data` must point to `2 * rows * cols` readable doubles and `out` to a
/// writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn drifg_image_new(
    rows: usize,
    cols: usize,
    data: *const f64,
    out: *mut *mut DrifgImage,
) -> DrifgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let n = rows.checked_mul(cols).and_then(|n| n.checked_mul(2)).ok_or_else(|| {
            Failure(DrifgStatus::Dimension, format!("{rows}x{cols} overflows"))
        })?;
        let raw = real_slice(data, n, "data")?;
        let samples = raw.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
        put_image(out, ComplexImage::new(rows, cols, samples)?);
        Ok(())
    })
}

/// Number of rows, or 0 for a null handle.
///
/// # Safety
/// `img` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn drifg_image_rows(img: *const DrifgImage) -> usize {
    img.as_ref().map_or(0, |h| h.inner.rows())
}

/// Number of columns, or 0 for a null handle.
///
/// # Safety
/// `img` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn drifg_image_cols(img: *const DrifgImage) -> usize {
    img.as_ref().map_or(0, |h| h.inner.cols())
}

/// Copies the samples into `out` as interleaved doubles; `len` must equal
/// `2 * rows * cols`.
///
/// # Safety
/// `img` must be a live handle and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn drifg_image_copy_data(img: *const DrifgImage, out: *mut f64, len: usize) -> DrifgStatus {
    guard(|| {
        let img = image_ref(img, "image")?;
        if out.is_null() {
            return Err(null("out"));
        }
        if len != 2 * img.len() {
            return Err(Failure(
                DrifgStatus::Dimension,
                format!("buffer holds {len} doubles, image needs {}", 2 * img.len()),
            ));
        }
        let dst = std::slice::from_raw_parts_mut(out, len);
        for (pair, c) in dst.chunks_exact_mut(2).zip(img.as_slice()) {
            pair[0] = c.re;
            pair[1] = c.im;
        }
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `img` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn drifg_image_free(img: *mut DrifgImage) {
    if !img.is_null() {
        drop(Box::from_raw(img));
    }
}

/// Reads a complex image file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn drifg_image_read(path: *const c_char, out: *mut *mut DrifgImage) -> DrifgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let img = io::read_complex(path_arg(path)?)?;
        put_image(out, img);
        Ok(())
    })
}

/// Writes a complex image file.
///
/// # Safety
/// `img` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn drifg_image_write(img: *const DrifgImage, path: *const c_char) -> DrifgStatus {
    guard(|| {
        let img = image_ref(img, "image")?;
        io::write_complex(path_arg(path)?, img)?;
        Ok(())
    })
}

/// Band-limits and resamples `z` to `alpha x beta` of its size.
///
/// # Safety
/// `z` must be a live handle and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn drifg_decimate(
    z: *const DrifgImage,
    alpha_num: u32,
    alpha_den: u32,
    beta_num: u32,
    beta_den: u32,
    out: *mut *mut DrifgImage,
) -> DrifgStatus {
    guard(|| {
        let z = image_ref(z, "z")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let band = make_band_selection(z.dims(), ratio(alpha_num, alpha_den)?, ratio(beta_num, beta_den)?)?;
        put_image(out, decimate(z, &band)?);
        Ok(())
    })
}

/// Unit-modulus modulation `exp(j (phase(z1) + flat))`; `flat` holds
/// `rows * cols` row-major values.
///
/// # Safety
/// `z1` must be a live handle, `flat` must point to `len` readable doubles
/// and `out` must be a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn drifg_modulation_from_reference(
    z1: *const DrifgImage,
    flat: *const f64,
    len: usize,
    out: *mut *mut DrifgImage,
) -> DrifgStatus {
    guard(|| {
        let z1 = image_ref(z1, "z1")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let flat = RealField::new(z1.rows(), z1.cols(), real_slice(flat, len, "flat")?.to_vec())?;
        let theta = modulation_from_reference(z1, &flat)?;
        put_image(out, theta.as_image().clone());
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn drifg_recovery_options_default() -> DrifgRecoveryOptions {
    let r = RecoveryConfig::default();
    let w = WaveletConfig::default();
    DrifgRecoveryOptions {
        lambda: r.lambda,
        max_iters: r.max_iters,
        step: r.step,
        rel_tol: r.rel_tol,
        normalize_input: r.normalize_input,
        adaptive_restart: r.adaptive_restart,
        wavelet: match w.family {
            WaveletFamily::Haar => DrifgWavelet::Haar,
            WaveletFamily::Db2 => DrifgWavelet::Db2,
            WaveletFamily::Db4 => DrifgWavelet::Db4,
        },
        wavelet_levels: w.levels,
    }
}

/// Recovers the full-resolution interferogram from the low-resolution image
/// `z2_low` and the modulation `theta`. `iterations`, when non-null,
/// receives the number of iterations run.
///
/// # Safety
/// `z2_low` and `theta` must be live handles, `options` null or valid,
/// `out` a writable handle slot and `iterations` null or writable.
#[no_mangle]
pub unsafe extern "C" fn drifg_recover(
    z2_low: *const DrifgImage,
    theta: *const DrifgImage,
    alpha_num: u32,
    alpha_den: u32,
    beta_num: u32,
    beta_den: u32,
    options: *const DrifgRecoveryOptions,
    out: *mut *mut DrifgImage,
    iterations: *mut usize,
) -> DrifgStatus {
    guard(|| {
        let z = image_ref(z2_low, "z2_low")?;
        let theta = ModulationField::new(image_ref(theta, "theta")?.clone())?;
        if out.is_null() {
            return Err(null("out"));
        }
        let opts = options.as_ref().copied().unwrap_or_else(|| drifg_recovery_options_default());
        let family = match opts.wavelet {
            DrifgWavelet::Haar => WaveletFamily::Haar,
            DrifgWavelet::Db2 => WaveletFamily::Db2,
            DrifgWavelet::Db4 => WaveletFamily::Db4,
        };
        let cfg = RecoveryConfig {
            lambda: opts.lambda,
            max_iters: opts.max_iters,
            step: opts.step,
            rel_tol: opts.rel_tol,
            normalize_input: opts.normalize_input,
            adaptive_restart: opts.adaptive_restart,
        };
        let band = make_band_selection(theta.dims(), ratio(alpha_num, alpha_den)?, ratio(beta_num, beta_den)?)?;
        let rec = fista_recover(z, &theta, &band, &WaveletConfig::new(family, opts.wavelet_levels), &cfg)?;
        if let Some(it) = iterations.as_mut() {
            *it = rec.report.iterations_run;
        }
        put_image(out, rec.u);
        Ok(())
    })
}

/// RRMSE in dB between two unwrapped phase arrays of `len` values.
///
/// # Safety
/// `rec` and `reference` must point to `len` readable doubles and `out` to a
/// writable double.
#[no_mangle]
pub unsafe extern "C" fn drifg_rrmse_db(
    rec: *const f64,
    reference: *const f64,
    len: usize,
    out: *mut f64,
) -> DrifgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let field = |p, what| -> Result<PhaseField, Failure> {
            Ok(PhaseField::unwrapped(RealField::new(1, len, real_slice(p, len, what)?.to_vec())?))
        };
        *out = rrmse_db(&field(rec, "rec")?, &field(reference, "reference")?)?;
        Ok(())
    })
}

/// Message of the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next call into this library on the thread.
#[no_mangle]
pub extern "C" fn drifg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn drifg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
